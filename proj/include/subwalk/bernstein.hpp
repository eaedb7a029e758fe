#pragma once

#include <optional>
#include <string>
#include <vector>

namespace subwalk {

enum class Family { Stable, StableMixture, Relativistic };

// One term of the Levy density: weight * alpha/Gamma(1-alpha) * t^(-1-alpha) * exp(-theta t).
// Weights already include the normalization, so the terms sum to the normalized density.
struct LevyComponent {
  double weight;
  double alpha;
  double theta;
};

class BernsteinSpec {
 public:
  static BernsteinSpec stable(double alpha);
  static BernsteinSpec stable_mixture(double w1, double alpha1, double w2, double alpha2);
  static BernsteinSpec relativistic(double alpha, double theta);

  Family family() const { return family_; }
  double norm() const { return norm_; }
  const std::vector<double>& alpha_params() const { return alphas_; }
  const std::vector<LevyComponent>& components() const { return components_; }
  // Raw constructor parameters in declaration order, e.g. {w1, a1, w2, a2}.
  const std::vector<double>& params() const { return params_; }
  std::string describe() const;

 private:
  Family family_ = Family::Stable;
  double norm_ = 1.0;
  std::vector<double> alphas_;
  std::vector<double> params_;
  std::vector<LevyComponent> components_;
};

double phi(const BernsteinSpec& spec, double lambda);
double levy_density(const BernsteinSpec& spec, double t);
std::optional<double> potential_density(const BernsteinSpec& spec, double t);

// phi(lambda) = int (1 - e^{-lambda t}) mu(t) dt by quadrature; cross-check route.
double phi_by_quadrature(const BernsteinSpec& spec, double lambda);
// int e^{-lambda t} u(t) dt by quadrature; should equal 1/phi(lambda).
std::optional<double> potential_laplace_by_quadrature(const BernsteinSpec& spec, double lambda);

struct ScalingEstimate {
  double a1 = 1.0;
  double gamma1 = 0.0;
  double a2 = 1.0;
  double gamma2 = 0.0;
  bool degenerate = false;
  double r_min = 0.0;
};

// Pairwise slope scan over a log grid on [10^-decades, 1].
ScalingEstimate estimate_scaling(const BernsteinSpec& spec, int grid_size, double decades = 8.0);

// Count of grid pairs violating 1 ^ lambda <= phi(lambda t)/phi(t) <= 1 v lambda.
int ratio_bound_violations(const BernsteinSpec& spec, int grid_size);

double g_profile(const BernsteinSpec& spec, double r, int d);
double j_profile(const BernsteinSpec& spec, double r, int d);

// Built-in registry: stable-type specs satisfying both scaling conditions.
std::vector<BernsteinSpec> builtin_specs();

}  // namespace subwalk
