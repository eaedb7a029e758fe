#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "subwalk/bernstein.hpp"
#include "subwalk/lattice.hpp"
#include "subwalk/subordination.hpp"

namespace subwalk {

class FiniteDomain {
 public:
  static constexpr std::size_t kDefaultCap = 10000;

  // B(center, n) = {y : |y - center| < n}.
  static FiniteDomain ball(int d, const Site& center, double n, std::size_t cap = kDefaultCap);
  // Arbitrary finite set; center is used for the accessors below.
  static FiniteDomain from_points(int d, std::vector<Site> points, const Site& center, double n);

  int dim() const { return d_; }
  const Site& center() const { return center_; }
  double radius() const { return n_; }
  const std::vector<Site>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  std::optional<std::size_t> index_of(const Site& y) const;
  bool contains(const Site& y) const { return index_of(y).has_value(); }
  // Indices with |y - center| < r.
  std::vector<std::size_t> within(double r) const;
  // Indices with r <= |y - center| < s.
  std::vector<std::size_t> annulus(double r, double s) const;
  // Largest |y - y'|_inf over pairs of points.
  int span_linf() const;

 private:
  int d_ = 1;
  Site center_{0, 0, 0};
  double n_ = 0.0;
  std::vector<Site> points_;
  Site lo_{0, 0, 0};
  int box_ = 0;
  std::vector<int> lookup_;
};

struct DomainSolution {
  Eigen::MatrixXd P;   // restricted transition matrix including the stay probability
  Eigen::MatrixXd G;   // (I - P)^{-1}
  Eigen::VectorXd eta;
  Eigen::VectorXd defect;
  double residual = 0.0;        // max |(I - P) G - I|, NaN when not computed
  double symmetry_error = 0.0;  // max |G - G^T|
  // Every entry of the true restricted matrix exceeds P by at most this much.
  double entry_bias_bound = 0.0;
  // Upper bound on (true eta - eta); eta itself is a lower bound.
  double eta_bias_bound = 0.0;
};

DomainSolution solve_green_ball(const FiniteDomain& domain, const StepLaw& law, bool compute_residual = true);

struct GeneratorValue {
  double value = 0.0;
  double bound = 0.0;  // |true (Af)(x) - value| <= bound
};

// f(y) for y outside the step-law box around x is only known to lie in [value - bound, value + bound].
struct FarField {
  double value = 0.0;
  double bound = 0.0;
};

GeneratorValue generator_apply(const StepLaw& law, const std::function<double(const Site&)>& f, const Site& x,
                               FarField far = {});

// f given by values on the domain plus finitely many exterior values, zero elsewhere.
struct DomainFunction {
  const FiniteDomain* domain = nullptr;
  std::span<const double> inside;
  std::vector<std::pair<Site, double>> outside;
};

GeneratorValue generator_apply(const StepLaw& law, const DomainFunction& f, const Site& x);

struct ProbeReport {
  int trials = 0;
  int decisive = 0;    // trials where (Af)(x) < -bound
  int violations = 0;
};

// Random compactly supported f on [-w, w]^d; whenever (Af)(x) < -bound, require f(x) > inf f.
ProbeReport maximum_principle_probe(const StepLaw& law, int trials, std::uint64_t seed, int window = 4);

struct PoissonKernelRow {
  Site x{0, 0, 0};
  std::size_t x_index = 0;
  double exterior_radius = 0.0;
  std::vector<Site> z;
  std::vector<double> k;
  double captured_mass = 0.0;
  double unassigned_exit = 0.0;  // sum_y G(x,y) (outside + tail mass): exits with unrecorded location
  std::string truncation_note;
};

// Exterior sites z with |z - center| >= n and |z - center| <= exterior_radius.
std::vector<Site> exterior_window(const FiniteDomain& domain, double exterior_radius);

std::vector<PoissonKernelRow> poisson_kernel_rows(const FiniteDomain& domain, const DomainSolution& sol,
                                                  const StepLaw& law, std::span<const std::size_t> x_indices,
                                                  double exterior_radius);
PoissonKernelRow poisson_kernel(const FiniteDomain& domain, const DomainSolution& sol, const StepLaw& law,
                                std::size_t x_index, double exterior_radius);

double l_function(const BernsteinSpec& spec, const FiniteDomain& domain, const DomainSolution& sol,
                  const Site& z, double b2);
std::vector<double> l_function(const BernsteinSpec& spec, const FiniteDomain& domain, const DomainSolution& sol,
                               std::span<const Site> zs, double b2);

// f(x) = sum_z data(z) K(x, z) for each row; data must lie inside the rows' exterior window.
std::vector<double> harmonic_extend(std::span<const PoissonKernelRow> rows,
                                    std::span<const std::pair<Site, double>> data);

// Same extension on every point of the domain: f_B = G v with v(y) = sum_z data(z) P(z - y).
Eigen::VectorXd harmonic_extension_on_domain(const FiniteDomain& domain, const DomainSolution& sol,
                                             const StepLaw& law, std::span<const std::pair<Site, double>> data);

struct HarnackEntry {
  Site z0{0, 0, 0};
  double sup = 0.0;
  double inf = 0.0;
  double ratio() const { return sup / inf; }
};

struct HarnackReport {
  double n = 0.0;
  double a = 0.0;
  std::vector<HarnackEntry> entries;
  double max_ratio = 0.0;
};

// sup/inf over B(center, a n) of the extension of each point mass in the family.
HarnackReport harnack_ratio(const FiniteDomain& domain, const DomainSolution& sol, const StepLaw& law, double a,
                            std::span<const Site> z0_family);

void write_eta_csv(std::ostream& os, const FiniteDomain& domain, const DomainSolution& sol);
// G_B rows for the listed x indices.
void write_ball_green_csv(std::ostream& os, const FiniteDomain& domain, const DomainSolution& sol,
                          std::span<const std::size_t> x_indices);
void write_poisson_csv(std::ostream& os, int d, std::span<const PoissonKernelRow> rows);

}  // namespace subwalk
