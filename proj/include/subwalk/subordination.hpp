#pragma once

#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "subwalk/bernstein.hpp"
#include "subwalk/lattice.hpp"

namespace subwalk {

struct SubordinationWeights {
  std::vector<double> cm;          // index m = 0..M, cm[0] = 0
  std::vector<double> c_renewal;   // index m = 0..M
  std::optional<std::vector<double>> c_integral;
  int truncation_M = 0;
  double tail_mass = 0.0;          // 1 - sum_{m<=M} cm
};

// c_m = (1/m!) int t^m e^{-t} mu(t) dt for m = 1..M, by quadrature.
std::vector<double> compute_cm(const BernsteinSpec& spec, int M);
// Renewal recursion c(0) = 1, c(m) = sum_{k=1}^m c_k c(m-k).
std::vector<double> compute_c_renewal(std::span<const double> cm, int M);
// c(m) = (1/m!) int t^m e^{-t} u(t) dt; only where u is known in closed form.
std::optional<std::vector<double>> compute_c_integral(const BernsteinSpec& spec, int M);

SubordinationWeights compute_weights(const BernsteinSpec& spec, int M, bool with_integral = false);

// Truncated one-step law of X on the box |z|_inf <= radius.
struct StepLaw {
  int d = 1;
  int radius = 0;
  int truncation_M = 0;
  OrthantGrid grid;
  std::vector<double> probs;          // orthant storage; the origin entry is stay_prob
  double stay_prob = 0.0;
  double outside_mass = 0.0;          // mass with m <= M landing outside the box
  double tail_mass = 0.0;             // mass with m > M, location unassigned
  double tail_assigned = 0.0;         // mass with m > M placed in the box by assign_tail
  double tail_pointwise_bound = 0.0;  // tail_mass * sup_z p(M, z); bounds the tail at any single site
  double kernel_sup_at_M = 0.0;

  double at(const Site& z) const { return grid.contains(z) ? probs[grid.index(z)] : 0.0; }
  double unassigned_mass() const { return outside_mass + tail_mass; }
  // Sum of all box probabilities including the origin.
  double box_mass() const;
};

// Route through a precomputed convolution slab.
StepLaw build_step_law(std::span<const double> cm, double tail_mass, const KernelSlab& slab, int radius);
// Route through the closed-form kernel; no slab depth limit.
StepLaw build_step_law(std::span<const double> cm, double tail_mass, int d, int radius);

// Places a certified lower bound of the m > M part inside the box, from the local limit theorem with
// c_m extrapolated as kappa phi(1/m)/m; the remainder stays in tail_mass.
StepLaw assign_tail(const StepLaw& law, const BernsteinSpec& spec, std::span<const double> cm);

struct BandReport {
  std::string claim_id;
  double n = 0.0;
  double band_lo = std::numeric_limits<double>::infinity();
  double band_hi = -std::numeric_limits<double>::infinity();
  double ratio() const { return band_hi / band_lo; }
  double arg_lo = 0.0;
  double arg_hi = 0.0;
  void include(double value, double arg);
};

BandReport cm_asymptotic_report(std::span<const double> cm, const BernsteinSpec& spec, int m_lo, int m_hi);
BandReport renewal_asymptotic_report(std::span<const double> c, const BernsteinSpec& spec, int m_lo, int m_hi);
// P(X_1 = z)/j(|z|) over 1 <= |z| <= r_max.
BandReport step_law_band(const StepLaw& law, const BernsteinSpec& spec, double r_max);
// sum |z|^2 P(X_1 = z) over |z|_inf <= radius.
double step_second_moment(const StepLaw& law, int radius);

void write_weights_csv(std::ostream& os, const SubordinationWeights& w);
void write_step_law_csv(std::ostream& os, const StepLaw& law, const BernsteinSpec& spec, int radius);

}  // namespace subwalk
