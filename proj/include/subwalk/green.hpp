#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "subwalk/bernstein.hpp"
#include "subwalk/lattice.hpp"
#include "subwalk/subordination.hpp"

namespace subwalk {

struct TransienceVerdict {
  bool transient = false;
  int d = 0;
  double gamma2 = 0.0;
  double threshold = 0.0;  // d/2
  double integral = 0.0;   // int over (-delta,delta)^d of 1/phi(1 - char(theta)); NaN when not computed
  double integral_error = 0.0;
  double delta = 0.5;
  std::string diagnostic;
};

// Verdict from gamma2 < d/2; the integral is evaluated whenever the verdict passes.
TransienceVerdict transience_check(const BernsteinSpec& spec, int d, const ScalingEstimate& est);
TransienceVerdict transience_check(const BernsteinSpec& spec, int d);

// The criterion integral alone; finite for transient walks.
double transience_integral(const BernsteinSpec& spec, int d, double delta, double* error = nullptr);

struct GreenOptions {
  int radius = 32;
  bool tail_correction = true;      // add the local-limit estimate of sum_{m>M}
  double max_relative_tail = 1e-4;  // refuse when tail_bound/G exceeds this anywhere
  bool enforce_tail_target = true;
};

struct GreenTable {
  int d = 0;
  int radius = 0;
  int truncation_M = 0;
  OrthantGrid grid;
  std::vector<double> values;
  std::vector<double> tail_correction;  // included in values
  std::vector<double> tail_bound;
  double lclt_constant = 0.0;
  double kappa = 0.0;
  double kappa_drift = 0.0;

  double at(const Site& x) const { return values[grid.index(x)]; }
  double bound_at(const Site& x) const { return tail_bound[grid.index(x)]; }
  double max_relative_tail() const;
};

GreenTable green_series(const TransienceVerdict& verdict, const BernsteinSpec& spec,
                        const SubordinationWeights& weights, const GreenOptions& opt);

// G(x)/g(|x|) over 1 <= |x| <= r_max.
BandReport green_band(const GreenTable& table, const BernsteinSpec& spec, double r_max);

void write_green_csv(std::ostream& os, const GreenTable& table, const BernsteinSpec& spec);

}  // namespace subwalk
