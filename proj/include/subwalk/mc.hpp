#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "subwalk/bernstein.hpp"
#include "subwalk/domain.hpp"
#include "subwalk/lattice.hpp"

namespace subwalk {

using Rng = std::mt19937_64;
using Site64 = std::array<long long, 3>;

struct McConfig {
  std::uint64_t seed = 12345;
  long long n_paths = 100000;
  long long max_steps = 100000;
  int worker_count = 1;
};

// Worker w of a run draws from Rng(seed_seq{seed low, seed high, w}).
Rng worker_rng(std::uint64_t seed, int worker);

// Inverse-CDF sampling of R from a truncated table c_1..c_M; draws landing in the tail are redrawn.
class TableRSampler {
 public:
  explicit TableRSampler(std::span<const double> cm);
  long long operator()(Rng& rng) const;

 private:
  std::vector<double> cdf_;
};

// Exact sampling of R: draw t from (1 - e^{-t}) mu(t) dt, then R ~ Poisson(t) conditioned on R >= 1.
class LevyRSampler {
 public:
  explicit LevyRSampler(const BernsteinSpec& spec);
  long long operator()(Rng& rng) const;
  double sample_time(Rng& rng) const;

 private:
  std::vector<LevyComponent> comps_;
  std::vector<double> cum_;  // cumulative component probabilities w_i phi_i(1)
};

// Z_m for the simple random walk, sampled exactly through multinomial axis counts.
Site64 sample_srw_block(int d, long long m, Rng& rng);

// One step of X; R is drawn by whichever sampler is supplied.
using RSampler = std::function<long long(Rng&)>;

struct ExitRecord {
  Site64 pre_exit{0, 0, 0};
  Site64 exit{0, 0, 0};
  long long steps = 0;
  bool censored = false;
};

ExitRecord simulate_exit(const FiniteDomain& domain, const RSampler& sample_r, const Site& start, Rng& rng,
                         long long max_steps);

// n_paths exit records, in deterministic order given (seed, worker_count).
std::vector<ExitRecord> run_exits(const FiniteDomain& domain, const BernsteinSpec& spec, const Site& start,
                                  const McConfig& config);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long long samples = 0;
  long long censored = 0;
};

MeanEstimate exit_time_estimate(std::span<const ExitRecord> records);

// Total variation between the empirical exit law and the kernel row on the row's window,
// with everything beyond the window lumped into one cell.
double exit_law_tv(std::span<const ExitRecord> records, const PoissonKernelRow& row);

using PairFunction = std::function<double(const Site64&, const Site64&)>;

struct IkedaWatanabeResult {
  double lhs = 0.0;
  double lhs_std_error = 0.0;
  double rhs = 0.0;
  double truncation_bound = 0.0;
  long long censored = 0;
  bool valid = true;  // censoring below 0.1%
  bool within() const;
};

// LHS: average of f(X_{tau-1}, X_tau) over the records.
// RHS: sum_y G_B(x,y) E[f(y, y + X_1); y + X_1 outside B], with f assumed equal to f_far beyond the step-law box.
IkedaWatanabeResult ikeda_watanabe_check(const FiniteDomain& domain, const DomainSolution& sol, const StepLaw& law,
                                         const PairFunction& f, double f_far, double f_sup, std::size_t start_index,
                                         std::span<const ExitRecord> records);

struct GreenEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double truncation_bound = 0.0;  // expected visits at steps >= max_steps
  long long n_paths = 0;
  long long max_steps = 0;
};

// Visits to x over steps 0..max_steps-1 of walks started at the origin.
GreenEstimate estimate_green(const BernsteinSpec& spec, int d, const Site& x, const McConfig& config);

// C sup/Gamma(d/2) int s^{d/2-1} psi(s)^N / phi(1 - e^{-s}) ds with psi = 1 - phi(1 - e^{-s}).
double green_truncation_bound(const BernsteinSpec& spec, int d, long long max_steps);

}  // namespace subwalk
