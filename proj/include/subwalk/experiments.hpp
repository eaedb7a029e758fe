#pragma once

#include <string>
#include <vector>

#include "subwalk/config.hpp"
#include "subwalk/domain.hpp"
#include "subwalk/green.hpp"
#include "subwalk/mc.hpp"
#include "subwalk/subordination.hpp"
#include <json.hpp>

namespace subwalk {

using json = nlohmann::json;

// Gate thresholds shared by the CLI and the acceptance binary.
namespace gates {
inline constexpr double kCmRelTol = 1e-8;
inline constexpr double kRenewalRelTol = 1e-6;
inline constexpr double kIntegralRelTol = 1e-6;
inline constexpr double kTailMass = 1e-6;
inline constexpr double kStepMassTol = 1e-10;
inline constexpr double kCapturedMass = 0.9;
inline constexpr double kAsymptoticBand = 3.0;
inline constexpr int kAsymptoticLo = 10;
inline constexpr int kAsymptoticHi = 2000;
inline constexpr double kStepBand = 10.0;
inline constexpr double kGreenBand = 10.0;
inline constexpr double kGreenRelTail = 1e-4;
inline constexpr double kExitTimeCross = 3.0;
inline constexpr double kBallGreenBand = 20.0;
inline constexpr double kCrossVariation = 2.0;
inline constexpr double kPoissonBand = 20.0;
inline constexpr double kHarnackVariation = 2.0;
inline constexpr double kResidual = 1e-10;
inline constexpr double kSigmas = 3.0;
inline constexpr double kTvDistance = 0.02;
inline constexpr double kCensoredFraction = 1e-3;
inline constexpr double kGammaRatioTol = 5e-3;
}  // namespace gates

struct Gate {
  std::string claim_id;
  bool pass = false;
  std::string detail;
};

json to_json(const BandReport& b);
json to_json(const Gate& g);

// One band per n, plus how its edges move across n.
struct CrossNBand {
  std::string claim_id;
  std::vector<BandReport> per_n;
  double max_ratio() const;
  double lo_variation() const;
  double hi_variation() const;
  double variation() const;
};

json to_json(const CrossNBand& b);

struct WeightsReport {
  SubordinationWeights weights;
  BandReport cm_band;
  BandReport renewal_band;
};

WeightsReport run_weights(const BernsteinSpec& spec, int M, int m_lo = gates::kAsymptoticLo,
                          int m_hi = gates::kAsymptoticHi);

struct StepLawReport {
  StepLaw law;
  BandReport band;
  double total_mass = 0.0;  // box + outside + tail
};

// Truncated step law, with assign_tail applied when requested.
StepLaw make_step_law(const BernsteinSpec& spec, const SubordinationWeights& w, int d, int radius, bool tail);

StepLawReport run_steplaw(const BernsteinSpec& spec, int d, int M, int radius, double r_max,
                          bool tail = false);

struct GreenReport {
  TransienceVerdict verdict;
  GreenTable table;
  BandReport band;
};

// Throws TransienceError when the verdict fails.
GreenReport run_green(const BernsteinSpec& spec, int d, int M, int radius, double r_max);

struct BallRun {
  double n = 0.0;
  FiniteDomain domain;
  DomainSolution sol;
};

struct BallStudy {
  BernsteinSpec spec = BernsteinSpec::stable(0.5);
  int d = 2;
  SubordinationWeights weights;
  bool assign_tail = false;
  StepLaw law;
  std::vector<BallRun> runs;
  double b1 = 0.0, b2 = 0.0, a = 0.0;
};

BallStudy make_ball_study(const ExperimentConfig& cfg);

// eta(x) phi(n^-2) over B_{an/2}.
CrossNBand exit_time_bands(const BallStudy& study);
// G_B(x,y) n^d / eta(y) over x in B_{b1 n}, y in A(b2 n, n).
CrossNBand ball_green_bands(const BallStudy& study);

struct ComparisonReport {
  CrossNBand band;         // G_B(x,y)/G(x-y) over x, y in B_{an}
  long long violations = 0;  // G_B above G beyond the tail bound
  double max_excess = 0.0;
};

ComparisonReport whole_space_comparison(const BallStudy& study, const GreenTable& whole);

struct PoissonStudy {
  CrossNBand band;  // K(x,z)/l(z) over x in B_{b1 n}, n <= |z| <= factor n
  std::vector<double> captured_mass;     // center row at the window edge, per n
  std::vector<double> captured_at_wide;  // center row at capture_factor n, per n, on a box widened as needed
  std::vector<std::vector<PoissonKernelRow>> rows;
};

PoissonStudy run_poisson(const BallStudy& study, double exterior_factor, double capture_factor);

struct HarnackStudy {
  std::vector<HarnackReport> per_n;
  std::vector<double> variation;  // per z0 family member, max_n/min_n of the ratio
  double max_variation() const;
};

// z0 on the first axis at |z0| = factor n for each factor.
HarnackStudy run_harnack(const BallStudy& study, double a, const std::vector<double>& factors);

struct IdentityReport {
  double eta_generator_excess = 0.0;   // max over x of |(A eta)(x) + 1| - bound
  double harmonic_excess = 0.0;        // max over x of |(A f)(x)| - bound for kernel-built f
  double residual = 0.0;
  ProbeReport probe;
  bool pass() const;
};

IdentityReport run_identities(const BallStudy& study, int probe_trials, std::uint64_t seed);

struct McReport {
  double n = 0.0;
  MeanEstimate exit_time;
  double eta = 0.0;
  double eta_bias = 0.0;
  double tv = 0.0;
  double tv_window_mass = 0.0;
  IkedaWatanabeResult iw_one;
  IkedaWatanabeResult iw_far;
  IkedaWatanabeResult iw_jump;
  GreenEstimate green;
  double green_series_value = 0.0;
  double green_series_bound = 0.0;
  long long censored = 0;
  long long paths = 0;
  std::vector<Gate> gates() const;
};

// Stable(alpha) walks in the configured dimension; the series oracle uses the config's Green settings.
McReport run_mc(const ExperimentConfig& cfg);

json to_json(const McReport& r);

}  // namespace subwalk
