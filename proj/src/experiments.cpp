#include "subwalk/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subwalk/errors.hpp"

namespace subwalk {

namespace {

double edge_variation(const std::vector<BandReport>& bands, bool lo) {
  double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
  for (const auto& b : bands) {
    const double v = lo ? b.band_lo : b.band_hi;
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  return bands.empty() ? std::numeric_limits<double>::quiet_NaN() : mx / mn;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::size_t center_index(const FiniteDomain& dom) { return dom.index_of(dom.center()).value(); }

}  // namespace

json to_json(const BandReport& b) {
  return {{"claim_id", b.claim_id}, {"n", b.n},           {"band_lo", number(b.band_lo)},
          {"band_hi", number(b.band_hi)}, {"ratio", number(b.ratio())}};
}

json to_json(const Gate& g) { return {{"claim_id", g.claim_id}, {"pass", g.pass}, {"detail", g.detail}}; }

double CrossNBand::max_ratio() const {
  double r = 0.0;
  for (const auto& b : per_n) r = std::max(r, b.ratio());
  return r;
}
double CrossNBand::lo_variation() const { return edge_variation(per_n, true); }
double CrossNBand::hi_variation() const { return edge_variation(per_n, false); }
double CrossNBand::variation() const { return std::max(lo_variation(), hi_variation()); }

json to_json(const CrossNBand& b) {
  json per = json::array();
  for (const auto& r : b.per_n) per.push_back(to_json(r));
  return {{"claim_id", b.claim_id},
          {"per_n", per},
          {"max_ratio", number(b.max_ratio())},
          {"lo_variation", number(b.lo_variation())},
          {"hi_variation", number(b.hi_variation())},
          {"variation", number(b.variation())}};
}

WeightsReport run_weights(const BernsteinSpec& spec, int M, int m_lo, int m_hi) {
  WeightsReport r;
  r.weights = compute_weights(spec, M, spec.family() == Family::Stable);
  const int hi = std::min(m_hi, M);
  r.cm_band = cm_asymptotic_report(r.weights.cm, spec, m_lo, hi);
  r.renewal_band = renewal_asymptotic_report(r.weights.c_renewal, spec, m_lo, hi);
  return r;
}

StepLaw make_step_law(const BernsteinSpec& spec, const SubordinationWeights& w, int d, int radius, bool tail) {
  auto law = build_step_law(w.cm, w.tail_mass, d, radius);
  return tail ? assign_tail(law, spec, w.cm) : law;
}

StepLawReport run_steplaw(const BernsteinSpec& spec, int d, int M, int radius, double r_max, bool tail) {
  StepLawReport r;
  const auto w = compute_weights(spec, M);
  r.law = make_step_law(spec, w, d, radius, tail);
  r.band = step_law_band(r.law, spec, r_max);
  r.total_mass = r.law.box_mass() + r.law.outside_mass + r.law.tail_mass;
  return r;
}

GreenReport run_green(const BernsteinSpec& spec, int d, int M, int radius, double r_max) {
  GreenReport r;
  r.verdict = transience_check(spec, d);
  if (!r.verdict.transient) throw TransienceError(r.verdict.diagnostic);
  GreenOptions opt;
  opt.radius = radius;
  opt.enforce_tail_target = false;
  r.table = green_series(r.verdict, spec, compute_weights(spec, M), opt);
  r.band = green_band(r.table, spec, r_max);
  return r;
}

BallStudy make_ball_study(const ExperimentConfig& cfg) {
  cfg.validate();
  BallStudy s;
  s.spec = cfg.spec();
  s.d = cfg.d;
  s.b1 = cfg.b1;
  s.b2 = cfg.b2;
  s.a = cfg.a;
  s.weights = compute_weights(s.spec, cfg.truncation_M());
  s.assign_tail = cfg.assign_tail;
  s.law = make_step_law(s.spec, s.weights, cfg.d, cfg.step_radius, s.assign_tail);
  for (double n : cfg.n_list) {
    BallRun run;
    run.n = n;
    run.domain = FiniteDomain::ball(cfg.d, {0, 0, 0}, n);
    run.sol = solve_green_ball(run.domain, s.law, true);
    s.runs.push_back(std::move(run));
  }
  return s;
}

CrossNBand exit_time_bands(const BallStudy& study) {
  CrossNBand out;
  out.claim_id = "exit_time_scaling";
  for (const auto& run : study.runs) {
    BandReport b;
    b.claim_id = out.claim_id;
    b.n = run.n;
    const double scale = phi(study.spec, 1.0 / (run.n * run.n));
    for (std::size_t k : run.domain.within(study.a * run.n / 2.0))
      b.include(run.sol.eta(static_cast<Eigen::Index>(k)) * scale, norm(run.domain.points()[k]));
    out.per_n.push_back(b);
  }
  return out;
}

CrossNBand ball_green_bands(const BallStudy& study) {
  CrossNBand out;
  out.claim_id = "ball_green_two_sided";
  for (const auto& run : study.runs) {
    BandReport b;
    b.claim_id = out.claim_id;
    b.n = run.n;
    const double nd = std::pow(run.n, study.d);
    const auto X = run.domain.within(study.b1 * run.n);
    for (std::size_t y : run.domain.annulus(study.b2 * run.n, run.n)) {
      const auto yi = static_cast<Eigen::Index>(y);
      for (std::size_t x : X)
        b.include(run.sol.G(static_cast<Eigen::Index>(x), yi) * nd / run.sol.eta(yi), norm(run.domain.points()[y]));
    }
    out.per_n.push_back(b);
  }
  return out;
}

ComparisonReport whole_space_comparison(const BallStudy& study, const GreenTable& whole) {
  ComparisonReport rep;
  rep.band.claim_id = "ball_vs_whole_space";
  for (const auto& run : study.runs) {
    BandReport b;
    b.claim_id = rep.band.claim_id;
    b.n = run.n;
    const auto& pts = run.domain.points();
    const auto inner = run.domain.within(study.a * run.n);
    for (std::size_t x : inner)
      for (std::size_t y : inner) {
        const Site dz = pts[y] - pts[x];
        if (!whole.grid.contains(dz))
          throw SizingError("whole_space_comparison: Green table radius below the comparison ball diameter");
        const double g = whole.at(dz);
        const double gb = run.sol.G(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
        b.include(gb / g, norm(dz));
      }
    // monotonicity over every pair
    for (std::size_t x = 0; x < pts.size(); ++x)
      for (std::size_t y = 0; y < pts.size(); ++y) {
        const Site dz = pts[y] - pts[x];
        if (!whole.grid.contains(dz)) continue;
        const double excess = run.sol.G(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) -
                              whole.at(dz) - whole.bound_at(dz) - 1e-12;
        if (excess > 0.0) ++rep.violations;
        rep.max_excess = std::max(rep.max_excess, excess);
      }
    rep.band.per_n.push_back(b);
  }
  return rep;
}

PoissonStudy run_poisson(const BallStudy& study, double exterior_factor, double capture_factor) {
  PoissonStudy out;
  out.band.claim_id = "poisson_vs_l";
  for (const auto& run : study.runs) {
    const auto X = run.domain.within(study.b1 * run.n);
    auto rows = poisson_kernel_rows(run.domain, run.sol, study.law, X, exterior_factor * run.n);
    const auto& zs = rows.front().z;
    const auto l = l_function(study.spec, run.domain, run.sol, zs, study.b2);
    BandReport b;
    b.claim_id = out.band.claim_id;
    b.n = run.n;
    for (const auto& row : rows)
      for (std::size_t i = 0; i < zs.size(); ++i) b.include(row.k[i] / l[i], norm(zs[i]));
    out.band.per_n.push_back(b);

    const std::size_t c = center_index(run.domain);
    const auto it = std::find(X.begin(), X.end(), c);
    out.captured_mass.push_back(it != X.end() ? rows[static_cast<std::size_t>(it - X.begin())].captured_mass
                                              : poisson_kernel(run.domain, run.sol, study.law, c,
                                                               exterior_factor * run.n)
                                                    .captured_mass);
    const double wide = capture_factor * run.n;
    const int need = static_cast<int>(std::ceil(wide + run.n));
    if (study.law.radius >= need) {
      out.captured_at_wide.push_back(poisson_kernel(run.domain, run.sol, study.law, c, wide).captured_mass);
    } else {
      const auto wide_law = make_step_law(study.spec, study.weights, study.d, need, study.assign_tail);
      out.captured_at_wide.push_back(poisson_kernel(run.domain, run.sol, wide_law, c, wide).captured_mass);
    }
    out.rows.push_back(std::move(rows));
  }
  return out;
}

double HarnackStudy::max_variation() const {
  double v = 0.0;
  for (double x : variation) v = std::max(v, x);
  return v;
}

HarnackStudy run_harnack(const BallStudy& study, double a, const std::vector<double>& factors) {
  HarnackStudy out;
  for (const auto& run : study.runs) {
    std::vector<Site> family;
    for (double f : factors) {
      Site z = run.domain.center();
      z[0] += static_cast<int>(std::lround(f * run.n));
      family.push_back(z);
    }
    out.per_n.push_back(harnack_ratio(run.domain, run.sol, study.law, a, family));
  }
  for (std::size_t i = 0; i < factors.size(); ++i) {
    double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
    for (const auto& rep : out.per_n) {
      mn = std::min(mn, rep.entries[i].ratio());
      mx = std::max(mx, rep.entries[i].ratio());
    }
    out.variation.push_back(mx / mn);
  }
  return out;
}

bool IdentityReport::pass() const {
  return eta_generator_excess <= 1e-9 && harmonic_excess <= 1e-9 && residual <= gates::kResidual &&
         probe.violations == 0;
}

IdentityReport run_identities(const BallStudy& study, int probe_trials, std::uint64_t seed) {
  IdentityReport rep;
  rep.eta_generator_excess = -std::numeric_limits<double>::infinity();
  rep.harmonic_excess = -std::numeric_limits<double>::infinity();
  for (const auto& run : study.runs) {
    rep.residual = std::max(rep.residual, run.sol.residual);
    const auto& pts = run.domain.points();
    const std::vector<double> eta(run.sol.eta.data(), run.sol.eta.data() + run.sol.eta.size());
    DomainFunction fe{&run.domain, eta, {}};

    Site z0 = run.domain.center();
    z0[0] += static_cast<int>(std::lround(2.0 * run.n));
    const std::pair<Site, double> datum[1] = {{z0, 1.0}};
    const Eigen::VectorXd h = harmonic_extension_on_domain(run.domain, run.sol, study.law, datum);
    const std::vector<double> hv(h.data(), h.data() + h.size());
    DomainFunction fh{&run.domain, hv, {{z0, 1.0}}};

    for (const Site& x : pts) {
      const auto ge = generator_apply(study.law, fe, x);
      rep.eta_generator_excess = std::max(rep.eta_generator_excess, std::abs(ge.value + 1.0) - ge.bound);
      const auto gh = generator_apply(study.law, fh, x);
      rep.harmonic_excess = std::max(rep.harmonic_excess, std::abs(gh.value) - gh.bound);
    }
  }
  rep.probe = maximum_principle_probe(study.law, probe_trials, seed);
  return rep;
}

std::vector<Gate> McReport::gates() const {
  using namespace gates;
  auto within = [](double a, double b, double se, double bias) { return std::abs(a - b) <= kSigmas * se + bias; };
  std::vector<Gate> g;
  const bool valid = static_cast<double>(censored) < kCensoredFraction * static_cast<double>(paths);
  g.push_back({"mc_green", within(green.mean, green_series_value, green.std_error,
                                  green.truncation_bound + green_series_bound),
               "MC " + std::to_string(green.mean) + " +- " + std::to_string(green.std_error) + " vs series " +
                   std::to_string(green_series_value)});
  g.push_back({"mc_exit_time", valid && within(exit_time.mean, eta, exit_time.std_error, eta_bias),
               "MC " + std::to_string(exit_time.mean) + " +- " + std::to_string(exit_time.std_error) +
                   " vs eta " + std::to_string(eta)});
  g.push_back({"mc_exit_law_tv", valid && tv <= kTvDistance, "TV " + std::to_string(tv)});
  g.push_back({"mc_iw_far", iw_far.within(),
               "LHS " + std::to_string(iw_far.lhs) + " RHS " + std::to_string(iw_far.rhs)});
  g.push_back({"mc_iw_jump", iw_jump.within(),
               "LHS " + std::to_string(iw_jump.lhs) + " RHS " + std::to_string(iw_jump.rhs)});
  return g;
}

McReport run_mc(const ExperimentConfig& cfg) {
  cfg.validate();
  McReport r;
  const BernsteinSpec spec = cfg.spec();
  const int d = cfg.d;
  McConfig mc;
  mc.seed = cfg.seed;
  mc.worker_count = cfg.jobs;
  mc.n_paths = cfg.exit_paths;
  mc.max_steps = cfg.max_steps;

  const auto w = compute_weights(spec, cfg.truncation_M());
  const StepLaw law = make_step_law(spec, w, d, cfg.step_radius, cfg.assign_tail);
  r.n = cfg.mc_n;
  const auto dom = FiniteDomain::ball(d, {0, 0, 0}, r.n);
  const auto sol = solve_green_ball(dom, law, false);
  const std::size_t x0 = center_index(dom);
  r.eta = sol.eta(static_cast<Eigen::Index>(x0));
  r.eta_bias = sol.eta_bias_bound;

  const auto records = run_exits(dom, spec, dom.center(), mc);
  r.paths = static_cast<long long>(records.size());
  r.exit_time = exit_time_estimate(records);
  r.censored = r.exit_time.censored;
  const auto row = poisson_kernel(dom, sol, law, x0, 2.0 * r.n);
  r.tv = exit_law_tv(records, row);
  r.tv_window_mass = row.captured_mass;

  const double n = r.n;
  auto len = [](const Site64& a, const Site64& b) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += static_cast<double>(b[i] - a[i]) * static_cast<double>(b[i] - a[i]);
    return std::sqrt(s);
  };
  const Site64 origin{0, 0, 0};
  r.iw_one = ikeda_watanabe_check(dom, sol, law, [](const Site64&, const Site64&) { return 1.0; }, 1.0, 1.0, x0,
                                  records);
  r.iw_far = ikeda_watanabe_check(
      dom, sol, law, [&](const Site64&, const Site64& z) { return len(origin, z) >= 2.0 * n ? 1.0 : 0.0; }, 1.0,
      1.0, x0, records);
  r.iw_jump = ikeda_watanabe_check(
      dom, sol, law, [&](const Site64& y, const Site64& z) { return std::min(len(y, z), 4.0 * n); }, 4.0 * n,
      4.0 * n, x0, records);

  McConfig gc = mc;
  gc.n_paths = cfg.green_paths;
  gc.max_steps = cfg.green_steps;
  const Site e1{1, 0, 0};
  r.green = estimate_green(spec, d, e1, gc);
  const auto verdict = transience_check(spec, d);
  if (!verdict.transient) throw TransienceError(verdict.diagnostic);
  GreenOptions opt;
  opt.radius = std::min(cfg.green_grid_radius(), 8);
  opt.enforce_tail_target = false;
  const auto table = green_series(verdict, spec, w, opt);
  r.green_series_value = table.at(e1);
  r.green_series_bound = table.bound_at(e1);
  return r;
}

json to_json(const McReport& r) {
  auto iw = [](const IkedaWatanabeResult& x) {
    return json{{"lhs", x.lhs},     {"lhs_std_error", x.lhs_std_error}, {"rhs", x.rhs},
                {"truncation_bound", x.truncation_bound}, {"censored", x.censored}, {"valid", x.valid},
                {"within", x.within()}};
  };
  json gates = json::array();
  for (const auto& g : r.gates()) gates.push_back(to_json(g));
  return {{"n", r.n},
          {"paths", r.paths},
          {"censored", r.censored},
          {"exit_time", {{"mean", r.exit_time.mean}, {"std_error", r.exit_time.std_error}, {"eta", r.eta},
                         {"eta_bias_bound", r.eta_bias}}},
          {"exit_law", {{"tv", r.tv}, {"window_mass", r.tv_window_mass}}},
          {"ikeda_watanabe", {{"one", iw(r.iw_one)}, {"far", iw(r.iw_far)}, {"jump", iw(r.iw_jump)}}},
          {"green", {{"mean", r.green.mean}, {"std_error", r.green.std_error},
                     {"truncation_bound", r.green.truncation_bound}, {"n_paths", r.green.n_paths},
                     {"max_steps", r.green.max_steps}, {"series", r.green_series_value},
                     {"series_bound", r.green_series_bound}}},
          {"gates", gates}};
}

}  // namespace subwalk
