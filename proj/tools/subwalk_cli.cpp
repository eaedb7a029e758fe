#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <optional>

#include "subwalk/config.hpp"
#include "subwalk/errors.hpp"
#include "subwalk/experiments.hpp"

namespace fs = std::filesystem;
using namespace subwalk;

namespace {

struct Run {
  ExperimentConfig cfg;
  json report = json::object();
  std::vector<Gate> gates;
  std::unique_ptr<BallStudy> study;

  fs::path out(const std::string& name) const { return fs::path(cfg.out) / name; }

  std::ofstream open(const std::string& name) const {
    std::ofstream os(out(name));
    if (!os) throw std::runtime_error("cannot write " + out(name).string());
    return os;
  }

  void gate(const std::string& id, bool pass, const std::string& detail) { gates.push_back({id, pass, detail}); }

  const BallStudy& ball() {
    if (!study) study = std::make_unique<BallStudy>(make_ball_study(cfg));
    return *study;
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void cmd_weights(Run& r) {
  const auto spec = r.cfg.spec();
  const auto rep = run_weights(spec, r.cfg.truncation_M());
  auto os = r.open("weights.csv");
  write_weights_csv(os, rep.weights);
  r.report["weights"] = {{"spec", spec.describe()},
                         {"M", rep.weights.truncation_M},
                         {"tail_mass", rep.weights.tail_mass},
                         {"cm_band", to_json(rep.cm_band)},
                         {"renewal_band", to_json(rep.renewal_band)}};
  r.gate("cm_asymptotic_band", rep.cm_band.ratio() <= gates::kAsymptoticBand, "ratio " + fmt(rep.cm_band.ratio()));
  r.gate("renewal_asymptotic_band", rep.renewal_band.ratio() <= gates::kAsymptoticBand,
         "ratio " + fmt(rep.renewal_band.ratio()));
  r.gate("cm_tail_mass", rep.weights.tail_mass < r.cfg.eps_tail,
         "tail " + fmt(rep.weights.tail_mass) + " vs eps_tail " + fmt(r.cfg.eps_tail));
}

void cmd_steplaw(Run& r) {
  const auto spec = r.cfg.spec();
  const auto rep =
      run_steplaw(spec, r.cfg.d, r.cfg.truncation_M(), r.cfg.step_radius, r.cfg.band_r_max, r.cfg.assign_tail);
  auto os = r.open("steplaw.csv");
  write_step_law_csv(os, rep.law, spec, static_cast<int>(r.cfg.band_r_max));
  r.report["steplaw"] = {{"d", r.cfg.d},
                         {"radius", rep.law.radius},
                         {"stay_prob", rep.law.stay_prob},
                         {"outside_mass", rep.law.outside_mass},
                         {"tail_mass", rep.law.tail_mass},
                         {"tail_assigned", rep.law.tail_assigned},
                         {"tail_pointwise_bound", rep.law.tail_pointwise_bound},
                         {"total_mass", rep.total_mass},
                         {"band", to_json(rep.band)}};
  r.gate("step_law_band", rep.band.ratio() <= gates::kStepBand, "ratio " + fmt(rep.band.ratio()));
  r.gate("step_law_mass", std::abs(rep.total_mass - 1.0) <= gates::kStepMassTol,
         "total " + fmt(rep.total_mass));
}

void cmd_green(Run& r) {
  const auto spec = r.cfg.spec();
  const auto verdict = transience_check(spec, r.cfg.d);
  json v = {{"transient", verdict.transient},
            {"gamma2", verdict.gamma2},
            {"threshold", verdict.threshold},
            {"diagnostic", verdict.diagnostic}};
  if (!verdict.transient) {
    r.report["green"] = {{"verdict", v}};
    r.gate("transience", false, verdict.diagnostic);
    return;
  }
  v["integral"] = verdict.integral;
  const auto rep = run_green(spec, r.cfg.d, r.cfg.truncation_M(), r.cfg.green_grid_radius(), r.cfg.band_r_max);
  auto os = r.open("green.csv");
  write_green_csv(os, rep.table, spec);
  r.report["green"] = {{"verdict", v},
                       {"M", rep.table.truncation_M},
                       {"G0", rep.table.at({0, 0, 0})},
                       {"max_relative_tail", rep.table.max_relative_tail()},
                       {"lclt_constant", rep.table.lclt_constant},
                       {"band", to_json(rep.band)}};
  r.gate("green_band", rep.band.ratio() <= gates::kGreenBand, "ratio " + fmt(rep.band.ratio()));
  r.gate("green_tail", rep.table.max_relative_tail() < gates::kGreenRelTail,
         "max relative tail " + fmt(rep.table.max_relative_tail()));
}

void cmd_ball(Run& r) {
  const auto& st = r.ball();
  json runs = json::array();
  for (const auto& run : st.runs) {
    const std::string tag = "_n" + fmt(run.n);
    auto eo = r.open("eta" + tag + ".csv");
    write_eta_csv(eo, run.domain, run.sol);
    auto go = r.open("ball_green" + tag + ".csv");
    const auto X = run.domain.within(st.b1 * run.n);
    write_ball_green_csv(go, run.domain, run.sol, X);
    runs.push_back({{"n", run.n},
                    {"size", run.domain.size()},
                    {"residual", run.sol.residual},
                    {"symmetry_error", run.sol.symmetry_error},
                    {"eta_center", run.sol.eta(static_cast<Eigen::Index>(run.domain.index_of({0, 0, 0}).value()))},
                    {"eta_bias_bound", run.sol.eta_bias_bound},
                    {"entry_bias_bound", run.sol.entry_bias_bound}});
  }
  const auto eta = exit_time_bands(st);
  const auto cor = ball_green_bands(st);
  json j = {{"runs", runs}, {"exit_time", to_json(eta)}, {"ball_green", to_json(cor)}};
  const int gr = r.cfg.green_grid_radius();
  const double need = 2.0 * st.a * st.runs.back().n;
  if (gr >= need) {
    const auto whole = run_green(st.spec, st.d, r.cfg.truncation_M(), gr, r.cfg.band_r_max);
    const auto cmp = whole_space_comparison(st, whole.table);
    j["ball_vs_whole_space"] = to_json(cmp.band);
    j["monotonicity_violations"] = cmp.violations;
    r.gate("domain_monotonicity", cmp.violations == 0, fmt(static_cast<double>(cmp.violations)) + " violations");
  } else {
    j["ball_vs_whole_space"] = "skipped: green_radius below the comparison diameter";
  }
  const auto id = run_identities(st, r.cfg.probe_trials, r.cfg.seed);
  j["identities"] = {{"eta_generator_excess", id.eta_generator_excess},
                     {"harmonic_excess", id.harmonic_excess},
                     {"residual", id.residual},
                     {"probe", {{"trials", id.probe.trials},
                                {"decisive", id.probe.decisive},
                                {"violations", id.probe.violations}}}};
  r.report["ball"] = j;
  r.gate("exit_time_cross_n", eta.max_ratio() <= gates::kExitTimeCross && eta.variation() <= gates::kExitTimeCross,
         "max ratio " + fmt(eta.max_ratio()) + ", variation " + fmt(eta.variation()));
  r.gate("ball_green_band", cor.max_ratio() <= gates::kBallGreenBand && cor.variation() <= gates::kCrossVariation,
         "max ratio " + fmt(cor.max_ratio()) + ", variation " + fmt(cor.variation()));
  r.gate("exact_identities", id.pass(),
         "residual " + fmt(id.residual) + ", probe violations " + std::to_string(id.probe.violations));
}

void cmd_poisson(Run& r) {
  const auto& st = r.ball();
  const auto ps = run_poisson(st, r.cfg.exterior_factor, r.cfg.capture_factor);
  json caps = json::array();
  bool captured_ok = true;
  std::string captured;
  for (std::size_t i = 0; i < st.runs.size(); ++i) {
    auto os = r.open("poisson_n" + fmt(st.runs[i].n) + ".csv");
    write_poisson_csv(os, st.d, ps.rows[i]);
    const double wide = ps.captured_at_wide[i];
    caps.push_back({{"n", st.runs[i].n}, {"captured_window", ps.captured_mass[i]}, {"captured_wide", wide}});
    captured_ok = captured_ok && wide >= gates::kCapturedMass;
    captured += (i ? ", " : "") + fmt(wide);
  }
  r.report["poisson"] = {{"band", to_json(ps.band)}, {"captured", caps}};
  r.gate("poisson_band", ps.band.max_ratio() <= gates::kPoissonBand && ps.band.variation() <= gates::kCrossVariation,
         "max ratio " + fmt(ps.band.max_ratio()) + ", variation " + fmt(ps.band.variation()));
  r.gate("captured_mass", captured_ok, "captured mass at capture_factor n: " + captured);
}

void cmd_harnack(Run& r) {
  const auto& st = r.ball();
  const std::vector<double> factors{1.5, 2.0, 4.0};
  auto dump = [&](const HarnackStudy& h) {
    json per = json::array();
    for (const auto& rep : h.per_n) {
      json ratios = json::array();
      for (const auto& e : rep.entries) ratios.push_back({{"z0", e.z0[0]}, {"sup", e.sup}, {"inf", e.inf},
                                                          {"ratio", e.ratio()}});
      per.push_back({{"n", rep.n}, {"a", rep.a}, {"ratios", ratios}, {"max_ratio", rep.max_ratio}});
    }
    return json{{"per_n", per}, {"variation", h.variation}, {"max_variation", h.max_variation()}};
  };
  const auto inner = run_harnack(st, st.b1, factors);
  const auto outer = run_harnack(st, r.cfg.harnack_a, factors);
  r.report["harnack"] = {{"factors", factors}, {"at_b1", dump(inner)}, {"at_harnack_a", dump(outer)}};
  r.gate("harnack_scale_invariance", inner.max_variation() <= gates::kHarnackVariation,
         "variation " + fmt(inner.max_variation()));
}

void cmd_mc(Run& r) {
  const auto rep = run_mc(r.cfg);
  r.report["mc"] = to_json(rep);
  for (const auto& g : rep.gates()) r.gates.push_back(g);
}

int finish(Run& r, const std::string& name) {
  json gates = json::array();
  bool ok = true;
  for (const auto& g : r.gates) {
    gates.push_back(to_json(g));
    ok = ok && g.pass;
  }
  r.report["config"] = config_to_ini(r.cfg);
  r.report["gates"] = gates;
  r.report["pass"] = ok;
  auto os = r.open(name + ".json");
  os << r.report.dump(2) << "\n";
  for (const auto& g : r.gates)
    std::cout << (g.pass ? "PASS " : "FAIL ") << g.claim_id << ": " << g.detail << "\n";
  if (!ok) {
    std::cerr << "failing claims:";
    for (const auto& g : r.gates)
      if (!g.pass) std::cerr << " " << g.claim_id;
    std::cerr << "\n";
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subordinate random walks on Z^d: weights, step laws, Green functions, balls, Harnack ratios"};
  app.require_subcommand(1);
  app.fallthrough();
  app.footer("Config file keys (defaults):\n" + config_help());

  std::string config_path, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs, d, M;
  std::optional<double> alpha;
  std::optional<std::string> family, params, n_list;
  std::vector<std::string> settings;
  app.add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
  app.add_option("--out", out, "output directory (experiment.out)");
  app.add_option("--seed", seed, "master seed (mc.seed)");
  app.add_option("--jobs", jobs, "MC workers (mc.jobs)");
  app.add_option("--family", family, "spec.family");
  app.add_option("--params", params, "spec.params, comma separated");
  app.add_option("--alpha", alpha, "shorthand for --family stable --params <alpha>");
  app.add_option("--d", d, "experiment.d");
  app.add_option("--M", M, "experiment.M (and M_d3)");
  app.add_option("--n", n_list, "experiment.n, comma separated");
  app.add_option("--set", settings, "section.key=value, repeatable");

  struct Sub {
    const char* name;
    const char* help;
    void (*fn)(Run&);
  };
  const Sub subs[] = {
      {"weights", "c_m and c(m) tables with their asymptotic bands", cmd_weights},
      {"steplaw", "one-step law of X and its jump-profile band", cmd_steplaw},
      {"green", "transience verdict, whole-space Green table and its band", cmd_green},
      {"ball", "exit times, ball Green function and exact identities across n", cmd_ball},
      {"poisson", "Poisson kernel rows, K/l band and captured mass", cmd_poisson},
      {"harnack", "Harnack ratios across n", cmd_harnack},
      {"mc", "Monte Carlo oracle comparisons", cmd_mc},
  };
  std::string chosen;
  for (const auto& s : subs) app.add_subcommand(s.name, s.help)->callback([&chosen, &s] { chosen = s.name; });
  app.add_subcommand("all", "every subcommand, one combined report")->callback([&chosen] { chosen = "all"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Run run;
  try {
    if (!config_path.empty()) run.cfg = load_config(config_path);
    for (const auto& s : settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + s + "'");
      apply_setting(run.cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    if (family) apply_setting(run.cfg, "spec.family", *family);
    if (params) apply_setting(run.cfg, "spec.params", *params);
    if (alpha) {
      run.cfg.family = "stable";
      run.cfg.params = {*alpha};
    }
    if (d) run.cfg.d = *d;
    if (M) run.cfg.M = run.cfg.M_d3 = *M;
    if (n_list) apply_setting(run.cfg, "experiment.n", *n_list);
    if (!out.empty()) run.cfg.out = out;
    if (seed) run.cfg.seed = *seed;
    if (jobs) run.cfg.jobs = *jobs;
    run.cfg.validate();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    fs::create_directories(run.cfg.out);
    if (chosen == "all") {
      for (const auto& s : subs) {
        std::cerr << "[" << s.name << "]\n";
        try {
          s.fn(run);
        } catch (const TransienceError& e) {
          run.gate(std::string(s.name) + "_transience", false, e.what());
        }
      }
      return finish(run, "report");
    }
    for (const auto& s : subs)
      if (chosen == s.name) s.fn(run);
    return finish(run, chosen);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
