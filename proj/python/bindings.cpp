#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

#include "subwalk/config.hpp"
#include "subwalk/errors.hpp"
#include "subwalk/experiments.hpp"
#include "subwalk/quadrature.hpp"

namespace py = pybind11;
using namespace subwalk;

namespace {

Site to_site(const std::vector<int>& v) {
  if (v.empty() || v.size() > 3) throw DomainError("site must have 1 to 3 coordinates");
  Site s{0, 0, 0};
  for (std::size_t i = 0; i < v.size(); ++i) s[i] = v[i];
  return s;
}

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
  py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::dict band_dict(const BandReport& b) {
  py::dict d;
  d["claim_id"] = b.claim_id;
  d["n"] = b.n;
  d["band_lo"] = b.band_lo;
  d["band_hi"] = b.band_hi;
  d["ratio"] = b.ratio();
  return d;
}

ExperimentConfig config_from(const py::dict& settings) {
  ExperimentConfig cfg;
  for (const auto& [k, v] : settings) apply_setting(cfg, py::str(k), py::str(v));
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Subordinate random walks on Z^d";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SizingError>(m, "SizingError", PyExc_RuntimeError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<TransienceError>(m, "TransienceError", PyExc_RuntimeError);

  py::class_<BernsteinSpec>(m, "BernsteinSpec")
      .def_static("stable", &BernsteinSpec::stable, py::arg("alpha"))
      .def_static("stable_mixture", &BernsteinSpec::stable_mixture, py::arg("w1"), py::arg("alpha1"),
                  py::arg("w2"), py::arg("alpha2"))
      .def_static("relativistic", &BernsteinSpec::relativistic, py::arg("alpha"), py::arg("theta"))
      .def_property_readonly("params", &BernsteinSpec::params)
      .def("describe", &BernsteinSpec::describe)
      .def("__repr__", &BernsteinSpec::describe);

  m.def("phi", &phi, py::arg("spec"), py::arg("lam"));
  m.def("levy_density", &levy_density, py::arg("spec"), py::arg("t"));
  m.def("g_profile", &g_profile, py::arg("spec"), py::arg("r"), py::arg("d"));
  m.def("j_profile", &j_profile, py::arg("spec"), py::arg("r"), py::arg("d"));
  m.def("builtin_specs", &builtin_specs);
  m.def(
      "estimate_scaling",
      [](const BernsteinSpec& s, int grid) {
        const auto e = estimate_scaling(s, grid);
        py::dict d;
        d["a1"] = e.a1;
        d["gamma1"] = e.gamma1;
        d["a2"] = e.a2;
        d["gamma2"] = e.gamma2;
        d["degenerate"] = e.degenerate;
        return d;
      },
      py::arg("spec"), py::arg("grid_size") = 64);
  m.def("upper_gamma_ratio", &quad::upper_gamma_ratio, py::arg("a"), py::arg("x"));

  m.def(
      "compute_weights",
      [](const BernsteinSpec& s, int M, bool with_integral) {
        const auto w = compute_weights(s, M, with_integral);
        py::dict d;
        d["cm"] = to_array(w.cm);
        d["c_renewal"] = to_array(w.c_renewal);
        d["c_integral"] = w.c_integral ? py::object(to_array(*w.c_integral)) : py::object(py::none());
        d["tail_mass"] = w.tail_mass;
        d["M"] = w.truncation_M;
        return d;
      },
      py::arg("spec"), py::arg("M"), py::arg("with_integral") = false);

  m.def(
      "srw_probability", [](int d, long long m, const std::vector<int>& x) { return srw_probability(d, m, to_site(x)); },
      py::arg("d"), py::arg("m"), py::arg("x"));

  py::class_<StepLaw>(m, "StepLaw")
      .def_readonly("d", &StepLaw::d)
      .def_readonly("radius", &StepLaw::radius)
      .def_readonly("stay_prob", &StepLaw::stay_prob)
      .def_readonly("outside_mass", &StepLaw::outside_mass)
      .def_readonly("tail_mass", &StepLaw::tail_mass)
      .def_readonly("tail_assigned", &StepLaw::tail_assigned)
      .def_readonly("tail_pointwise_bound", &StepLaw::tail_pointwise_bound)
      .def("box_mass", &StepLaw::box_mass)
      .def("at", [](const StepLaw& l, const std::vector<int>& z) { return l.at(to_site(z)); }, py::arg("z"));

  m.def(
      "build_step_law",
      [](const BernsteinSpec& s, int d, int M, int radius, bool tail) {
        const auto w = compute_weights(s, M);
        auto law = build_step_law(w.cm, w.tail_mass, d, radius);
        return tail ? assign_tail(law, s, w.cm) : law;
      },
      py::arg("spec"), py::arg("d"), py::arg("M"), py::arg("radius"), py::arg("assign_tail") = false);
  m.def("step_law_band", [](const StepLaw& l, const BernsteinSpec& s, double r) { return band_dict(step_law_band(l, s, r)); },
        py::arg("law"), py::arg("spec"), py::arg("r_max"));

  m.def(
      "transience_check",
      [](const BernsteinSpec& s, int d) {
        const auto v = transience_check(s, d);
        py::dict r;
        r["transient"] = v.transient;
        r["gamma2"] = v.gamma2;
        r["threshold"] = v.threshold;
        r["integral"] = v.integral;
        r["diagnostic"] = v.diagnostic;
        return r;
      },
      py::arg("spec"), py::arg("d"));

  py::class_<GreenTable>(m, "GreenTable")
      .def_readonly("d", &GreenTable::d)
      .def_readonly("radius", &GreenTable::radius)
      .def_readonly("truncation_M", &GreenTable::truncation_M)
      .def("max_relative_tail", &GreenTable::max_relative_tail)
      .def("at", [](const GreenTable& t, const std::vector<int>& x) { return t.at(to_site(x)); }, py::arg("x"))
      .def("bound_at", [](const GreenTable& t, const std::vector<int>& x) { return t.bound_at(to_site(x)); },
           py::arg("x"));

  m.def(
      "green_series",
      [](const BernsteinSpec& s, int d, int M, int radius) { return run_green(s, d, M, radius, radius).table; },
      py::arg("spec"), py::arg("d"), py::arg("M"), py::arg("radius"));

  py::class_<FiniteDomain>(m, "FiniteDomain")
      .def_static(
          "ball", [](int d, double n) { return FiniteDomain::ball(d, {0, 0, 0}, n); }, py::arg("d"), py::arg("n"))
      .def("__len__", &FiniteDomain::size)
      .def_property_readonly("points",
                             [](const FiniteDomain& dom) {
                               std::vector<std::vector<int>> out;
                               for (const auto& p : dom.points()) out.emplace_back(p.begin(), p.begin() + dom.dim());
                               return out;
                             })
      .def("index_of", [](const FiniteDomain& dom, const std::vector<int>& y) { return dom.index_of(to_site(y)); });

  py::class_<DomainSolution>(m, "DomainSolution")
      .def_readonly("G", &DomainSolution::G)
      .def_readonly("eta", &DomainSolution::eta)
      .def_readonly("residual", &DomainSolution::residual)
      .def_readonly("eta_bias_bound", &DomainSolution::eta_bias_bound);

  m.def("solve_green_ball", [](const FiniteDomain& dom, const StepLaw& law) { return solve_green_ball(dom, law); },
        py::arg("domain"), py::arg("law"));
  m.def(
      "poisson_kernel",
      [](const FiniteDomain& dom, const DomainSolution& sol, const StepLaw& law, const std::vector<int>& x,
         double exterior_radius) {
        const auto idx = dom.index_of(to_site(x));
        if (!idx) throw DomainError("poisson_kernel: x must lie in the domain");
        const auto row = poisson_kernel(dom, sol, law, *idx, exterior_radius);
        py::dict r;
        std::vector<std::vector<int>> z;
        for (const auto& s : row.z) z.emplace_back(s.begin(), s.begin() + dom.dim());
        r["z"] = z;
        r["k"] = to_array(row.k);
        r["captured_mass"] = row.captured_mass;
        r["unassigned_exit"] = row.unassigned_exit;
        return r;
      },
      py::arg("domain"), py::arg("solution"), py::arg("law"), py::arg("x"), py::arg("exterior_radius"));

  m.def(
      "harnack_study",
      [](const py::dict& settings, double a) {
        const auto cfg = config_from(settings);
        const auto study = make_ball_study(cfg);
        const auto h = run_harnack(study, a, {1.5, 2.0, 4.0});
        py::list per;
        for (const auto& rep : h.per_n) {
          std::vector<double> ratios;
          for (const auto& e : rep.entries) ratios.push_back(e.ratio());
          py::dict d;
          d["n"] = rep.n;
          d["ratios"] = ratios;
          per.append(d);
        }
        py::dict r;
        r["per_n"] = per;
        r["variation"] = h.variation;
        return r;
      },
      py::arg("settings") = py::dict(), py::arg("a") = 1.0 / 12.0);

  m.def(
      "exit_time_mc",
      [](const BernsteinSpec& s, int d, double n, long long paths, std::uint64_t seed, int workers) {
        McConfig c;
        c.n_paths = paths;
        c.seed = seed;
        c.worker_count = workers;
        const auto dom = FiniteDomain::ball(d, {0, 0, 0}, n);
        const auto records = run_exits(dom, s, dom.center(), c);
        const auto e = exit_time_estimate(records);
        py::dict r;
        r["mean"] = e.mean;
        r["std_error"] = e.std_error;
        r["censored"] = e.censored;
        return r;
      },
      py::arg("spec"), py::arg("d"), py::arg("n"), py::arg("paths"), py::arg("seed") = 12345, py::arg("workers") = 1);

  m.def(
      "estimate_green",
      [](const BernsteinSpec& s, int d, const std::vector<int>& x, long long paths, long long steps,
         std::uint64_t seed, int workers) {
        McConfig c;
        c.n_paths = paths;
        c.max_steps = steps;
        c.seed = seed;
        c.worker_count = workers;
        const auto g = estimate_green(s, d, to_site(x), c);
        py::dict r;
        r["mean"] = g.mean;
        r["std_error"] = g.std_error;
        r["truncation_bound"] = g.truncation_bound;
        return r;
      },
      py::arg("spec"), py::arg("d"), py::arg("x"), py::arg("paths"), py::arg("steps"), py::arg("seed") = 12345,
      py::arg("workers") = 1);

  m.def(
      "sample_r",
      [](const BernsteinSpec& s, long long count, std::uint64_t seed) {
        LevyRSampler sampler(s);
        Rng rng = worker_rng(seed, 0);
        std::vector<long long> out(static_cast<std::size_t>(count));
        for (auto& v : out) v = sampler(rng);
        return to_array(out);
      },
      py::arg("spec"), py::arg("count"), py::arg("seed") = 12345);

  m.def("config_keys", &config_keys);
  m.def(
      "load_config",
      [](const std::string& path) {
        const auto cfg = load_config(path);
        return config_to_ini(cfg);
      },
      py::arg("path"), "Validated config, returned in canonical INI form.");
}
