#include "subwalk/config.hpp"

#include <boost/algorithm/string.hpp>
#include <charconv>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <functional>
#include <sstream>
#include <type_traits>

#include "subwalk/errors.hpp"

namespace subwalk {

namespace {

template <class T>
T parse_scalar(const std::string& key, const std::string& raw) {
  if constexpr (std::is_same_v<T, bool>) {
    const auto v = boost::to_lower_copy(boost::trim_copy(raw));
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key " + key + ": cannot parse '" + raw + "'");
  }
  try {
    return boost::lexical_cast<T>(boost::trim_copy(raw));
  } catch (const boost::bad_lexical_cast&) {
    throw ConfigError("config key " + key + ": cannot parse '" + raw + "'");
  }
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
  std::vector<std::string> parts;
  boost::split(parts, raw, boost::is_any_of(","));
  std::vector<double> out;
  for (const auto& p : parts) out.push_back(parse_scalar<double>(key, p));
  return out;
}

template <class T>
std::string show(const T& v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_floating_point_v<T>) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  } else {
    return std::to_string(v);
  }
}

std::string show_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + show(v[i]);
  return s;
}

struct Entry {
  const char* section;
  const char* key;
  const char* help;
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
Entry scalar(const char* section, const char* key, const char* help, T ExperimentConfig::*field) {
  return {section, key, help,
          [field](ExperimentConfig& c, const std::string& k, const std::string& v) { c.*field = parse_scalar<T>(k, v); },
          [field](const ExperimentConfig& c) { return show(c.*field); }};
}

Entry list(const char* section, const char* key, const char* help, std::vector<double> ExperimentConfig::*field) {
  return {section, key, help,
          [field](ExperimentConfig& c, const std::string& k, const std::string& v) { c.*field = parse_list(k, v); },
          [field](const ExperimentConfig& c) { return show_list(c.*field); }};
}

const std::vector<Entry>& entries() {
  using C = ExperimentConfig;
  static const std::vector<Entry> e = {
      {"spec", "family", "stable | stable_mixture | relativistic",
       [](C& c, const std::string&, const std::string& v) { c.family = boost::trim_copy(v); },
       [](const C& c) { return c.family; }},
      list("spec", "params", "alpha | w1,alpha1,w2,alpha2 | alpha,theta", &C::params),
      scalar("experiment", "d", "lattice dimension 1..3", &C::d),
      list("experiment", "n", "ball radii", &C::n_list),
      scalar("experiment", "M", "truncation of c_m and c(m)", &C::M),
      scalar("experiment", "M_d3", "truncation used when d = 3", &C::M_d3),
      scalar("experiment", "eps_tail", "target for the c_m tail mass", &C::eps_tail),
      scalar("experiment", "step_radius", "half-width of the step-law box", &C::step_radius),
      scalar("experiment", "assign_tail", "place the m > M step mass by the local limit lower bound",
             &C::assign_tail),
      scalar("experiment", "green_radius", "half-width of the Green table", &C::green_radius),
      scalar("experiment", "green_radius_d3", "Green table half-width when d = 3", &C::green_radius_d3),
      scalar("experiment", "band_r_max", "outer radius of the profile bands", &C::band_r_max),
      scalar("experiment", "b1", "inner ball fraction", &C::b1),
      scalar("experiment", "b2", "annulus inner fraction", &C::b2),
      scalar("experiment", "a", "comparison ball fraction", &C::a),
      scalar("experiment", "harnack_a", "second Harnack ball fraction", &C::harnack_a),
      scalar("experiment", "exterior_factor", "Poisson kernel window, in units of n", &C::exterior_factor),
      scalar("experiment", "capture_factor", "exit-certainty window, in units of n", &C::capture_factor),
      scalar("experiment", "probe_trials", "maximum-principle probe trials", &C::probe_trials),
      {"experiment", "out", "output directory",
       [](C& c, const std::string&, const std::string& v) { c.out = boost::trim_copy(v); },
       [](const C& c) { return c.out; }},
      scalar("mc", "seed", "master seed", &C::seed),
      scalar("mc", "jobs", "MC worker count", &C::jobs),
      scalar("mc", "exit_paths", "paths for exit statistics", &C::exit_paths),
      scalar("mc", "mc_n", "ball radius for exit statistics", &C::mc_n),
      scalar("mc", "max_steps", "censoring cap per exit path", &C::max_steps),
      scalar("mc", "green_paths", "paths for the Green estimate", &C::green_paths),
      scalar("mc", "green_steps", "steps per Green path", &C::green_steps),
  };
  return e;
}

const Entry* find_entry(const std::string& section, const std::string& key) {
  for (const auto& e : entries())
    if (section == e.section && key == e.key) return &e;
  return nullptr;
}

}  // namespace

BernsteinSpec ExperimentConfig::spec() const {
  auto need = [&](std::size_t k) {
    if (params.size() != k)
      throw ConfigError("spec.params: family " + family + " takes " + std::to_string(k) + " values, got " +
                        std::to_string(params.size()));
  };
  try {
    if (family == "stable") {
      need(1);
      return BernsteinSpec::stable(params[0]);
    }
    if (family == "stable_mixture") {
      need(4);
      return BernsteinSpec::stable_mixture(params[0], params[1], params[2], params[3]);
    }
    if (family == "relativistic") {
      need(2);
      return BernsteinSpec::relativistic(params[0], params[1]);
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("spec: ") + e.what());
  }
  throw ConfigError("spec.family: unknown family '" + family + "'");
}

void ExperimentConfig::validate() const {
  (void)spec();
  if (d < 1 || d > 3) throw ConfigError("experiment.d must be 1, 2 or 3");
  if (n_list.empty()) throw ConfigError("experiment.n must list at least one radius");
  for (double n : n_list)
    if (!(n > 0.0)) throw ConfigError("experiment.n: radii must be positive");
  if (M < 64 || M_d3 < 64) throw ConfigError("experiment.M and experiment.M_d3 must be at least 64");
  if (step_radius < 1 || green_radius < 1 || green_radius_d3 < 1)
    throw ConfigError("experiment: radii must be at least 1");
  if (!(b1 > 0.0 && b1 < b2 && b2 < 1.0)) throw ConfigError("experiment: need 0 < b1 < b2 < 1");
  if (!(a > 0.0 && a < 1.0) || !(harnack_a > 0.0 && harnack_a < 1.0))
    throw ConfigError("experiment: a and harnack_a must lie in (0,1)");
  if (!(exterior_factor > 1.0) || !(capture_factor > 1.0))
    throw ConfigError("experiment: exterior_factor and capture_factor must exceed 1");
  if (jobs < 1) throw ConfigError("mc.jobs must be at least 1");
  if (exit_paths < 1 || green_paths < 2 || max_steps < 1 || green_steps < 1)
    throw ConfigError("mc: path and step counts must be positive");
}

void apply_setting(ExperimentConfig& cfg, const std::string& dotted_key, const std::string& value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos) throw ConfigError("setting '" + dotted_key + "' must be section.key");
  const Entry* e = find_entry(dotted_key.substr(0, dot), dotted_key.substr(dot + 1));
  if (!e) throw ConfigError("unknown config key '" + dotted_key + "'");
  e->set(cfg, dotted_key, value);
}

ExperimentConfig load_config(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("config: key '" + section + "' outside any section");
    for (const auto& [key, node] : body) apply_setting(cfg, section + "." + key, node.data());
  }
  cfg.validate();
  return cfg;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& e : entries()) out.push_back(std::string(e.section) + "." + e.key);
  return out;
}

std::string config_help() {
  const ExperimentConfig def;
  std::ostringstream os;
  std::string section;
  for (const auto& e : entries()) {
    if (section != e.section) {
      section = e.section;
      os << "[" << section << "]\n";
    }
    os << "  " << e.key << " = " << e.get(def) << "    " << e.help << "\n";
  }
  return os.str();
}

std::string config_to_ini(const ExperimentConfig& cfg) {
  std::ostringstream os;
  std::string section;
  for (const auto& e : entries()) {
    if (section != e.section) {
      if (!section.empty()) os << "\n";
      section = e.section;
      os << "[" << section << "]\n";
    }
    os << e.key << " = " << e.get(cfg) << "\n";
  }
  return os.str();
}

}  // namespace subwalk
