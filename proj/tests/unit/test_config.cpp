#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>

#include "subwalk/config.hpp"
#include "subwalk/errors.hpp"

using namespace subwalk;

namespace {

std::string write_tmp(const std::string& name, const std::string& body) {
  std::ofstream(name) << body;
  return name;
}

struct TmpFile {
  std::string path;
  TmpFile(const std::string& name, const std::string& body) : path(write_tmp(name, body)) {}
  ~TmpFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("defaults validate and describe a stable walk") {
  const ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.spec().family() == Family::Stable);
  CHECK(cfg.truncation_M() == 20000);
  CHECK(cfg.green_grid_radius() == 32);
  const auto keys = config_keys();
  CHECK(std::find(keys.begin(), keys.end(), "spec.family") != keys.end());
  CHECK(std::find(keys.begin(), keys.end(), "mc.seed") != keys.end());
  CHECK(config_help().find("[experiment]") != std::string::npos);
}

TEST_CASE("load_config parses all three sections") {
  const TmpFile f("test_config_ok.ini",
                  "# comment\n[spec]\nfamily = stable_mixture\nparams = 1, 0.25, 1, 0.75\n\n"
                  "[experiment]\nd = 3\nn = 4,8\nM_d3 = 500\n\n[mc]\nseed = 7\njobs = 2\n");
  const auto cfg = load_config(f.path);
  CHECK(cfg.family == "stable_mixture");
  CHECK(cfg.params == std::vector<double>{1, 0.25, 1, 0.75});
  CHECK(cfg.d == 3);
  CHECK(cfg.n_list == std::vector<double>{4, 8});
  CHECK(cfg.truncation_M() == 500);
  CHECK(cfg.green_grid_radius() == 16);
  CHECK(cfg.seed == 7);
  CHECK(cfg.jobs == 2);
  CHECK(cfg.spec().family() == Family::StableMixture);
}

TEST_CASE("load_config accepts empty sections and an empty file") {
  const TmpFile a("test_config_empty.ini", "");
  CHECK(load_config(a.path).d == 2);
  const TmpFile b("test_config_sections.ini", "[spec]\n[mc]\n");
  CHECK(load_config(b.path).M == 20000);
}

TEST_CASE("load_config rejects unknown keys, sections and malformed values") {
  const TmpFile a("test_config_key.ini", "[experiment]\nradius = 3\n");
  CHECK_THROWS_WITH_AS(load_config(a.path), doctest::Contains("experiment.radius"), ConfigError);
  const TmpFile b("test_config_section.ini", "[extra]\nd = 3\n");
  CHECK_THROWS_AS(load_config(b.path), ConfigError);
  const TmpFile c("test_config_value.ini", "[experiment]\nd = two\n");
  CHECK_THROWS_WITH_AS(load_config(c.path), doctest::Contains("cannot parse"), ConfigError);
  const TmpFile d("test_config_list.ini", "[experiment]\nn = 8,,16\n");
  CHECK_THROWS_AS(load_config(d.path), ConfigError);
  const TmpFile e("test_config_top.ini", "d = 3\n");
  CHECK_THROWS_AS(load_config(e.path), ConfigError);
  CHECK_THROWS_AS(load_config("no_such_config.ini"), ConfigError);
}

TEST_CASE("validation catches inconsistent settings") {
  const TmpFile a("test_config_alpha.ini", "[spec]\nparams = 1.2\n");
  CHECK_THROWS_WITH_AS(load_config(a.path), doctest::Contains("alpha must lie in (0,1)"), ConfigError);
  const TmpFile b("test_config_b.ini", "[experiment]\nb1 = 0.5\nb2 = 0.25\n");
  CHECK_THROWS_AS(load_config(b.path), ConfigError);
  const TmpFile c("test_config_arity.ini", "[spec]\nfamily = relativistic\nparams = 0.5\n");
  CHECK_THROWS_WITH_AS(load_config(c.path), doctest::Contains("takes 2 values"), ConfigError);
  const TmpFile d("test_config_fam.ini", "[spec]\nfamily = gamma\n");
  CHECK_THROWS_AS(load_config(d.path), ConfigError);
  const TmpFile e("test_config_jobs.ini", "[mc]\njobs = 0\n");
  CHECK_THROWS_AS(load_config(e.path), ConfigError);
}

TEST_CASE("apply_setting overrides single keys") {
  ExperimentConfig cfg;
  apply_setting(cfg, "experiment.b1", "0.05");
  apply_setting(cfg, "mc.exit_paths", "2000");
  apply_setting(cfg, "experiment.n", "6");
  CHECK(cfg.b1 == 0.05);
  CHECK(cfg.exit_paths == 2000);
  CHECK(cfg.n_list == std::vector<double>{6});
  CHECK_THROWS_AS(apply_setting(cfg, "b1", "0.1"), ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "experiment.nope", "0.1"), ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "mc.seed", "-"), ConfigError);
  apply_setting(cfg, "experiment.assign_tail", "false");
  CHECK_FALSE(cfg.assign_tail);
  apply_setting(cfg, "experiment.assign_tail", "True");
  CHECK(cfg.assign_tail);
  CHECK_THROWS_AS(apply_setting(cfg, "experiment.assign_tail", "maybe"), ConfigError);
}

TEST_CASE("config_to_ini round trips exactly") {
  ExperimentConfig cfg;
  cfg.b1 = 1.0 / 13.0;
  cfg.params = {0.3};
  cfg.seed = 18446744073709551615ULL;
  cfg.out = "runs/a";
  cfg.assign_tail = false;
  const TmpFile f("test_config_round.ini", config_to_ini(cfg));
  const auto back = load_config(f.path);
  CHECK(back.b1 == cfg.b1);
  CHECK(back.params == cfg.params);
  CHECK(back.seed == cfg.seed);
  CHECK(back.out == cfg.out);
  CHECK_FALSE(back.assign_tail);
  CHECK(config_to_ini(back) == config_to_ini(cfg));
}
