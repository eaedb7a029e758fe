#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "subwalk/errors.hpp"
#include "subwalk/lattice.hpp"

using namespace subwalk;

TEST_CASE("srw_probability: small exact values") {
  CHECK(srw_probability(1, 1, {1, 0, 0}) == 0.5);
  CHECK(srw_probability(1, 1, {-1, 0, 0}) == 0.5);
  CHECK(srw_probability(1, 2, {0, 0, 0}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(srw_probability(1, 2, {2, 0, 0}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(srw_probability(1, 2, {-2, 0, 0}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(srw_probability(2, 2, {0, 0, 0}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(srw_probability(3, 0, {0, 0, 0}) == 1.0);
  CHECK(srw_probability(3, 0, {1, 0, 0}) == 0.0);
}

TEST_CASE("srw_probability: exact path counts") {
  // exact rational dynamic programming
  CHECK(srw_probability(2, 10, {2, 2, 0}) == doctest::Approx(945.0 / 32768.0).epsilon(1e-13));
  CHECK(srw_probability(3, 6, {1, 1, 0}) == doctest::Approx(25.0 / 972.0).epsilon(1e-13));
  CHECK(srw_probability(3, 9, {2, 1, 0}) == doctest::Approx(1477.0 / 139968.0).epsilon(1e-13));
  CHECK(srw_probability(1, 200, {0, 0, 0}) == doctest::Approx(0.056348479009256422).epsilon(1e-12));
}

TEST_CASE("srw_probability: parity, support and symmetry") {
  for (int d = 1; d <= 3; ++d)
    for (int m = 0; m <= 12; ++m)
      for (int a = -4; a <= 4; ++a)
        for (int b = (d > 1 ? -3 : 0); b <= (d > 1 ? 3 : 0); ++b) {
          const Site x{a, b, d > 2 ? 1 : 0};
          const double p = srw_probability(d, m, x);
          if (!parity_matches(m, x) || l1_norm(x) > m) CHECK(p == 0.0);
          CHECK(p == srw_probability(d, m, Site{-a, -b, d > 2 ? -1 : 0}));
          if (d > 1) CHECK(p == doctest::Approx(srw_probability(d, m, Site{b, a, x[2]})).epsilon(1e-14));
        }
}

TEST_CASE("srw_probability: Chapman-Kolmogorov") {
  for (int d = 1; d <= 3; ++d) {
    const int m1 = 5, m2 = 7;
    for (const Site x : {Site{0, 0, 0}, Site{1, 0, 0}, Site{2, 1, 0}}) {
      double s = 0.0;
      for (const auto& y : ball_sites(d, m1 + 0.5)) s += srw_probability(d, m1, y) * srw_probability(d, m2, x - y);
      CHECK(s == doctest::Approx(srw_probability(d, m1 + m2, x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("srw_probability: local limit ratio at m = 200") {
  const double ratio = srw_probability(1, 200, {0, 0, 0}) / lclt_density(1, 200, {0, 0, 0});
  CHECK(ratio == doctest::Approx(0.99875078612625182).epsilon(1e-11));
  CHECK(ratio > 0.9);
  CHECK(ratio < 1.1);
}

TEST_CASE("KernelSlab: matches the closed form and conserves mass") {
  for (int d = 1; d <= 3; ++d) {
    const int m_max = d == 3 ? 16 : 40;
    const auto slab = KernelSlab::build(d, m_max);
    const auto& g = slab.grid();
    for (int m = 0; m <= m_max; ++m) {
      double mass = 0.0;
      for (std::size_t idx = 0; idx < g.size(); ++idx) {
        const Site x = g.site(idx);
        const double p = slab(m, x);
        CHECK(p == doctest::Approx(srw_probability(d, m, x)).epsilon(1e-11));
        mass += p * g.multiplicity(idx);
      }
      CHECK(slab.lost_mass(m) == 0.0);
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("KernelSlab: narrow window loses mass through its edge") {
  const auto slab = KernelSlab::build(2, 30, 6);
  const auto& g = slab.grid();
  for (int m = 0; m <= 30; ++m) {
    double mass = 0.0;
    for (std::size_t idx = 0; idx < g.size(); ++idx) mass += slab.row(m)[idx] * g.multiplicity(idx);
    CHECK(mass + slab.lost_mass(m) == doctest::Approx(1.0).epsilon(1e-12));
    if (m <= 6) CHECK(slab.lost_mass(m) == 0.0);
  }
  CHECK(slab.lost_mass(30) > 0.0);
  CHECK(slab(30, {7, 0, 0}) == 0.0);
}

TEST_CASE("KernelSlab: sizing and argument errors") {
  CHECK_THROWS_AS(KernelSlab::build(3, 1000, 1000, std::size_t{1} << 20), SizingError);
  CHECK_THROWS_AS(KernelSlab::build(2, 0), DomainError);
  CHECK_THROWS_AS(KernelSlab::build(4, 10), DomainError);
  const auto slab = KernelSlab::build(1, 4);
  CHECK_THROWS_AS(slab(5, {0, 0, 0}), DomainError);
}

TEST_CASE("KernelSlab: save and load round trip") {
  const auto slab = KernelSlab::build(2, 20, 10);
  const std::string path = "test_lattice_slab.bin";
  slab.save(path);
  const auto back = KernelSlab::load(path);
  std::remove(path.c_str());
  CHECK(back.dim() == 2);
  CHECK(back.m_max() == 20);
  CHECK(back.window_radius() == 10);
  for (int m = 0; m <= 20; ++m) {
    CHECK(back.lost_mass(m) == slab.lost_mass(m));
    for (std::size_t idx = 0; idx < slab.grid().size(); ++idx) CHECK(back.row(m)[idx] == slab.row(m)[idx]);
  }
  CHECK_THROWS(KernelSlab::load("does_not_exist.bin"));
}

TEST_CASE("weighted_kernel_sum agrees with termwise closed form") {
  std::vector<double> w{0.0, 0.5, 0.125, 0.0625, 0.0390625};
  const auto s = weighted_kernel_sum(2, w, 3);
  const OrthantGrid g(2, 3);
  REQUIRE(s.size() == g.size());
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    double ref = 0.0;
    for (std::size_t m = 0; m < w.size(); ++m) ref += w[m] * srw_probability(2, static_cast<long long>(m), g.site(idx));
    CHECK(s[idx] == doctest::Approx(ref).epsilon(1e-13));
  }
}

TEST_CASE("char_function: values and quadratic bound") {
  const std::vector<double> zero{0.0, 0.0};
  CHECK(char_function(zero) == 1.0);
  const std::vector<double> corner{std::numbers::pi, std::numbers::pi};
  CHECK(char_function(corner) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK_THROWS_AS(char_function(std::span<const double>{}), DomainError);
  for (int d = 1; d <= 3; ++d)
    for (int k = 0; k < 200; ++k) {
      std::vector<double> th(d);
      double n2 = 0.0;
      for (int i = 0; i < d; ++i) {
        th[i] = std::numbers::pi * std::sin(0.37 * k + 1.3 * i);
        n2 += th[i] * th[i];
      }
      CHECK(char_function(th) <= 1.0 - n2 / (std::numbers::pi * std::numbers::pi * d) + 1e-15);
    }
}

TEST_CASE("gaussian_bound_check: no violations in d = 1") {
  const auto slab = KernelSlab::build(1, 64);
  const auto r = gaussian_bound_check(slab);
  CHECK(r.upper_violations == 0);
  CHECK(r.lower_violations == 0);
  CHECK(r.parity_violations == 0);
  CHECK(r.c_prime > 0.0);
  CHECK(r.c7_at_060 > 0.0);
  CHECK(r.c8_odd > 0.0);
}

TEST_CASE("gaussian_bound_check: no violations in d = 2") {
  const auto slab = KernelSlab::build(2, 40);
  const auto r = gaussian_bound_check(slab);
  CHECK(r.upper_violations == 0);
  CHECK(r.lower_violations == 0);
  CHECK(r.parity_violations == 0);
}

TEST_CASE("kernel_sup_constant approaches the local limit value from below") {
  for (int d = 1; d <= 3; ++d) {
    const double lim = 2.0 * std::pow(d / (2.0 * std::numbers::pi), d / 2.0);
    const double c = kernel_sup_constant(d);
    CHECK(c >= lim);
    CHECK(c < 2.0 * lim);
  }
}

TEST_CASE("ball_sites and OrthantGrid bookkeeping") {
  CHECK(ball_sites(1, 3.0).size() == 7);
  CHECK(ball_sites(2, 1.0).size() == 5);
  const OrthantGrid g(3, 4);
  CHECK(g.size() == 125);
  long total = 0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    CHECK(g.index(g.site(idx)) == idx);
    total += g.multiplicity(idx);
  }
  CHECK(total == 9 * 9 * 9);
  CHECK(g.index({-2, 3, -1}) == g.index({2, 3, 1}));
  CHECK_THROWS_AS(OrthantGrid(0, 3), DomainError);
}
