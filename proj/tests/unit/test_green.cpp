#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "subwalk/errors.hpp"
#include "subwalk/green.hpp"

using namespace subwalk;

namespace {

struct Fixture {
  BernsteinSpec spec = BernsteinSpec::stable(0.5);
  SubordinationWeights w = compute_weights(spec, 20000);
  GreenTable table;
  Fixture() {
    GreenOptions opt;
    opt.radius = 32;
    table = green_series(transience_check(spec, 2), spec, w, opt);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST_CASE("transience verdicts") {
  CHECK(transience_check(BernsteinSpec::stable(0.5), 2).transient);
  CHECK(transience_check(BernsteinSpec::stable(0.25), 1).transient);
  CHECK(transience_check(BernsteinSpec::stable(0.75), 3).transient);
  const auto v = transience_check(BernsteinSpec::stable(0.75), 1);
  CHECK_FALSE(v.transient);
  CHECK_FALSE(v.diagnostic.empty());
  CHECK_FALSE(transience_check(BernsteinSpec::stable(0.5), 1).transient);
  const auto t = transience_check(BernsteinSpec::stable(0.5), 2);
  CHECK(t.threshold == 1.0);
  CHECK(std::isfinite(t.integral));
  CHECK(t.integral > 0.0);
}

TEST_CASE("green_series refuses recurrent walks") {
  const auto s = BernsteinSpec::stable(0.75);
  const auto w = compute_weights(s, 200);
  CHECK_THROWS_AS(green_series(transience_check(s, 1), s, w, GreenOptions{}), TransienceError);
}

TEST_CASE("green_series: whole-space values against Fourier inversion") {
  const auto& t = fixture().table;
  // scipy nquad, each within 1.2e-6
  const struct {
    Site x;
    double g;
  } ref[] = {{{0, 0, 0}, 1.28576449061277},
             {{1, 0, 0}, 0.327673091924888},
             {{1, 1, 0}, 0.21013942761125},
             {{3, 4, 0}, 0.0632565457644518}};
  for (const auto& r : ref) {
    CAPTURE(r.g);
    CHECK(std::abs(t.at(r.x) - r.g) <= t.bound_at(r.x) + 2e-6);
  }
}

TEST_CASE("green_series: tail bound is small and symmetric values") {
  const auto& t = fixture().table;
  CHECK(t.max_relative_tail() < 1e-4);
  for (int a = 0; a <= 10; ++a)
    for (int b = 0; b <= 10; ++b) CHECK(t.at({a, b, 0}) == doctest::Approx(t.at({b, a, 0})).epsilon(1e-13));
}

TEST_CASE("green_series: decreasing along the axes") {
  const auto& t = fixture().table;
  for (int k = 0; k < t.radius; ++k) {
    CHECK(t.at({k + 1, 0, 0}) < t.at({k, 0, 0}));
    CHECK(t.at({k + 1, k + 1, 0}) < t.at({k, k, 0}));
  }
}

TEST_CASE("green_series: harmonic off the origin") {
  const auto& f = fixture();
  const auto law = build_step_law(f.w.cm, f.w.tail_mass, 2, 24);
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= a; ++b) {
      const Site x{a, b, 0};
      double s = 0.0, bound = 0.0;
      for (std::size_t idx = 0; idx < law.grid.size(); ++idx) {
        const Site u = law.grid.site(idx);
        for (int sa : {1, -1})
          for (int sb : {1, -1}) {
            if ((sa < 0 && u[0] == 0) || (sb < 0 && u[1] == 0)) continue;
            const Site y = x + Site{sa * u[0], sb * u[1], 0};
            s += law.probs[idx] * f.table.at(y);
            bound += law.probs[idx] * f.table.bound_at(y);
          }
      }
      // unassigned mass lands at |y| >= 20, where G <= G(14, 14)
      bound += law.unassigned_mass() * f.table.at({14, 14, 0}) + f.table.bound_at(x);
      const double AG = s - f.table.at(x);
      CAPTURE(a);
      CAPTURE(b);
      if (a == 0 && b == 0)
        CHECK(std::abs(AG + 1.0) <= bound);
      else
        CHECK(std::abs(AG) <= bound);
      CHECK(bound < 2e-3);
    }
}

TEST_CASE("green_series: comparable to g") {
  const auto& f = fixture();
  const auto band = green_band(f.table, f.spec, 16.0);
  CHECK(band.band_lo > 0.0);
  CHECK(band.ratio() <= 10.0);
}

TEST_CASE("green_series: transient d = 3 and d = 1") {
  for (const auto& [a, d] : {std::pair{0.5, 3}, std::pair{0.25, 1}}) {
    const auto s = BernsteinSpec::stable(a);
    const auto w = compute_weights(s, 4000);
    GreenOptions opt;
    opt.radius = 8;
    opt.enforce_tail_target = false;
    const auto t = green_series(transience_check(s, d), s, w, opt);
    CHECK(t.at({0, 0, 0}) >= 1.0);
    CHECK(t.at({1, 0, 0}) < t.at({0, 0, 0}));
    CHECK(green_band(t, s, 8.0).ratio() <= 10.0);
  }
}

TEST_CASE("green_series: refuses a tail above the target") {
  const auto s = BernsteinSpec::stable(0.5);
  const auto w = compute_weights(s, 100);
  GreenOptions opt;
  opt.radius = 8;
  opt.max_relative_tail = 1e-12;
  CHECK_THROWS_AS(green_series(transience_check(s, 2), s, w, opt), NumericError);
  CHECK_THROWS_AS(green_series(transience_check(s, 2), s, compute_weights(s, 10), opt), DomainError);
}

TEST_CASE("green csv header") {
  const auto& f = fixture();
  std::ostringstream os;
  write_green_csv(os, f.table, f.spec);
  CHECK(os.str().rfind("x1,x2,", 0) == 0);
}
