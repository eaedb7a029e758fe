#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "subwalk/errors.hpp"
#include "subwalk/mc.hpp"
#include "subwalk/subordination.hpp"

using namespace subwalk;

namespace {

// |observed frequency - p| within k binomial standard errors
bool within_sigmas(long long hits, long long n, double p, double k = 4.0) {
  const double f = static_cast<double>(hits) / static_cast<double>(n);
  return std::abs(f - p) <= k * std::sqrt(p * (1 - p) / static_cast<double>(n));
}

}  // namespace

TEST_CASE("worker_rng: reproducible per worker, distinct across workers") {
  Rng a = worker_rng(42, 0), b = worker_rng(42, 0), c = worker_rng(42, 1), e = worker_rng(43, 0);
  bool differ_c = false, differ_e = false;
  for (int i = 0; i < 16; ++i) {
    const auto va = a(), vb = b(), vc = c(), ve = e();
    CHECK(va == vb);
    differ_c |= va != vc;
    differ_e |= va != ve;
  }
  CHECK(differ_c);
  CHECK(differ_e);
}

TEST_CASE("LevyRSampler: frequencies match c_m") {
  for (const auto& spec : {BernsteinSpec::stable(0.5), BernsteinSpec::stable_mixture(1.0, 0.25, 1.0, 0.75),
                           BernsteinSpec::stable(0.25)}) {
    const auto cm = compute_cm(spec, 8);
    LevyRSampler s(spec);
    Rng rng = worker_rng(7, 0);
    const long long N = 100000;
    std::map<long long, long long> hist;
    for (long long i = 0; i < N; ++i) {
      const long long r = s(rng);
      REQUIRE(r >= 1);
      ++hist[r];
    }
    for (int m = 1; m <= 8; ++m) {
      CAPTURE(m);
      CHECK(within_sigmas(hist[m], N, cm[m]));
    }
  }
  LevyRSampler s(BernsteinSpec::stable(0.5));
  Rng rng = worker_rng(1, 0);
  for (int i = 0; i < 1000; ++i) CHECK(s.sample_time(rng) > 0.0);
}

TEST_CASE("LevyRSampler: heavy tail reaches far beyond any table") {
  LevyRSampler s(BernsteinSpec::stable(0.25));
  Rng rng = worker_rng(3, 0);
  long long big = 0;
  const long long N = 20000;
  for (long long i = 0; i < N; ++i) big += s(rng) > 1000000;
  // P(R > N) = Gamma(N + 3/4)/(Gamma(3/4) N!), mpmath at N = 1e6
  CHECK(within_sigmas(big, N, 0.0258057308778583));
}

TEST_CASE("TableRSampler: frequencies match the normalized table") {
  const std::vector<double> cm{0.0, 0.5, 0.25, 0.125};
  TableRSampler s(cm);
  Rng rng = worker_rng(11, 0);
  const long long N = 50000;
  long long h[4] = {0, 0, 0, 0};
  for (long long i = 0; i < N; ++i) {
    const long long r = s(rng);
    REQUIRE(r >= 1);
    REQUIRE(r <= 3);
    ++h[r];
  }
  CHECK(within_sigmas(h[1], N, 4.0 / 7.0));
  CHECK(within_sigmas(h[2], N, 2.0 / 7.0));
  CHECK(within_sigmas(h[3], N, 1.0 / 7.0));
}

TEST_CASE("sample_srw_block: parity, support and second moment") {
  Rng rng = worker_rng(5, 0);
  for (int d = 1; d <= 3; ++d) {
    for (long long m : {1LL, 2LL, 7LL, 100LL}) {
      for (int i = 0; i < 200; ++i) {
        const auto z = sample_srw_block(d, m, rng);
        const long long l1 = std::llabs(z[0]) + std::llabs(z[1]) + std::llabs(z[2]);
        CHECK(l1 <= m);
        CHECK((m + l1) % 2 == 0);
        for (int k = d; k < 3; ++k) CHECK(z[k] == 0);
      }
    }
    const long long m = 1000000;
    const int N = 20000;
    double s = 0.0;
    for (int i = 0; i < N; ++i) {
      const auto z = sample_srw_block(d, m, rng);
      s += (static_cast<double>(z[0]) * z[0] + static_cast<double>(z[1]) * z[1] + static_cast<double>(z[2]) * z[2]) / m;
    }
    // |Z_m|^2/m has mean 1 and variance 2/d
    CHECK(std::abs(s / N - 1.0) <= 4.0 * std::sqrt(2.0 / d / N));
  }
  const auto huge = sample_srw_block(2, 4000000000000000000LL, rng);
  CHECK((std::llabs(huge[0]) + std::llabs(huge[1])) % 2 == 0);
}

TEST_CASE("simulate_exit: singleton domain holds for a geometric time") {
  const auto spec = BernsteinSpec::stable(0.5);
  const auto w = compute_weights(spec, 20000);
  const auto law = build_step_law(w.cm, w.tail_mass, 2, 4);
  const auto one = FiniteDomain::ball(2, {0, 0, 0}, 1.0);
  McConfig c;
  c.n_paths = 100000;
  const auto rec = run_exits(one, spec, {0, 0, 0}, c);
  const auto est = exit_time_estimate(rec);
  CHECK(est.censored == 0);
  CHECK(est.samples == c.n_paths);
  // stay probability is sum_m c_m p(m, 0); the truncated value is within the tail mass
  const double mean = 1.0 / (1.0 - law.stay_prob);
  CHECK(std::abs(est.mean - mean) <= 4.0 * est.std_error + mean * mean * law.tail_pointwise_bound);
  for (const auto& r : rec) {
    CHECK(r.pre_exit == Site64{0, 0, 0});
    CHECK((r.exit[0] != 0 || r.exit[1] != 0));
  }
}

TEST_CASE("run_exits: deterministic for a fixed seed and worker count") {
  const auto spec = BernsteinSpec::stable(0.5);
  const auto dom = FiniteDomain::ball(2, {0, 0, 0}, 4.0);
  McConfig c;
  c.n_paths = 2000;
  c.worker_count = 2;
  const auto a = run_exits(dom, spec, {0, 0, 0}, c);
  const auto b = run_exits(dom, spec, {0, 0, 0}, c);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].exit == b[i].exit);
    CHECK(a[i].steps == b[i].steps);
  }
  c.seed = 99;
  const auto other = run_exits(dom, spec, {0, 0, 0}, c);
  long long same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i].steps == other[i].steps && a[i].exit == other[i].exit;
  CHECK(same < static_cast<long long>(a.size()) / 2);
}

TEST_CASE("exit time, exit law and Ikeda-Watanabe on a small ball") {
  const auto spec = BernsteinSpec::stable(0.5);
  const auto w = compute_weights(spec, 20000);
  const auto law = build_step_law(w.cm, w.tail_mass, 2, 24);
  const auto dom = FiniteDomain::ball(2, {0, 0, 0}, 4.0);
  const auto sol = solve_green_ball(dom, law);
  McConfig c;
  c.n_paths = 200000;
  const auto rec = run_exits(dom, spec, {0, 0, 0}, c);
  const auto est = exit_time_estimate(rec);
  const auto x = *dom.index_of({0, 0, 0});
  const double eta = sol.eta(static_cast<Eigen::Index>(x));
  CHECK(std::abs(est.mean - eta) <= 3.0 * est.std_error + sol.eta_bias_bound);

  const auto row = poisson_kernel(dom, sol, law, x, 8.0);
  CHECK(exit_law_tv(rec, row) < 0.02);

  const auto one = ikeda_watanabe_check(dom, sol, law, [](const Site64&, const Site64&) { return 1.0; }, 1.0, 1.0, x,
                                        rec);
  CHECK(one.lhs == 1.0);
  CHECK(one.valid);
  CHECK(one.within());

  auto far = [](const Site64&, const Site64& z) {
    return static_cast<double>(z[0]) * z[0] + static_cast<double>(z[1]) * z[1] >= 64.0 ? 1.0 : 0.0;
  };
  const auto r = ikeda_watanabe_check(dom, sol, law, far, 1.0, 1.0, x, rec);
  CHECK(r.valid);
  CHECK(r.within());
  CHECK(r.truncation_bound < 0.01);
}

TEST_CASE("Ikeda-Watanabe: heavy censoring invalidates the check") {
  const auto spec = BernsteinSpec::stable(0.5);
  const auto w = compute_weights(spec, 2000);
  const auto law = build_step_law(w.cm, w.tail_mass, 2, 24);
  const auto dom = FiniteDomain::ball(2, {0, 0, 0}, 4.0);
  const auto sol = solve_green_ball(dom, law);
  McConfig c;
  c.n_paths = 2000;
  c.max_steps = 1;
  const auto rec = run_exits(dom, spec, {0, 0, 0}, c);
  const auto r = ikeda_watanabe_check(dom, sol, law, [](const Site64&, const Site64&) { return 1.0; }, 1.0, 1.0,
                                      *dom.index_of({0, 0, 0}), rec);
  CHECK(r.censored > 0);
  CHECK_FALSE(r.valid);
  CHECK_FALSE(r.within());
}

TEST_CASE("green_truncation_bound: positive and decreasing in the horizon") {
  const auto spec = BernsteinSpec::stable(0.5);
  double prev = std::numeric_limits<double>::infinity();
  for (long long N : {10LL, 100LL, 1000LL, 10000LL}) {
    const double b = green_truncation_bound(spec, 2, N);
    CHECK(b > 0.0);
    CHECK(b < prev);
    prev = b;
  }
  CHECK(green_truncation_bound(BernsteinSpec::stable(0.5), 3, 1000) < green_truncation_bound(spec, 2, 1000));
}

TEST_CASE("estimate_green: origin counts the starting visit") {
  const auto spec = BernsteinSpec::stable(0.5);
  McConfig c;
  c.n_paths = 4000;
  c.max_steps = 200;
  const auto g0 = estimate_green(spec, 2, {0, 0, 0}, c);
  CHECK(g0.mean >= 1.0);
  CHECK(g0.n_paths == 4000);
  // series value 1.28576 lies within sampling error plus the horizon bound
  CHECK(std::abs(g0.mean - 1.28576449061277) <= 4.0 * g0.std_error + g0.truncation_bound);
  const auto g1 = estimate_green(spec, 2, {1, 0, 0}, c);
  CHECK(g1.mean < g0.mean);
}
