#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "subwalk/domain.hpp"
#include "subwalk/errors.hpp"

using namespace subwalk;

namespace {

struct Fixture {
  BernsteinSpec spec = BernsteinSpec::stable(0.5);
  StepLaw law;
  FiniteDomain dom = FiniteDomain::ball(2, {0, 0, 0}, 6.0);
  DomainSolution sol;
  Fixture() {
    const auto w = compute_weights(spec, 4000);
    law = build_step_law(w.cm, w.tail_mass, 2, 40);
    sol = solve_green_ball(dom, law);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST_CASE("ball: lattice point counts with a strict radius") {
  // brute-force enumeration
  CHECK(FiniteDomain::ball(2, {0, 0, 0}, 1.5).size() == 9);
  CHECK(FiniteDomain::ball(1, {0, 0, 0}, 3.0).size() == 5);
  CHECK(FiniteDomain::ball(2, {0, 0, 0}, 10.0).size() == 305);
  CHECK(FiniteDomain::ball(2, {0, 0, 0}, 8.0).size() == 193);
  CHECK(FiniteDomain::ball(3, {0, 0, 0}, 4.0).size() == 251);
  CHECK(FiniteDomain::ball(2, {0, 0, 0}, 1.0).size() == 1);
  const auto b = FiniteDomain::ball(2, {5, -3, 0}, 1.5);
  CHECK(b.contains({6, -2, 0}));
  CHECK_FALSE(b.contains({7, -3, 0}));
  CHECK_THROWS_AS(FiniteDomain::ball(2, {0, 0, 0}, 0.5), DomainError);
  CHECK_THROWS_AS(FiniteDomain::ball(2, {0, 0, 0}, 200.0), SizingError);
}

TEST_CASE("ball: within and annulus partition the points") {
  const auto b = FiniteDomain::ball(2, {0, 0, 0}, 10.0);
  CHECK(b.within(10.0).size() == b.size());
  CHECK(b.within(3.0).size() + b.annulus(3.0, 10.0).size() == b.size());
  for (std::size_t k : b.annulus(3.0, 10.0)) CHECK(norm(b.points()[k]) >= 3.0);
  for (std::size_t k = 0; k < b.size(); ++k) CHECK(b.index_of(b.points()[k]) == k);
}

TEST_CASE("singleton domain: geometric holding time") {
  const auto& f = fixture();
  const auto one = FiniteDomain::ball(2, {0, 0, 0}, 1.0);
  const auto sol = solve_green_ball(one, f.law);
  const double g = 1.0 / (1.0 - f.law.stay_prob);
  CHECK(sol.G(0, 0) == doctest::Approx(g).epsilon(1e-14));
  CHECK(sol.eta(0) == doctest::Approx(g).epsilon(1e-14));
  const auto row = poisson_kernel(one, sol, f.law, 0, 6.0);
  for (std::size_t i = 0; i < row.z.size(); ++i)
    CHECK(row.k[i] == doctest::Approx(f.law.at(row.z[i]) * g).epsilon(1e-13));
}

TEST_CASE("solve: residual, symmetry and eta as row sums") {
  const auto& f = fixture();
  CHECK(f.sol.residual < 1e-10);
  CHECK(f.sol.symmetry_error < 1e-10);
  for (Eigen::Index i = 0; i < f.sol.G.rows(); ++i) {
    CHECK(f.sol.eta(i) == doctest::Approx(f.sol.G.row(i).sum()).epsilon(1e-13));
    CHECK(f.sol.defect(i) > 0.0);
    for (Eigen::Index j = 0; j < f.sol.G.cols(); ++j) CHECK(f.sol.G(i, j) > 0.0);
  }
  CHECK(f.sol.eta_bias_bound >= 0.0);
  CHECK(std::isfinite(f.sol.eta_bias_bound));
}

TEST_CASE("solve: eta peaks at the center and decays outward") {
  const auto& f = fixture();
  const auto c = *f.dom.index_of({0, 0, 0});
  for (int k = 1; k < 6; ++k)
    CHECK(f.sol.eta(static_cast<Eigen::Index>(*f.dom.index_of({k, 0, 0}))) <
          f.sol.eta(static_cast<Eigen::Index>(*f.dom.index_of({k - 1, 0, 0}))));
  CHECK(f.sol.eta.maxCoeff() == f.sol.eta(static_cast<Eigen::Index>(c)));
}

TEST_CASE("generator: A eta = -1 and A G(., x0) = -delta inside the ball") {
  const auto& f = fixture();
  const std::vector<double> eta(f.sol.eta.data(), f.sol.eta.data() + f.sol.eta.size());
  const auto x0 = *f.dom.index_of({2, 1, 0});
  const Eigen::VectorXd col = f.sol.G.col(static_cast<Eigen::Index>(x0));
  const std::vector<double> g(col.data(), col.data() + col.size());
  for (std::size_t k = 0; k < f.dom.size(); ++k) {
    const Site x = f.dom.points()[k];
    const auto a = generator_apply(f.law, DomainFunction{&f.dom, eta, {}}, x);
    CHECK(std::abs(a.value + 1.0) <= a.bound + 1e-9);
    const auto b = generator_apply(f.law, DomainFunction{&f.dom, g, {}}, x);
    CHECK(std::abs(b.value + (k == x0 ? 1.0 : 0.0)) <= b.bound + 1e-9);
  }
}

TEST_CASE("generator: std::function route matches the domain route") {
  const auto& f = fixture();
  const std::vector<double> eta(f.sol.eta.data(), f.sol.eta.data() + f.sol.eta.size());
  auto fn = [&](const Site& y) {
    const auto i = f.dom.index_of(y);
    return i ? eta[*i] : 0.0;
  };
  for (const Site x : {Site{0, 0, 0}, Site{3, 2, 0}, Site{-5, 0, 0}}) {
    const auto a = generator_apply(f.law, fn, x);
    const auto b = generator_apply(f.law, DomainFunction{&f.dom, eta, {}}, x);
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
  }
  CHECK(generator_apply(f.law, [](const Site&) { return 1.0; }, {0, 0, 0}, FarField{1.0, 0.0}).value ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("maximum principle probe") {
  const auto& f = fixture();
  const auto r = maximum_principle_probe(f.law, 300, 7);
  CHECK(r.trials == 300);
  CHECK(r.violations == 0);
  CHECK(r.decisive > 0);
  const auto small = build_step_law(compute_weights(f.spec, 200).cm, 0.0, 2, 6);
  CHECK_THROWS_AS(maximum_principle_probe(small, 10, 1), SizingError);
}

TEST_CASE("poisson kernel: mass accounting and monotone capture") {
  const auto& f = fixture();
  const std::size_t xs[] = {*f.dom.index_of({0, 0, 0}), *f.dom.index_of({4, 0, 0})};
  double prev[2] = {0.0, 0.0};
  for (double ext : {8.0, 12.0, 18.0, 30.0}) {
    const auto rows = poisson_kernel_rows(f.dom, f.sol, f.law, xs, ext);
    for (std::size_t r = 0; r < 2; ++r) {
      double s = 0.0;
      for (double k : rows[r].k) {
        CHECK(k > 0.0);
        s += k;
      }
      CHECK(rows[r].captured_mass == doctest::Approx(s).epsilon(1e-12));
      CHECK(rows[r].captured_mass > prev[r]);
      CHECK(rows[r].captured_mass + rows[r].unassigned_exit <= 1.0 + 1e-9);
      prev[r] = rows[r].captured_mass;
    }
    for (const auto& z : rows[0].z) {
      CHECK(norm(z) >= 6.0);
      CHECK(norm(z) <= ext);
    }
  }
  CHECK_THROWS_AS(poisson_kernel(f.dom, f.sol, f.law, xs[0], 35.0), SizingError);
}

TEST_CASE("poisson kernel: the two extension routes agree") {
  const auto& f = fixture();
  std::vector<std::size_t> xs;
  for (std::size_t k = 0; k < f.dom.size(); k += 7) xs.push_back(k);
  const auto rows = poisson_kernel_rows(f.dom, f.sol, f.law, xs, 12.0);
  const std::vector<std::pair<Site, double>> data{{{7, 0, 0}, 1.0}, {{-6, 3, 0}, 2.5}, {{0, 11, 0}, 0.5}};
  const auto a = harmonic_extend(rows, data);
  const auto b = harmonic_extension_on_domain(f.dom, f.sol, f.law, data);
  for (std::size_t i = 0; i < xs.size(); ++i)
    CHECK(a[i] == doctest::Approx(b(static_cast<Eigen::Index>(xs[i]))).epsilon(1e-12));

  const std::vector<std::pair<Site, double>> far{{{20, 0, 0}, 1.0}};
  CHECK_THROWS_AS(harmonic_extend(rows, far), DomainError);
  const std::vector<std::pair<Site, double>> neg{{{7, 0, 0}, -1.0}};
  CHECK_THROWS_AS(harmonic_extend(rows, neg), DomainError);
  const std::vector<std::pair<Site, double>> inside{{{1, 0, 0}, 1.0}};
  CHECK_THROWS_AS(harmonic_extension_on_domain(f.dom, f.sol, f.law, inside), DomainError);
}

TEST_CASE("harnack ratio is finite and at least one") {
  const auto& f = fixture();
  const std::vector<Site> z0{{7, 0, 0}, {9, 0, 0}, {12, 0, 0}, {0, 24, 0}};
  const auto rep = harnack_ratio(f.dom, f.sol, f.law, 0.5, z0);
  REQUIRE(rep.entries.size() == z0.size());
  for (const auto& e : rep.entries) {
    CHECK(e.ratio() >= 1.0);
    CHECK(e.ratio() < 10.0);
  }
  CHECK_THROWS_AS(harnack_ratio(f.dom, f.sol, f.law, 1.0, z0), DomainError);
}

TEST_CASE("l function is positive and matches the scalar form") {
  const auto& f = fixture();
  const std::vector<Site> zs{{6, 0, 0}, {8, 3, 0}, {20, 0, 0}};
  const auto l = l_function(f.spec, f.dom, f.sol, zs, 1.0 / 6.0);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    CHECK(l[i] > 0.0);
    CHECK(l[i] == doctest::Approx(l_function(f.spec, f.dom, f.sol, zs[i], 1.0 / 6.0)).epsilon(1e-14));
  }
  CHECK(l[2] < l[0]);
}

TEST_CASE("csv writers") {
  const auto& f = fixture();
  std::ostringstream os;
  write_eta_csv(os, f.dom, f.sol);
  CHECK(os.str().rfind("x1,x2,eta\n", 0) == 0);
  const std::size_t xs[] = {0};
  const auto rows = poisson_kernel_rows(f.dom, f.sol, f.law, xs, 8.0);
  std::ostringstream ps;
  write_poisson_csv(ps, 2, rows);
  CHECK(ps.str().size() > 0);
}
