#include "subwalk/green.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>

#include "subwalk/errors.hpp"
#include "subwalk/quadrature.hpp"

namespace subwalk {

double transience_integral(const BernsteinSpec& spec, int d, double delta, double* error) {
  if (d < 1 || d > 3) throw DomainError("dimension must be 1, 2 or 3");
  // theta_i = delta v_i^5 on the positive orthant; the substitution flattens the origin singularity
  constexpr double kPow = 5.0;
  auto jac = [&](double v) { return delta * kPow * std::pow(v, kPow - 1.0); };
  auto th = [&](double v) { return delta * std::pow(v, kPow); };
  auto integrand = [&](double s2sum) { return 1.0 / phi(spec, s2sum / d); };
  auto hav = [](double t) {
    const double s = std::sin(0.5 * t);
    return 2.0 * s * s;
  };
  constexpr double tol = 1e-9;
  double err_acc = 0.0;
  double value = 0.0;
  if (d == 1) {
    auto r = quad::integrate([&](double v) { return integrand(hav(th(v))) * jac(v); }, 0.0, 1.0, tol);
    value = r.value;
    err_acc = r.error;
  } else if (d == 2) {
    auto r = quad::integrate(
        [&](double v1) {
          const double h1 = hav(th(v1));
          auto in = quad::integrate([&](double v2) { return integrand(h1 + hav(th(v2))) * jac(v2); }, 0.0, 1.0,
                                    tol);
          err_acc += in.error * jac(v1);
          return in.value * jac(v1);
        },
        0.0, 1.0, tol);
    value = r.value;
    err_acc = r.error;
  } else {
    auto r = quad::integrate(
        [&](double v1) {
          const double h1 = hav(th(v1));
          auto mid = quad::integrate(
              [&](double v2) {
                const double h2 = h1 + hav(th(v2));
                auto in = quad::integrate([&](double v3) { return integrand(h2 + hav(th(v3))) * jac(v3); }, 0.0,
                                          1.0, 1e-7);
                return in.value * jac(v2);
              },
              0.0, 1.0, 1e-7);
          return mid.value * jac(v1);
        },
        0.0, 1.0, 1e-7);
    value = r.value;
    err_acc = r.error;
  }
  const double sym = std::pow(2.0, d);
  if (error) *error = sym * err_acc;
  return sym * value;
}

TransienceVerdict transience_check(const BernsteinSpec& spec, int d, const ScalingEstimate& est) {
  TransienceVerdict v;
  v.d = d;
  v.gamma2 = est.gamma2;
  v.threshold = d / 2.0;
  v.transient = est.gamma2 < v.threshold - 1e-9;
  if (v.transient) {
    v.integral = transience_integral(spec, d, v.delta, &v.integral_error);
    v.diagnostic = "gamma2 = " + std::to_string(est.gamma2) + " < d/2 = " + std::to_string(v.threshold) +
                   ": transient";
  } else {
    v.integral = std::numeric_limits<double>::quiet_NaN();
    v.diagnostic = "gamma2 = " + std::to_string(est.gamma2) + " >= d/2 = " + std::to_string(v.threshold) +
                   ": transience not established, Green function computations refused";
  }
  return v;
}

TransienceVerdict transience_check(const BernsteinSpec& spec, int d) {
  return transience_check(spec, d, estimate_scaling(spec, 64));
}

double GreenTable::max_relative_tail() const {
  double w = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) w = std::max(w, tail_bound[i] / values[i]);
  return w;
}

namespace {

// sum_{m > M, m = parity mod 2 (or all m when step == 1)} f(m): explicit to 8M, then Euler-Maclaurin.
struct TailSum {
  double value = 0.0;
  double em_term = 0.0;
};

template <class F>
TailSum tail_sum(F&& f, long long M, int parity, int step) {
  long long m = M + 1;
  if (step == 2 && ((m - parity) & 1)) ++m;
  const long long m_end = 8 * M + 16;
  long double s = 0.0L;
  for (; m <= m_end; m += step) s += f(static_cast<double>(m));
  const double a = static_cast<double>(m);
  // integral on the log axis; the integrand decays polynomially
  auto r = quad::integrate([&](double u) {
    const double t = a * std::exp(u);
    return f(t) * t;
  }, std::vector<double>{0.0, 2.0, 10.0, 40.0, 140.0}, 1e-12);
  const double h = step;
  const double dh = a * 1e-4;
  const double fp = (f(a + dh) - f(a - dh)) / (2.0 * dh);
  const double em = -(h / 12.0) * fp;
  TailSum out;
  out.value = static_cast<double>(s) + r.value / h + 0.5 * f(a) + em;
  out.em_term = em;
  return out;
}

}  // namespace

GreenTable green_series(const TransienceVerdict& verdict, const BernsteinSpec& spec,
                        const SubordinationWeights& weights, const GreenOptions& opt) {
  if (!verdict.transient) throw TransienceError(verdict.diagnostic);
  const int d = verdict.d;
  const int M = weights.truncation_M;
  if (M < 64) throw DomainError("green_series: truncation M too small for a tail estimate");
  const auto& c = weights.c_renewal;

  GreenTable t;
  t.d = d;
  t.radius = opt.radius;
  t.truncation_M = M;
  t.grid = OrthantGrid(d, opt.radius);
  t.values = weighted_kernel_sum(d, c, opt.radius);
  t.tail_correction.assign(t.grid.size(), 0.0);
  t.tail_bound.assign(t.grid.size(), 0.0);

  t.kappa = c[M] * M * phi(spec, 1.0 / M);
  for (int m = M / 2; m <= M; ++m)
    t.kappa_drift = std::max(t.kappa_drift, std::abs(c[m] * m * phi(spec, 1.0 / m) / t.kappa - 1.0));
  auto c_model = [&](double m) { return t.kappa / (m * phi(spec, 1.0 / m)); };

  if (!opt.tail_correction) {
    const double csup = kernel_sup_constant(d);
    auto f = [&](double m) { return (1.0 + t.kappa_drift) * c_model(m) * csup * std::pow(m, -d / 2.0); };
    const double b = tail_sum(f, M, 0, 1).value;
    std::fill(t.tail_bound.begin(), t.tail_bound.end(), b);
  } else {
    t.lclt_constant = lclt_error_constant(d, M / 2, M, std::min(opt.radius, 16), 16);
    const double dd = d;
    std::map<long long, std::array<double, 3>> cache;  // |x|^2 -> {T, S_E, em}
    for (std::size_t idx = 0; idx < t.grid.size(); ++idx) {
      const Site x = t.grid.site(idx);
      const long long r2 = norm2(x);
      auto it = cache.find(r2);
      if (it == cache.end()) {
        const int parity = static_cast<int>(r2 & 1);
        auto fq = [&](double m) { return c_model(m) * lclt_density(d, m, x); };
        auto fe = [&](double m) { return c_model(m) * t.lclt_constant * std::pow(m, -(dd + 2.0) / 2.0); };
        const TailSum tq = tail_sum(fq, M, parity, 2);
        const TailSum te = tail_sum(fe, M, parity, 2);
        it = cache.emplace(r2, std::array<double, 3>{tq.value, te.value, std::abs(tq.em_term)}).first;
      }
      const auto [T, SE, em] = it->second;
      t.tail_correction[idx] = T;
      t.values[idx] += T;
      t.tail_bound[idx] = SE * (1.0 + t.kappa_drift) + t.kappa_drift * T + em;
    }
  }
  if (opt.enforce_tail_target && t.max_relative_tail() > opt.max_relative_tail)
    throw NumericError("green_series: relative tail bound " + std::to_string(t.max_relative_tail()) +
                       " exceeds target " + std::to_string(opt.max_relative_tail) +
                       "; increase the truncation M");
  return t;
}

BandReport green_band(const GreenTable& table, const BernsteinSpec& spec, double r_max) {
  BandReport b;
  b.claim_id = "green_vs_g";
  for (std::size_t idx = 0; idx < table.grid.size(); ++idx) {
    const double r = norm(table.grid.site(idx));
    if (r < 1.0 || r > r_max) continue;
    b.include(table.values[idx] / g_profile(spec, r, table.d), r);
  }
  return b;
}

void write_green_csv(std::ostream& os, const GreenTable& table, const BernsteinSpec& spec) {
  static const char* names[3] = {"x1", "x2", "x3"};
  for (int i = 0; i < table.d; ++i) os << names[i] << ',';
  os << "G,G_over_g,tail_bound\n" << std::setprecision(17);
  const int R = table.radius;
  const int r1 = table.d >= 2 ? R : 0, r2 = table.d >= 3 ? R : 0;
  for (int a = -R; a <= R; ++a)
    for (int b = -r1; b <= r1; ++b)
      for (int c = -r2; c <= r2; ++c) {
        const Site x{a, b, c};
        for (int i = 0; i < table.d; ++i) os << x[i] << ',';
        os << table.at(x) << ',';
        if (norm2(x) != 0) os << table.at(x) / g_profile(spec, norm(x), table.d);
        os << ',' << table.bound_at(x) << "\n";
      }
}

}  // namespace subwalk
