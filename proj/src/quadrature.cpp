#include "subwalk/quadrature.hpp"

#include "subwalk/errors.hpp"

namespace subwalk::quad {

Result power_exp_integral(double e, double beta, double t_lo, long double log_prefactor) {
  if (!(t_lo > 0.0) || !(beta > 0.0)) throw DomainError("power_exp_integral: need t_lo > 0, beta > 0");
  Result r;
  if (e > 1.0 && e / beta > t_lo) {
    // v = log(t/t*), t* = e/beta: t^e e^{-beta t} dt = t*^(e+1) e^{-e} exp(e (v - expm1 v) + v) dv
    const long double ls = std::log(static_cast<long double>(e) / beta);
    const long double K = log_prefactor + e * ls - e + ls;
    const double w = 1.0 / std::sqrt(e);
    const double v_lo = std::log(t_lo) - static_cast<double>(ls);
    const double v_hi = std::max(60.0 * w, 1e-3) + 60.0 / e;
    auto h = [&](double v) { return std::exp(e * (v - std::expm1(v)) + v); };
    std::vector<double> pts{v_lo, v_hi};
    for (double k : {-8.0, -2.0, 0.0, 2.0, 8.0, 20.0})
      if (k * w > v_lo && k * w < v_hi) pts.push_back(k * w);
    r = integrate(h, pts, 1e-13, 0.0, 20000);
    const double scale = static_cast<double>(std::exp(K));
    r.value *= scale;
    r.error *= scale;
  } else {
    const double t_hi = t_lo + (40.0 * std::sqrt(std::max(e, 1.0)) + 60.0) / beta;
    const double lp = static_cast<double>(log_prefactor);
    auto log_f = [&](double t) { return lp + e * std::log(t) - beta * t; };
    r = integrate_log_axis(log_f, {t_lo, t_lo + 1.0 / beta, t_hi}, 1e-13, 0.0, 20000);
  }
  return r;
}

double upper_gamma_ratio(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) throw DomainError("upper_gamma_ratio: need a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  auto r = power_exp_integral(a - 1.0, 1.0, x, -std::lgamma(static_cast<long double>(a)));
  if (!r.converged) throw NumericError("upper_gamma_ratio: quadrature did not converge");
  return r.value;
}

}  // namespace subwalk::quad
