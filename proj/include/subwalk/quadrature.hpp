#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace subwalk::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

namespace detail {

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

// Kronrod nodes are ascending from 0; the Gauss nodes sit at the even indices.
template <class F>
Segment gk15(F& f, double a, double b) {
  using K = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  const auto& xk = K::abscissa();
  const auto& wk = K::weights();
  const auto& wg = G::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * wk[0];
  double gauss = fc * wg[0];
  for (std::size_t j = 1; j < xk.size(); ++j) {
    const double dx = h * xk[j];
    const double s = f(c - dx) + f(c + dx);
    kron += wk[j] * s;
    if (j % 2 == 0) gauss += wg[j / 2] * s;
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod (7/15) on [a, b] with optional interior breakpoints.
template <class F>
Result integrate(F&& f, std::vector<double> points, double rel_tol = 1e-12,
                 double abs_tol = 0.0, int max_intervals = 4000) {
  std::sort(points.begin(), points.end());
  std::priority_queue<detail::Segment> heap;
  double total = 0.0, err = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] > points[i])) continue;
    auto s = detail::gk15(f, points[i], points[i + 1]);
    total += s.value;
    err += s.error;
    heap.push(s);
  }
  int count = static_cast<int>(heap.size());
  while (!heap.empty() && err > std::max(abs_tol, rel_tol * std::abs(total)) &&
         count < max_intervals) {
    auto s = heap.top();
    heap.pop();
    const double mid = 0.5 * (s.a + s.b);
    auto l = detail::gk15(f, s.a, mid);
    auto r = detail::gk15(f, mid, s.b);
    total += l.value + r.value - s.value;
    err += l.error + r.error - s.error;
    heap.push(l);
    heap.push(r);
    ++count;
  }
  double v = 0.0, e = 0.0;
  while (!heap.empty()) {
    v += heap.top().value;
    e += heap.top().error;
    heap.pop();
  }
  return {v, e, count, e <= std::max(abs_tol, rel_tol * std::abs(v))};
}

template <class F>
Result integrate(F&& f, double a, double b, double rel_tol = 1e-12,
                 double abs_tol = 0.0, int max_intervals = 4000) {
  return integrate(std::forward<F>(f), std::vector<double>{a, b}, rel_tol, abs_tol,
                   max_intervals);
}

// Integral over t in [t_lo, t_hi] computed on s = log t; log_f returns log of the integrand.
template <class LogF>
Result integrate_log_axis(LogF&& log_f, std::vector<double> t_points,
                          double rel_tol = 1e-12, double abs_tol = 0.0,
                          int max_intervals = 4000) {
  std::vector<double> s_points;
  s_points.reserve(t_points.size());
  for (double t : t_points) s_points.push_back(std::log(t));
  auto g = [&](double s) { return std::exp(log_f(std::exp(s)) + s); };
  return integrate(g, std::move(s_points), rel_tol, abs_tol, max_intervals);
}

// exp(log_prefactor) * int_{t_lo}^inf t^e exp(-beta t) dt, centred at the peak so that
// large exponents keep full relative accuracy.
Result power_exp_integral(double e, double beta, double t_lo, long double log_prefactor);

// Upper regularized incomplete gamma Q(a, x) = Gamma(a, x)/Gamma(a) by log-axis quadrature.
double upper_gamma_ratio(double a, double x);

}  // namespace subwalk::quad
