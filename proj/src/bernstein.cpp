#include "subwalk/bernstein.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "subwalk/errors.hpp"
#include "subwalk/quadrature.hpp"

namespace subwalk {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("alpha must lie in (0,1), got " + std::to_string(alpha));
}

// (lambda + theta)^alpha - theta^alpha without cancellation for small lambda/theta.
double shifted_power(double lambda, double alpha, double theta) {
  if (theta == 0.0) return std::pow(lambda, alpha);
  return std::pow(theta, alpha) * std::expm1(alpha * std::log1p(lambda / theta));
}

double levy_coefficient(double alpha) { return alpha / std::tgamma(1.0 - alpha); }

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

BernsteinSpec BernsteinSpec::stable(double alpha) {
  check_alpha(alpha);
  BernsteinSpec s;
  s.family_ = Family::Stable;
  s.norm_ = 1.0;
  s.alphas_ = {alpha};
  s.params_ = {alpha};
  s.components_ = {{1.0, alpha, 0.0}};
  return s;
}

BernsteinSpec BernsteinSpec::stable_mixture(double w1, double alpha1, double w2, double alpha2) {
  check_alpha(alpha1);
  check_alpha(alpha2);
  if (!(w1 > 0.0) || !(w2 > 0.0) || !std::isfinite(w1) || !std::isfinite(w2))
    throw DomainError("mixture weights must be positive and finite");
  BernsteinSpec s;
  s.family_ = Family::StableMixture;
  s.norm_ = w1 + w2;
  s.alphas_ = {alpha1, alpha2};
  s.params_ = {w1, alpha1, w2, alpha2};
  s.components_ = {{w1 / s.norm_, alpha1, 0.0}, {w2 / s.norm_, alpha2, 0.0}};
  return s;
}

BernsteinSpec BernsteinSpec::relativistic(double alpha, double theta) {
  check_alpha(alpha);
  if (!(theta > 0.0) || theta > 10.0)
    throw DomainError("relativistic theta must lie in (0,10], got " + std::to_string(theta));
  BernsteinSpec s;
  s.family_ = Family::Relativistic;
  s.norm_ = shifted_power(1.0, alpha, theta);
  s.alphas_ = {alpha};
  s.params_ = {alpha, theta};
  s.components_ = {{1.0 / s.norm_, alpha, theta}};
  return s;
}

std::string BernsteinSpec::describe() const {
  switch (family_) {
    case Family::Stable:
      return "stable(alpha=" + fmt_num(params_[0]) + ")";
    case Family::StableMixture:
      return "mixture(w1=" + fmt_num(params_[0]) + ",alpha1=" + fmt_num(params_[1]) +
             ",w2=" + fmt_num(params_[2]) + ",alpha2=" + fmt_num(params_[3]) + ")";
    case Family::Relativistic:
      return "relativistic(alpha=" + fmt_num(params_[0]) + ",theta=" + fmt_num(params_[1]) + ")";
  }
  return "unknown";
}

double phi(const BernsteinSpec& spec, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("phi: lambda must be positive");
  double v = 0.0;
  for (const auto& c : spec.components()) v += c.weight * shifted_power(lambda, c.alpha, c.theta);
  return v;
}

double levy_density(const BernsteinSpec& spec, double t) {
  if (!(t > 0.0)) throw DomainError("levy_density: t must be positive");
  double v = 0.0;
  for (const auto& c : spec.components())
    v += c.weight * levy_coefficient(c.alpha) * std::pow(t, -1.0 - c.alpha) * std::exp(-c.theta * t);
  return v;
}

std::optional<double> potential_density(const BernsteinSpec& spec, double t) {
  if (!(t > 0.0)) throw DomainError("potential_density: t must be positive");
  if (spec.family() != Family::Stable) return std::nullopt;
  const double a = spec.alpha_params()[0];
  return std::pow(t, a - 1.0) / std::tgamma(a);
}

double phi_by_quadrature(const BernsteinSpec& spec, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("phi: lambda must be positive");
  constexpr double t_lo = 1e-80, t_hi = 1e80;
  double total = 0.0;
  for (const auto& c : spec.components()) {
    const double k = c.weight * levy_coefficient(c.alpha);
    auto log_f = [&](double t) {
      return std::log(-std::expm1(-lambda * t)) + std::log(k) - (1.0 + c.alpha) * std::log(t) -
             c.theta * t;
    };
    std::vector<double> pts{t_lo};
    for (double t = 1e-70; t < t_hi; t *= 1e10) pts.push_back(t);
    pts.push_back(1.0 / lambda);
    pts.push_back(t_hi);
    auto r = quad::integrate_log_axis(log_f, pts, 1e-13);
    total += r.value;
    // head: 1 - e^{-lambda t} ~ lambda t below t_lo
    total += k * lambda * std::pow(t_lo, 1.0 - c.alpha) / (1.0 - c.alpha);
    if (c.theta == 0.0) total += k * std::pow(t_hi, -c.alpha) / c.alpha;
  }
  return total;
}

std::optional<double> potential_laplace_by_quadrature(const BernsteinSpec& spec, double lambda) {
  if (spec.family() != Family::Stable) return std::nullopt;
  const double a = spec.alpha_params()[0];
  constexpr double t_lo = 1e-80;
  auto log_f = [&](double t) { return -lambda * t + (a - 1.0) * std::log(t) - std::lgamma(a); };
  std::vector<double> pts{t_lo};
  for (double t = 1e-70; t < 1e3 / lambda; t *= 1e10) pts.push_back(t);
  pts.push_back(1.0 / lambda);
  pts.push_back(800.0 / lambda);
  auto r = quad::integrate_log_axis(log_f, pts, 1e-13);
  return r.value + std::pow(t_lo, a) / (a * std::tgamma(a));
}

ScalingEstimate estimate_scaling(const BernsteinSpec& spec, int grid_size, double decades) {
  if (grid_size < 16) throw DomainError("estimate_scaling: grid_size must be at least 16");
  std::vector<double> lr(grid_size), lp(grid_size);
  for (int i = 0; i < grid_size; ++i) {
    lr[i] = -decades * std::log(10.0) * (1.0 - static_cast<double>(i) / (grid_size - 1));
    lp[i] = std::log(phi(spec, std::exp(lr[i])));
  }
  ScalingEstimate est;
  est.gamma1 = std::numeric_limits<double>::infinity();
  est.gamma2 = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_size; ++i)
    for (int j = i + 1; j < grid_size; ++j) {
      const double s = (lp[j] - lp[i]) / (lr[j] - lr[i]);
      est.gamma1 = std::min(est.gamma1, s);
      est.gamma2 = std::max(est.gamma2, s);
    }
  est.a1 = 1.0;
  est.a2 = 1.0;
  for (int i = 0; i < grid_size; ++i)
    for (int j = i + 1; j < grid_size; ++j) {
      const double lratio = lp[j] - lp[i], lscale = lr[j] - lr[i];
      est.a1 = std::min(est.a1, std::exp(lratio - est.gamma1 * lscale));
      est.a2 = std::max(est.a2, std::exp(lratio - est.gamma2 * lscale));
    }
  est.degenerate = !(est.gamma1 < 1.0) || !(est.gamma1 > 0.0);
  est.r_min = std::exp(lr[0]);
  return est;
}

int ratio_bound_violations(const BernsteinSpec& spec, int grid_size) {
  int bad = 0;
  for (int i = 0; i < grid_size; ++i) {
    const double t = std::pow(10.0, -6.0 + 12.0 * i / (grid_size - 1));
    const double pt = phi(spec, t);
    for (int j = 0; j < grid_size; ++j) {
      const double lam = std::pow(10.0, -6.0 + 12.0 * j / (grid_size - 1));
      const double q = phi(spec, lam * t) / pt;
      const double tol = 1e-12 * std::max(1.0, lam);
      if (q < std::min(1.0, lam) - tol || q > std::max(1.0, lam) + tol) ++bad;
    }
  }
  return bad;
}

double g_profile(const BernsteinSpec& spec, double r, int d) {
  if (!(r > 0.0)) throw DomainError("g: r must be positive");
  return 1.0 / (std::pow(r, d) * phi(spec, 1.0 / (r * r)));
}

double j_profile(const BernsteinSpec& spec, double r, int d) {
  if (!(r > 0.0)) throw DomainError("j: r must be positive");
  return std::pow(r, -d) * phi(spec, 1.0 / (r * r));
}

std::vector<BernsteinSpec> builtin_specs() {
  return {BernsteinSpec::stable(0.25), BernsteinSpec::stable(0.5), BernsteinSpec::stable(0.75),
          BernsteinSpec::stable_mixture(1.0, 0.25, 1.0, 0.75)};
}

}  // namespace subwalk
