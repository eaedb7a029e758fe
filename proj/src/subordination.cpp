#include "subwalk/subordination.hpp"

#include <array>
#include <cmath>
#include <iomanip>
#include <unordered_map>
#include <utility>

#include "subwalk/errors.hpp"
#include "subwalk/quadrature.hpp"

namespace subwalk {

namespace {

// (coef/m!) int_0^inf t^(m+p) e^{-beta t} dt, with m + p > -1.
// [0,1] by the exponential series, [1,inf) by adaptive quadrature on log t.
double poisson_moment(int m, double coef, double p, double beta) {
  const double q = m + p + 1.0;  // exponent of t after integrating t^(m+p)
  const long double lfact = std::lgamma(static_cast<long double>(m) + 1.0L);

  long double head = 0.0L, term = 1.0L;
  for (int k = 0; k < 400; ++k) {
    if (k > 0) term *= -static_cast<long double>(beta) / k;
    const long double add = term / (q + k);
    head += add;
    if (k > 2 * beta + 5 && std::fabs(add) < 1e-21L * std::fabs(head)) break;
  }
  const double head_val = static_cast<double>(static_cast<long double>(coef) * head / std::exp(lfact));

  auto r = quad::power_exp_integral(m + p, beta, 1.0, std::log(static_cast<long double>(coef)) - lfact);
  if (!r.converged)
    throw NumericError("poisson moment quadrature did not converge at m=" + std::to_string(m) +
                       " (estimate " + std::to_string(r.value) + ", error " + std::to_string(r.error) + ")");
  return head_val + r.value;
}

long double long_sum(std::span<const double> v, std::size_t from) {
  long double s = 0.0L;
  for (std::size_t i = from; i < v.size(); ++i) s += v[i];
  return s;
}

}  // namespace

std::vector<double> compute_cm(const BernsteinSpec& spec, int M) {
  if (M < 1) throw DomainError("compute_cm: M must be at least 1");
  std::vector<double> cm(static_cast<std::size_t>(M) + 1, 0.0);
  for (int m = 1; m <= M; ++m) {
    double v = 0.0;
    for (const auto& c : spec.components()) {
      const double coef = c.weight * c.alpha / std::tgamma(1.0 - c.alpha);
      v += poisson_moment(m, coef, -1.0 - c.alpha, 1.0 + c.theta);
    }
    cm[m] = v;
  }
  return cm;
}

std::vector<double> compute_c_renewal(std::span<const double> cm, int M) {
  if (static_cast<int>(cm.size()) <= M) throw DomainError("compute_c_renewal: cm shorter than M");
  std::vector<double> c(static_cast<std::size_t>(M) + 1, 0.0);
  c[0] = 1.0;
  for (int m = 1; m <= M; ++m) {
    double s = 0.0;
    for (int k = 1; k <= m; ++k) s += cm[k] * c[m - k];
    c[m] = s;
  }
  return c;
}

std::optional<std::vector<double>> compute_c_integral(const BernsteinSpec& spec, int M) {
  if (spec.family() != Family::Stable) return std::nullopt;
  const double a = spec.alpha_params()[0];
  std::vector<double> c(static_cast<std::size_t>(M) + 1);
  const double coef = 1.0 / std::tgamma(a);
  for (int m = 0; m <= M; ++m) c[m] = poisson_moment(m, coef, a - 1.0, 1.0);
  return c;
}

SubordinationWeights compute_weights(const BernsteinSpec& spec, int M, bool with_integral) {
  SubordinationWeights w;
  w.truncation_M = M;
  w.cm = compute_cm(spec, M);
  w.c_renewal = compute_c_renewal(w.cm, M);
  if (with_integral) w.c_integral = compute_c_integral(spec, M);
  w.tail_mass = static_cast<double>(1.0L - long_sum(w.cm, 1));
  return w;
}

// ---------------------------------------------------------------- step law

double StepLaw::box_mass() const {
  long double s = 0.0L;
  for (std::size_t i = 0; i < probs.size(); ++i) s += static_cast<long double>(probs[i]) * grid.multiplicity(i);
  return static_cast<double>(s);
}

namespace {

StepLaw finish_step_law(std::vector<double> probs, std::span<const double> cm, double tail_mass, int d,
                        int radius) {
  StepLaw law;
  law.d = d;
  law.radius = radius;
  law.truncation_M = static_cast<int>(cm.size()) - 1;
  law.grid = OrthantGrid(d, radius);
  law.probs = std::move(probs);
  law.stay_prob = law.probs[0];
  law.tail_mass = tail_mass;
  const long double assigned = long_sum(cm, 1);
  law.outside_mass = static_cast<double>(assigned - static_cast<long double>(law.box_mass()));
  const long long M = law.truncation_M;
  law.kernel_sup_at_M = srw_probability(d, M, (M % 2 == 0) ? Site{0, 0, 0} : Site{1, 0, 0});
  law.tail_pointwise_bound = tail_mass * law.kernel_sup_at_M;
  return law;
}

}  // namespace

StepLaw build_step_law(std::span<const double> cm, double tail_mass, const KernelSlab& slab, int radius) {
  const int M = static_cast<int>(cm.size()) - 1;
  if (slab.m_max() < M)
    throw SizingError("build_step_law: slab depth " + std::to_string(slab.m_max()) + " below truncation " +
                      std::to_string(M));
  if (radius > slab.window_radius()) throw SizingError("build_step_law: radius exceeds slab window");
  // slab entries inside the box are exact for m <= 2L + 1 - radius
  if (M > 2 * slab.window_radius() + 1 - radius)
    throw SizingError("build_step_law: slab window " + std::to_string(slab.window_radius()) +
                      " too narrow for truncation " + std::to_string(M) + " at radius " + std::to_string(radius));
  OrthantGrid grid(slab.dim(), radius);
  std::vector<double> probs(grid.size(), 0.0);
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const Site z = grid.site(idx);
    const std::size_t sidx = slab.grid().index(z);
    double s = 0.0;
    for (int m = 1; m <= M; ++m) s += cm[m] * slab.row(m)[sidx];
    probs[idx] = s;
  }
  return finish_step_law(std::move(probs), cm, tail_mass, slab.dim(), radius);
}

StepLaw build_step_law(std::span<const double> cm, double tail_mass, int d, int radius) {
  std::vector<double> w(cm.begin(), cm.end());
  w[0] = 0.0;
  auto probs = weighted_kernel_sum(d, w, radius);
  return finish_step_law(std::move(probs), cm, tail_mass, d, radius);
}

namespace {

// sum over m > M with m = parity mod 2 of f(m), for f smooth on the scale of M; returns {value, error}.
template <class F>
std::pair<double, double> parity_tail_sum(F&& f, int M, int parity) {
  double a = M + 1;
  if ((M + 1 - parity) & 1) a += 1.0;
  auto r = quad::integrate([&](double u) {
    const double t = a * std::exp(u);
    return f(t) * t;
  }, std::vector<double>{0.0, 1.0, 4.0, 12.0, 40.0, 140.0}, 1e-10);
  const double dh = a * 1e-4;
  const double em = -(2.0 / 12.0) * (f(a + dh) - f(a - dh)) / (2.0 * dh);
  return {0.5 * r.value + 0.5 * f(a) + em, std::abs(em) + 0.5 * r.error};
}

}  // namespace

StepLaw assign_tail(const StepLaw& law, const BernsteinSpec& spec, std::span<const double> cm) {
  const int M = law.truncation_M;
  if (static_cast<int>(cm.size()) != M + 1) throw DomainError("assign_tail: weights do not match the step law");
  if (M < 64) throw DomainError("assign_tail: truncation M too small for a local limit tail");
  const int d = law.d;
  const double dd = d;
  const double kappa = cm[M] * M / phi(spec, 1.0 / M);
  double drift = 0.0;
  for (int m = M / 2; m <= M; ++m) drift = std::max(drift, std::abs(cm[m] * m / phi(spec, 1.0 / m) / kappa - 1.0));
  auto model = [&](double m) { return kappa * phi(spec, 1.0 / m) / m; };
  const double E = lclt_error_constant(d, M / 2, M, std::min(law.radius, 16), 16);

  std::array<double, 2> err_sum{};
  for (int par = 0; par < 2; ++par) {
    auto [v, e] = parity_tail_sum([&](double m) { return model(m) * E * std::pow(m, -(dd + 2.0) / 2.0); }, M, par);
    err_sum[par] = v + e;
  }

  StepLaw out = law;
  std::unordered_map<long long, double> cache;
  long double placed = 0.0L;
  for (std::size_t idx = 0; idx < law.grid.size(); ++idx) {
    const Site z = law.grid.site(idx);
    const long long r2 = norm2(z);
    auto it = cache.find(r2);
    if (it == cache.end()) {
      const int par = static_cast<int>(r2 & 1);
      auto [sq, eq] = parity_tail_sum([&](double m) { return model(m) * lclt_density(d, m, z); }, M, par);
      it = cache.emplace(r2, std::max(0.0, (1.0 - drift) * (sq - eq - err_sum[par]))).first;
    }
    out.probs[idx] += it->second;
    placed += static_cast<long double>(it->second) * law.grid.multiplicity(idx);
  }
  out.stay_prob = out.probs[0];
  out.tail_assigned = law.tail_assigned + static_cast<double>(placed);
  out.tail_mass = law.tail_mass - static_cast<double>(placed);
  if (out.tail_mass < 0.0) throw NumericError("assign_tail: placed more than the tail mass");
  return out;
}

// ---------------------------------------------------------------- bands

void BandReport::include(double value, double arg) {
  if (value < band_lo) {
    band_lo = value;
    arg_lo = arg;
  }
  if (value > band_hi) {
    band_hi = value;
    arg_hi = arg;
  }
}

BandReport cm_asymptotic_report(std::span<const double> cm, const BernsteinSpec& spec, int m_lo, int m_hi) {
  BandReport b;
  b.claim_id = "cm_asymptotics";
  for (int m = m_lo; m <= m_hi && m < static_cast<int>(cm.size()); ++m)
    b.include(cm[m] * m / phi(spec, 1.0 / m), m);
  return b;
}

BandReport renewal_asymptotic_report(std::span<const double> c, const BernsteinSpec& spec, int m_lo, int m_hi) {
  BandReport b;
  b.claim_id = "renewal_asymptotics";
  for (int m = m_lo; m <= m_hi && m < static_cast<int>(c.size()); ++m)
    b.include(c[m] * m * phi(spec, 1.0 / m), m);
  return b;
}

BandReport step_law_band(const StepLaw& law, const BernsteinSpec& spec, double r_max) {
  BandReport b;
  b.claim_id = "step_law_vs_j";
  for (std::size_t idx = 0; idx < law.grid.size(); ++idx) {
    const Site z = law.grid.site(idx);
    const double r = norm(z);
    if (r < 1.0 || r > r_max) continue;
    b.include(law.probs[idx] / j_profile(spec, r, law.d), r);
  }
  return b;
}

double step_second_moment(const StepLaw& law, int radius) {
  long double s = 0.0L;
  for (std::size_t idx = 0; idx < law.grid.size(); ++idx) {
    const Site z = law.grid.site(idx);
    if (linf_norm(z) > radius) continue;
    s += static_cast<long double>(law.probs[idx]) * law.grid.multiplicity(idx) * norm2(z);
  }
  return static_cast<double>(s);
}

void write_weights_csv(std::ostream& os, const SubordinationWeights& w) {
  os << "m,c_m,c_renewal" << (w.c_integral ? ",c_integral" : "") << "\n";
  os << std::setprecision(17);
  for (int m = 0; m <= w.truncation_M; ++m) {
    os << m << ',' << w.cm[m] << ',' << w.c_renewal[m];
    if (w.c_integral) os << ',' << (*w.c_integral)[m];
    os << "\n";
  }
}

void write_step_law_csv(std::ostream& os, const StepLaw& law, const BernsteinSpec& spec, int radius) {
  static const char* names[3] = {"z1", "z2", "z3"};
  for (int i = 0; i < law.d; ++i) os << names[i] << ',';
  os << "prob,prob_over_j\n" << std::setprecision(17);
  radius = std::min(radius, law.radius);
  const int r1 = law.d >= 2 ? radius : 0, r2 = law.d >= 3 ? radius : 0;
  for (int a = -radius; a <= radius; ++a)
    for (int b = -r1; b <= r1; ++b)
      for (int c = -r2; c <= r2; ++c) {
        const Site z{a, b, c};
        const double p = law.at(z);
        for (int i = 0; i < law.d; ++i) os << z[i] << ',';
        os << p << ',';
        if (norm2(z) != 0) os << p / j_profile(spec, norm(z), law.d);
        os << "\n";
      }
}

}  // namespace subwalk
