#include "subwalk/mc.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_map>

#include "subwalk/errors.hpp"
#include "subwalk/quadrature.hpp"

namespace subwalk {

namespace {

constexpr long long kMaxBlock = 1LL << 62;

double uniform_open(Rng& rng) {
  // (0, 1]
  return 1.0 - std::generate_canonical<double, 64>(rng);
}

std::uint64_t site_key(const Site64& s) {
  return (static_cast<std::uint64_t>(s[0] + (1LL << 20)) << 42) ^
         (static_cast<std::uint64_t>(s[1] + (1LL << 20)) << 21) ^ static_cast<std::uint64_t>(s[2] + (1LL << 20));
}

bool inside(const FiniteDomain& domain, const Site64& y) {
  for (long long v : y)
    if (v > (1LL << 30) || v < -(1LL << 30)) return false;
  return domain.contains({static_cast<int>(y[0]), static_cast<int>(y[1]), static_cast<int>(y[2])});
}

template <class Work, class Result>
std::vector<Result> run_workers(long long n_items, int workers, std::uint64_t seed, Work&& work) {
  workers = std::max(1, workers);
  std::vector<std::vector<Result>> parts(workers);
  auto job = [&](int w) {
    Rng rng = worker_rng(seed, w);
    const long long lo = n_items * w / workers, hi = n_items * (w + 1) / workers;
    parts[w].reserve(static_cast<std::size_t>(hi - lo));
    for (long long i = lo; i < hi; ++i) parts[w].push_back(work(rng));
  };
  if (workers == 1) {
    job(0);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(job, w);
    for (auto& t : threads) t.join();
  }
  std::vector<Result> out;
  out.reserve(static_cast<std::size_t>(n_items));
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace

Rng worker_rng(std::uint64_t seed, int worker) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(worker)};
  return Rng(seq);
}

TableRSampler::TableRSampler(std::span<const double> cm) {
  cdf_.resize(cm.size() > 0 ? cm.size() - 1 : 0);
  long double s = 0.0L;
  for (std::size_t m = 1; m < cm.size(); ++m) {
    s += cm[m];
    cdf_[m - 1] = static_cast<double>(s);
  }
  if (cdf_.empty() || !(cdf_.back() > 0.0)) throw DomainError("TableRSampler: empty weight table");
}

long long TableRSampler::operator()(Rng& rng) const {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    const double v = u(rng);
    if (v >= cdf_.back()) continue;  // tail mass: redraw
    return static_cast<long long>(std::upper_bound(cdf_.begin(), cdf_.end(), v) - cdf_.begin()) + 1;
  }
}

LevyRSampler::LevyRSampler(const BernsteinSpec& spec) : comps_(spec.components()) {
  double s = 0.0;
  for (const auto& c : comps_) {
    const double phi1 = c.theta == 0.0 ? 1.0 : std::pow(1.0 + c.theta, c.alpha) - std::pow(c.theta, c.alpha);
    s += c.weight * phi1;
    cum_.push_back(s);
  }
  for (auto& v : cum_) v /= s;
}

double LevyRSampler::sample_time(Rng& rng) const {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double pick = u(rng);
  std::size_t i = 0;
  while (i + 1 < cum_.size() && pick >= cum_[i]) ++i;
  const double a = comps_[i].alpha, theta = comps_[i].theta;
  // proposal proportional to min(t,1) t^{-1-alpha}
  const double q0 = (1.0 / (1.0 - a)) / (1.0 / (1.0 - a) + 1.0 / a);
  for (;;) {
    const double t = u(rng) < q0 ? std::pow(uniform_open(rng), 1.0 / (1.0 - a)) : std::pow(uniform_open(rng), -1.0 / a);
    if (!(t > 0.0)) continue;
    const double accept = -std::expm1(-t) * std::exp(-theta * t) / std::min(t, 1.0);
    if (u(rng) < accept) return t;
  }
}

long long LevyRSampler::operator()(Rng& rng) const {
  const double t = sample_time(rng);
  if (t < 2.0) {
    // inverse CDF of Poisson(t) conditioned on >= 1
    const double v = std::generate_canonical<double, 64>(rng);
    long long k = 1;
    double p = t * std::exp(-t) / -std::expm1(-t);
    double cum = p;
    while (v > cum && p > 0.0) {
      ++k;
      p *= t / static_cast<double>(k);
      cum += p;
    }
    return k;
  }
  if (t > 4e18) return kMaxBlock;
  std::poisson_distribution<long long> pois(t);
  for (;;) {
    const long long k = pois(rng);
    if (k >= 1) return std::min(k, kMaxBlock);
  }
}

Site64 sample_srw_block(int d, long long m, Rng& rng) {
  auto bin = [&](long long n, double p) -> long long {
    if (n <= 0) return 0;
    std::binomial_distribution<long long> b(n, p);
    return b(rng);
  };
  std::array<long long, 3> counts{0, 0, 0};
  if (d == 1) {
    counts[0] = m;
  } else if (d == 2) {
    counts[0] = bin(m, 0.5);
    counts[1] = m - counts[0];
  } else {
    counts[0] = bin(m, 1.0 / 3.0);
    counts[1] = bin(m - counts[0], 0.5);
    counts[2] = m - counts[0] - counts[1];
  }
  Site64 z{0, 0, 0};
  for (int i = 0; i < d; ++i) z[i] = 2 * bin(counts[i], 0.5) - counts[i];
  return z;
}

ExitRecord simulate_exit(const FiniteDomain& domain, const RSampler& sample_r, const Site& start, Rng& rng,
                         long long max_steps) {
  if (!domain.contains(start)) throw DomainError("simulate_exit: start must lie in the domain");
  ExitRecord rec;
  Site64 pos{start[0], start[1], start[2]};
  for (long long step = 1; step <= max_steps; ++step) {
    const long long m = sample_r(rng);
    const Site64 z = sample_srw_block(domain.dim(), m, rng);
    const Site64 next{pos[0] + z[0], pos[1] + z[1], pos[2] + z[2]};
    if (!inside(domain, next)) {
      rec.pre_exit = pos;
      rec.exit = next;
      rec.steps = step;
      return rec;
    }
    pos = next;
  }
  rec.pre_exit = pos;
  rec.exit = pos;
  rec.steps = max_steps;
  rec.censored = true;
  return rec;
}

std::vector<ExitRecord> run_exits(const FiniteDomain& domain, const BernsteinSpec& spec, const Site& start,
                                  const McConfig& config) {
  if (config.n_paths < 1) throw DomainError("McConfig: n_paths must be at least 1");
  const LevyRSampler sampler(spec);
  RSampler r = [&](Rng& rng) { return sampler(rng); };
  return run_workers<std::function<ExitRecord(Rng&)>, ExitRecord>(
             config.n_paths, config.worker_count, config.seed,
             [&](Rng& rng) { return simulate_exit(domain, r, start, rng, config.max_steps); });
}

MeanEstimate exit_time_estimate(std::span<const ExitRecord> records) {
  MeanEstimate e;
  long double s = 0.0L, s2 = 0.0L;
  for (const auto& r : records) {
    if (r.censored) {
      ++e.censored;
      continue;
    }
    s += r.steps;
    s2 += static_cast<long double>(r.steps) * r.steps;
    ++e.samples;
  }
  if (e.samples == 0) return e;
  const long double mean = s / e.samples;
  const long double var = e.samples > 1 ? (s2 - e.samples * mean * mean) / (e.samples - 1) : 0.0L;
  e.mean = static_cast<double>(mean);
  e.std_error = static_cast<double>(std::sqrt(std::max(var, 0.0L) / e.samples));
  return e;
}

double exit_law_tv(std::span<const ExitRecord> records, const PoissonKernelRow& row) {
  std::unordered_map<std::uint64_t, std::size_t> pos;
  for (std::size_t i = 0; i < row.z.size(); ++i) pos[site_key({row.z[i][0], row.z[i][1], row.z[i][2]})] = i;
  std::vector<long long> counts(row.z.size(), 0);
  long long beyond = 0, total = 0;
  for (const auto& r : records) {
    if (r.censored) continue;
    ++total;
    bool in_window = true;
    for (long long v : r.exit)
      if (v > (1LL << 19) || v < -(1LL << 19)) in_window = false;
    auto it = in_window ? pos.find(site_key(r.exit)) : pos.end();
    if (it == pos.end()) ++beyond;
    else ++counts[it->second];
  }
  if (total == 0) throw NumericError("exit_law_tv: no uncensored records");
  long double tv = 0.0L, kmass = 0.0L;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    tv += std::fabs(static_cast<long double>(counts[i]) / total - row.k[i]);
    kmass += row.k[i];
  }
  tv += std::fabs(static_cast<long double>(beyond) / total - (1.0L - kmass));
  return static_cast<double>(tv / 2.0L);
}

bool IkedaWatanabeResult::within() const {
  return valid && std::abs(lhs - rhs) <= 3.0 * lhs_std_error + truncation_bound;
}

IkedaWatanabeResult ikeda_watanabe_check(const FiniteDomain& domain, const DomainSolution& sol, const StepLaw& law,
                                         const PairFunction& f, double f_far, double f_sup, std::size_t start_index,
                                         std::span<const ExitRecord> records) {
  IkedaWatanabeResult res;
  long double s = 0.0L, s2 = 0.0L;
  long long n = 0;
  for (const auto& r : records) {
    if (r.censored) {
      ++res.censored;
      continue;
    }
    const double v = f(r.pre_exit, r.exit);
    s += v;
    s2 += static_cast<long double>(v) * v;
    ++n;
  }
  res.valid = static_cast<double>(res.censored) < 1e-3 * static_cast<double>(records.size());
  if (n > 0) {
    const long double mean = s / n;
    res.lhs = static_cast<double>(mean);
    const long double var = n > 1 ? (s2 - n * mean * mean) / (n - 1) : 0.0L;
    res.lhs_std_error = static_cast<double>(std::sqrt(std::max(var, 0.0L) / n));
  }

  const auto& pts = domain.points();
  const int L = law.radius;
  const int r1 = law.d >= 2 ? L : 0, r2 = law.d >= 3 ? L : 0;
  long double rhs = 0.0L, tb = 0.0L;
  const auto xi = static_cast<Eigen::Index>(start_index);
  for (std::size_t y = 0; y < pts.size(); ++y) {
    const Site& py = pts[y];
    const Site64 y64{py[0], py[1], py[2]};
    long double e = 0.0L, dev = 0.0L;
    for (int a = -L; a <= L; ++a)
      for (int b = -r1; b <= r1; ++b)
        for (int c = -r2; c <= r2; ++c) {
          const Site z{a, b, c};
          const Site w = py + z;
          if (domain.contains(w)) continue;
          const double v = f(y64, {w[0], w[1], w[2]});
          e += static_cast<long double>(law.at(z)) * v;
          dev += std::fabs(v - f_far);
        }
    e += static_cast<long double>(law.unassigned_mass()) * f_far;
    const double g = sol.G(xi, static_cast<Eigen::Index>(y));
    rhs += g * e;
    tb += g * law.tail_pointwise_bound * dev;
  }
  res.rhs = static_cast<double>(rhs);
  res.truncation_bound = static_cast<double>(tb) + sol.eta_bias_bound * f_sup * sol.defect.maxCoeff();
  return res;
}

double green_truncation_bound(const BernsteinSpec& spec, int d, long long max_steps) {
  const double csup = kernel_sup_constant(d);
  const double N = static_cast<double>(max_steps);
  auto log_f = [&](double s) {
    const double ph = phi(spec, -std::expm1(-s));
    const double psi = 1.0 - ph;
    if (psi <= 0.0) return -1e300;
    return (d / 2.0 - 1.0) * std::log(s) + N * std::log(psi) - std::log(ph);
  };
  std::vector<double> pts{1e-40};
  for (double s = 1e-36; s < 50.0; s *= 1e4) pts.push_back(s);
  pts.push_back(50.0);
  auto r = quad::integrate_log_axis(log_f, pts, 1e-10);
  return csup / std::tgamma(d / 2.0) * r.value;
}

GreenEstimate estimate_green(const BernsteinSpec& spec, int d, const Site& x, const McConfig& config) {
  const LevyRSampler sampler(spec);
  const Site64 target{x[0], x[1], x[2]};
  auto counts = run_workers<std::function<long long(Rng&)>, long long>(
      config.n_paths, config.worker_count, config.seed, [&](Rng& rng) {
        Site64 pos{0, 0, 0};
        long long visits = pos == target ? 1 : 0;
        for (long long step = 1; step < config.max_steps; ++step) {
          const Site64 z = sample_srw_block(d, sampler(rng), rng);
          for (int i = 0; i < 3; ++i) pos[i] += z[i];
          if (pos == target) ++visits;
        }
        return visits;
      });
  GreenEstimate g;
  g.n_paths = config.n_paths;
  g.max_steps = config.max_steps;
  long double s = 0.0L, s2 = 0.0L;
  for (long long c : counts) {
    s += c;
    s2 += static_cast<long double>(c) * c;
  }
  const long double n = static_cast<long double>(counts.size());
  const long double mean = s / n;
  g.mean = static_cast<double>(mean);
  g.std_error = static_cast<double>(std::sqrt(std::max((s2 - n * mean * mean) / (n - 1), 0.0L) / n));
  g.truncation_bound = green_truncation_bound(spec, d, config.max_steps);
  return g;
}

}  // namespace subwalk
