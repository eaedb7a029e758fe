#include "subwalk/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "subwalk/errors.hpp"

namespace subwalk {

double norm(const Site& x) { return std::sqrt(static_cast<double>(norm2(x))); }

long long norm2(const Site& x) {
  long long s = 0;
  for (int v : x) s += static_cast<long long>(v) * v;
  return s;
}

int l1_norm(const Site& x) { return std::abs(x[0]) + std::abs(x[1]) + std::abs(x[2]); }

int linf_norm(const Site& x) {
  return std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])});
}

bool parity_matches(long long m, const Site& x) { return ((m + l1_norm(x)) & 1) == 0; }

Site operator+(const Site& a, const Site& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Site operator-(const Site& a, const Site& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

OrthantGrid::OrthantGrid(int d, int radius) : d_(d), radius_(radius) {
  if (d < 1 || d > 3) throw DomainError("dimension must be 1, 2 or 3");
  if (radius < 0) throw DomainError("grid radius must be non-negative");
  size_ = 1;
  for (int i = 0; i < d; ++i) size_ *= static_cast<std::size_t>(radius + 1);
}

std::size_t OrthantGrid::index(const Site& x) const {
  std::size_t idx = 0, stride = 1;
  for (int i = 0; i < d_; ++i) {
    idx += static_cast<std::size_t>(std::abs(x[i])) * stride;
    stride *= static_cast<std::size_t>(radius_ + 1);
  }
  return idx;
}

Site OrthantGrid::site(std::size_t idx) const {
  Site x{0, 0, 0};
  for (int i = 0; i < d_; ++i) {
    x[i] = static_cast<int>(idx % static_cast<std::size_t>(radius_ + 1));
    idx /= static_cast<std::size_t>(radius_ + 1);
  }
  return x;
}

int OrthantGrid::multiplicity(std::size_t idx) const {
  Site x = site(idx);
  int m = 1;
  for (int i = 0; i < d_; ++i)
    if (x[i] != 0) m *= 2;
  return m;
}

std::vector<Site> ball_sites(int d, double r) {
  std::vector<Site> out;
  const int R = static_cast<int>(std::floor(r));
  const int r1 = d >= 2 ? R : 0, r2 = d >= 3 ? R : 0;
  for (int a = -R; a <= R; ++a)
    for (int b = -r1; b <= r1; ++b)
      for (int c = -r2; c <= r2; ++c) {
        Site s{a, b, c};
        if (static_cast<double>(norm2(s)) <= r * r) out.push_back(s);
      }
  return out;
}

// ---------------------------------------------------------------- KernelSlab

KernelSlab KernelSlab::build(int d, int m_max, int window_radius, std::size_t memory_cap) {
  if (m_max < 1) throw DomainError("build_kernel: m_max must be at least 1");
  if (window_radius < 0) window_radius = m_max;
  if (window_radius < 1) throw DomainError("build_kernel: window radius must be at least 1");
  KernelSlab slab;
  slab.grid_ = OrthantGrid(d, window_radius);
  const std::size_t n = slab.grid_.size();
  const double bytes = static_cast<double>(m_max + 1) * static_cast<double>(n) * sizeof(double);
  if (bytes > static_cast<double>(memory_cap))
    throw SizingError("build_kernel: table needs " + std::to_string(bytes / 1048576.0) +
                      " MiB, above the configured cap");
  slab.m_max_ = m_max;
  slab.table_.assign(static_cast<std::size_t>(m_max + 1) * n, 0.0);
  slab.lost_.assign(m_max + 1, 0.0);
  slab.table_[0] = 1.0;

  const int L = window_radius;
  const double w = 1.0 / (2.0 * d);
  std::vector<std::size_t> stride(d);
  stride[0] = 1;
  for (int i = 1; i < d; ++i) stride[i] = stride[i - 1] * (L + 1);
  std::vector<int> mult(n);
  std::vector<Site> sites(n);
  for (std::size_t idx = 0; idx < n; ++idx) {
    sites[idx] = slab.grid_.site(idx);
    mult[idx] = slab.grid_.multiplicity(idx);
  }

  for (int m = 0; m < m_max; ++m) {
    const double* cur = slab.table_.data() + static_cast<std::size_t>(m) * n;
    double* nxt = slab.table_.data() + static_cast<std::size_t>(m + 1) * n;
    long double flux = 0.0L;
    for (std::size_t idx = 0; idx < n; ++idx) {
      const Site& u = sites[idx];
      double acc = 0.0;
      for (int i = 0; i < d; ++i) {
        const double up = u[i] < L ? cur[idx + stride[i]] : 0.0;
        const double down = u[i] > 0 ? cur[idx - stride[i]] : cur[idx + stride[i]];
        acc += up + down;
        if (u[i] == L) flux += static_cast<long double>(cur[idx]) * mult[idx] * w;
      }
      nxt[idx] = w * acc;
    }
    slab.lost_[m + 1] = static_cast<double>(static_cast<long double>(slab.lost_[m]) + flux);
  }
  return slab;
}

double KernelSlab::operator()(int m, const Site& x) const {
  if (m < 0 || m > m_max_) throw DomainError("kernel slab: step count out of range");
  if (!grid_.contains(x)) return 0.0;
  return row(m)[grid_.index(x)];
}

namespace {
constexpr char kMagic[4] = {'S', 'R', 'W', 'K'};
constexpr std::uint32_t kEndianTag = 0x01020304u;
}  // namespace

void KernelSlab::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  const std::int32_t hdr[3] = {dim(), m_max_, window_radius()};
  f.write(kMagic, 4);
  f.write(reinterpret_cast<const char*>(&kEndianTag), sizeof kEndianTag);
  f.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
  f.write(reinterpret_cast<const char*>(table_.data()),
          static_cast<std::streamsize>(table_.size() * sizeof(double)));
  f.write(reinterpret_cast<const char*>(lost_.data()),
          static_cast<std::streamsize>(lost_.size() * sizeof(double)));
  if (!f) throw std::runtime_error("write failed for " + path);
}

KernelSlab KernelSlab::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  char magic[4];
  std::uint32_t tag = 0;
  std::int32_t hdr[3];
  f.read(magic, 4);
  f.read(reinterpret_cast<char*>(&tag), sizeof tag);
  f.read(reinterpret_cast<char*>(hdr), sizeof hdr);
  if (!f || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error(path + ": not a kernel cache");
  if (tag != kEndianTag) throw std::runtime_error(path + ": endianness mismatch");
  KernelSlab slab;
  slab.grid_ = OrthantGrid(hdr[0], hdr[2]);
  slab.m_max_ = hdr[1];
  slab.table_.resize(static_cast<std::size_t>(hdr[1] + 1) * slab.grid_.size());
  slab.lost_.resize(hdr[1] + 1);
  f.read(reinterpret_cast<char*>(slab.table_.data()),
         static_cast<std::streamsize>(slab.table_.size() * sizeof(double)));
  f.read(reinterpret_cast<char*>(slab.lost_.data()),
         static_cast<std::streamsize>(slab.lost_.size() * sizeof(double)));
  if (!f) throw std::runtime_error(path + ": truncated kernel cache");
  return slab;
}

// ---------------------------------------------------------------- closed forms

namespace {

long double log_binom_half(long long m, long long j) {
  return std::lgamma(static_cast<long double>(m) + 1.0L) -
         std::lgamma(static_cast<long double>(j) + 1.0L) -
         std::lgamma(static_cast<long double>(m - j) + 1.0L) -
         static_cast<long double>(m) * std::numbers::ln2_v<long double>;
}

}  // namespace

double srw_probability_1d(long long m, long long k) {
  k = k < 0 ? -k : k;
  if (m < 0 || k > m || ((m + k) & 1)) return 0.0;
  return static_cast<double>(std::exp(log_binom_half(m, (m + k) / 2)));
}

void srw_row_1d(long long m, int kmax, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
  const long long k0 = m & 1;
  if (k0 > kmax) return;
  double p = static_cast<double>(std::exp(log_binom_half(m, (m + k0) / 2)));
  for (long long k = k0; k <= kmax && k <= m; k += 2) {
    out[static_cast<std::size_t>(k)] = p;
    p *= static_cast<double>(m - k) / static_cast<double>(m + k + 2);
  }
}

double srw_probability(int d, long long m, const Site& x) {
  if (m < 0) return 0.0;
  if (!parity_matches(m, x) || l1_norm(x) > m) return 0.0;
  switch (d) {
    case 1:
      return srw_probability_1d(m, x[0]);
    case 2:
      return srw_probability_1d(m, x[0] + x[1]) * srw_probability_1d(m, x[0] - x[1]);
    case 3: {
      // condition on the number j of steps along the first axis
      long double acc = 0.0L;
      const long double l3 = std::log(1.0L / 3.0L), l23 = std::log(2.0L / 3.0L);
      const long double lm = std::lgamma(static_cast<long double>(m) + 1.0L);
      for (long long j = std::abs(x[0]); j <= m; ++j) {
        const double a = srw_probability_1d(j, x[0]);
        if (a == 0.0) continue;
        const double b = srw_probability_1d(m - j, x[1] + x[2]) * srw_probability_1d(m - j, x[1] - x[2]);
        if (b == 0.0) continue;
        const long double lb = lm - std::lgamma(static_cast<long double>(j) + 1.0L) -
                               std::lgamma(static_cast<long double>(m - j) + 1.0L) +
                               static_cast<long double>(j) * l3 + static_cast<long double>(m - j) * l23;
        acc += std::exp(lb) * a * b;
      }
      return static_cast<double>(acc);
    }
    default:
      throw DomainError("dimension must be 1, 2 or 3");
  }
}

std::vector<double> weighted_kernel_sum(int d, std::span<const double> weights, int radius) {
  OrthantGrid grid(d, radius);
  std::vector<double> out(grid.size(), 0.0);
  const long long M = static_cast<long long>(weights.size()) - 1;
  std::vector<double> row;

  if (d == 1) {
    for (long long m = 0; m <= M; ++m) {
      if (weights[m] == 0.0) continue;
      srw_row_1d(m, radius, row);
      for (int k = 0; k <= radius; ++k) out[k] += weights[m] * row[k];
    }
    return out;
  }

  if (d == 2) {
    // sites 0 <= x <= y <= radius; P(Z_m = (x,y)) = p1(m, x+y) p1(m, y-x)
    std::vector<std::pair<int, int>> sites;
    for (int y = 0; y <= radius; ++y)
      for (int x = 0; x <= y; ++x) sites.emplace_back(x, y);
    std::vector<double> acc(sites.size(), 0.0);
    for (long long m = 0; m <= M; ++m) {
      const double w = weights[m];
      if (w == 0.0) continue;
      srw_row_1d(m, 2 * radius, row);
      for (std::size_t s = 0; s < sites.size(); ++s) {
        const auto [x, y] = sites[s];
        acc[s] += w * row[x + y] * row[y - x];
      }
    }
    for (std::size_t s = 0; s < sites.size(); ++s) {
      const auto [x, y] = sites[s];
      out[grid.index({x, y, 0})] = acc[s];
      out[grid.index({y, x, 0})] = acc[s];
    }
    return out;
  }

  // d == 3: split the m steps into j steps on the first axis and m - j on the plane.
  const int L = radius;
  const std::size_t npairs = static_cast<std::size_t>(L + 1) * (L + 2) / 2;
  auto pair_index = [](int b, int c) {  // b <= c
    return static_cast<std::size_t>(c) * (c + 1) / 2 + b;
  };
  std::vector<double> p1(static_cast<std::size_t>(M + 1) * (L + 1));
  std::vector<double> p2(static_cast<std::size_t>(M + 1) * npairs);
  for (long long k = 0; k <= M; ++k) {
    srw_row_1d(k, 2 * L, row);
    std::copy(row.begin(), row.begin() + L + 1, p1.begin() + k * (L + 1));
    double* dst = p2.data() + k * npairs;
    for (int c = 0; c <= L; ++c)
      for (int b = 0; b <= c; ++b) dst[pair_index(b, c)] = row[b + c] * row[c - b];
  }
  struct S3 {
    int a;
    std::size_t pair;
    Site x;
  };
  std::vector<S3> sites;
  for (int c = 0; c <= L; ++c)
    for (int b = 0; b <= c; ++b)
      for (int a = 0; a <= b; ++a) sites.push_back({a, pair_index(b, c), {a, b, c}});
  std::vector<double> acc(sites.size(), 0.0);
  std::vector<double> coef;
  const long double l3 = std::log(1.0L / 3.0L), l23 = std::log(2.0L / 3.0L);
  for (long long m = 0; m <= M; ++m) {
    const double w = weights[m];
    if (w == 0.0) continue;
    // binomial(m, 1/3) weights, restricted to where they matter
    const long double lm = std::lgamma(static_cast<long double>(m) + 1.0L);
    const long long mode = m / 3;
    const double sd = std::sqrt(2.0 * static_cast<double>(m) / 9.0);
    const long long jlo = std::max<long long>(0, mode - static_cast<long long>(14.0 * sd) - 2);
    const long long jhi = std::min<long long>(m, mode + static_cast<long long>(14.0 * sd) + 2);
    coef.assign(static_cast<std::size_t>(jhi - jlo + 1), 0.0);
    for (long long j = jlo; j <= jhi; ++j) {
      const long double lb = lm - std::lgamma(static_cast<long double>(j) + 1.0L) -
                             std::lgamma(static_cast<long double>(m - j) + 1.0L) +
                             static_cast<long double>(j) * l3 + static_cast<long double>(m - j) * l23;
      coef[j - jlo] = w * static_cast<double>(std::exp(lb));
    }
    for (long long j = jlo; j <= jhi; ++j) {
      const double cj = coef[j - jlo];
      if (cj == 0.0) continue;
      const double* r1 = p1.data() + j * (L + 1);
      const double* r2 = p2.data() + (m - j) * npairs;
      for (std::size_t s = 0; s < sites.size(); ++s) acc[s] += cj * r1[sites[s].a] * r2[sites[s].pair];
    }
  }
  for (std::size_t s = 0; s < sites.size(); ++s) {
    Site x = sites[s].x;
    std::array<int, 3> perm{0, 1, 2};
    do {
      out[grid.index({x[perm[0]], x[perm[1]], x[perm[2]]})] = acc[s];
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return out;
}

double lclt_density(int d, double m, const Site& x) {
  const double dd = d;
  return 2.0 * std::pow(dd / (2.0 * std::numbers::pi * m), dd / 2.0) *
         std::exp(-dd * static_cast<double>(norm2(x)) / (2.0 * m));
}

double kernel_sup_constant(int d) {
  double best = 2.0 * std::pow(d / (2.0 * std::numbers::pi), d / 2.0);
  const int mcap = d == 3 ? 600 : 4000;
  for (int m = 1; m <= mcap; ++m) {
    const Site x = (m % 2 == 0) ? Site{0, 0, 0} : Site{1, 0, 0};
    best = std::max(best, std::pow(m, d / 2.0) * srw_probability(d, m, x));
  }
  return best;
}

double lclt_error_constant(int d, int m_lo, int m_hi, int radius, int samples) {
  OrthantGrid grid(d, radius);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const int m = m_lo + static_cast<int>(static_cast<long long>(m_hi - m_lo) * s / std::max(1, samples - 1));
    std::vector<double> w(static_cast<std::size_t>(m) + 1, 0.0);
    w[m] = 1.0;
    auto p = weighted_kernel_sum(d, w, radius);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      const Site x = grid.site(idx);
      const double q = parity_matches(m, x) ? lclt_density(d, m, x) : 0.0;
      worst = std::max(worst, std::pow(m, (d + 2) / 2.0) * std::abs(p[idx] - q));
    }
  }
  return worst;
}

double char_function(std::span<const double> theta) {
  if (theta.empty()) throw DomainError("char_function: empty argument");
  double s = 0.0;
  for (double t : theta) s += std::cos(t);
  return s / static_cast<double>(theta.size());
}

GaussianBoundReport gaussian_bound_check(const KernelSlab& slab, int m_start) {
  GaussianBoundReport rep;
  rep.m_start = m_start;
  const int d = slab.dim();
  const auto& grid = slab.grid();
  const double dd = d;

  // upper bound: smallest C on a log grid whose C' stays within twice the C -> infinity value
  double c_inf = 0.0;
  for (int m = 1; m <= slab.m_max(); ++m) {
    const double* r = slab.row(m);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) c_inf = std::max(c_inf, r[idx] * std::pow(m, dd / 2));
  }
  auto c_prime_at = [&](double C) {
    double cp = 0.0;
    for (int m = 1; m <= slab.m_max(); ++m) {
      const double* r = slab.row(m);
      for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        if (r[idx] == 0.0) continue;
        const double z2 = static_cast<double>(norm2(grid.site(idx)));
        cp = std::max(cp, r[idx] * std::pow(m, dd / 2) * std::exp(z2 / (C * m)));
      }
    }
    return cp;
  };
  double C = 0.25;
  double cp = c_prime_at(C);
  while (cp > 2.0 * c_inf && C < 1e3) {
    C *= 1.1;
    cp = c_prime_at(C);
  }
  rep.c_exponent = C;
  rep.c_prime = cp;

  rep.c7_at_060 = rep.c7_at_065 = rep.c8_odd = std::numeric_limits<double>::infinity();
  for (int m = 0; m <= slab.m_max(); ++m) {
    const double* r = slab.row(m);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      const Site z = grid.site(idx);
      const double p = r[idx];
      const bool par = parity_matches(m, z);
      if (!par && p != 0.0) ++rep.parity_violations;
      if (m == 0) continue;
      const double z2 = static_cast<double>(norm2(z));
      const double bound = std::pow(m, -dd / 2) * std::exp(-z2 / (C * m));
      if (p > cp * bound * (1.0 + 1e-12)) ++rep.upper_violations;
      if (m < m_start || !par) continue;
      const double scaled = p * std::pow(m, dd / 2) * std::exp(dd * z2 / (2.0 * m));
      const double zn = std::sqrt(z2);
      const bool even = l1_norm(z) % 2 == 0;
      if (even) {
        if (zn <= std::pow(m, 0.6)) {
          if (p <= 0.0) ++rep.lower_violations;
          rep.c7_at_060 = std::min(rep.c7_at_060, scaled);
        }
        if (zn <= std::pow(m, 0.65)) rep.c7_at_065 = std::min(rep.c7_at_065, scaled);
      } else if (zn <= std::sqrt(static_cast<double>(m))) {
        if (p <= 0.0) ++rep.lower_violations;
        rep.c8_odd = std::min(rep.c8_odd, scaled);
      }
    }
  }
  return rep;
}

}  // namespace subwalk
