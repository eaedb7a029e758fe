#include "subwalk/domain.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <random>

#include "subwalk/errors.hpp"

namespace subwalk {

// ---------------------------------------------------------------- FiniteDomain

namespace {

const char* kCoordNames[2][3] = {{"x1", "x2", "x3"}, {"z1", "z2", "z3"}};

void write_site(std::ostream& os, int d, const Site& s) {
  for (int i = 0; i < d; ++i) os << s[i] << ',';
}

}  // namespace

FiniteDomain FiniteDomain::ball(int d, const Site& center, double n, std::size_t cap) {
  if (!(n >= 1.0)) throw DomainError("build_domain: radius must be at least 1");
  std::vector<Site> pts;
  for (const Site& s : ball_sites(d, n))
    if (static_cast<double>(norm2(s)) < n * n) pts.push_back(center + s);
  if (pts.size() > cap)
    throw SizingError("build_domain: |B| = " + std::to_string(pts.size()) + " exceeds cap " + std::to_string(cap));
  return from_points(d, std::move(pts), center, n);
}

FiniteDomain FiniteDomain::from_points(int d, std::vector<Site> points, const Site& center, double n) {
  if (d < 1 || d > 3) throw DomainError("dimension must be 1, 2 or 3");
  if (points.empty()) throw DomainError("domain must be non-empty");
  FiniteDomain dom;
  dom.d_ = d;
  dom.center_ = center;
  dom.n_ = n;
  dom.points_ = std::move(points);
  Site lo = dom.points_[0], hi = dom.points_[0];
  for (const auto& p : dom.points_)
    for (int i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  int box = 1;
  for (int i = 0; i < 3; ++i) box = std::max(box, hi[i] - lo[i] + 1);
  dom.lo_ = lo;
  dom.box_ = box;
  std::size_t cells = 1;
  for (int i = 0; i < d; ++i) cells *= static_cast<std::size_t>(box);
  dom.lookup_.assign(cells, -1);
  for (std::size_t k = 0; k < dom.points_.size(); ++k) {
    std::size_t idx = 0;
    for (int i = d - 1; i >= 0; --i) idx = idx * box + static_cast<std::size_t>(dom.points_[k][i] - lo[i]);
    if (dom.lookup_[idx] >= 0) throw DomainError("domain points must be distinct");
    dom.lookup_[idx] = static_cast<int>(k);
  }
  return dom;
}

std::optional<std::size_t> FiniteDomain::index_of(const Site& y) const {
  std::size_t idx = 0;
  for (int i = d_ - 1; i >= 0; --i) {
    const int off = y[i] - lo_[i];
    if (off < 0 || off >= box_) return std::nullopt;
    idx = idx * box_ + static_cast<std::size_t>(off);
  }
  for (int i = d_; i < 3; ++i)
    if (y[i] != 0) return std::nullopt;
  const int k = lookup_[idx];
  if (k < 0) return std::nullopt;
  return static_cast<std::size_t>(k);
}

std::vector<std::size_t> FiniteDomain::within(double r) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < points_.size(); ++k)
    if (static_cast<double>(norm2(points_[k] - center_)) < r * r) out.push_back(k);
  return out;
}

std::vector<std::size_t> FiniteDomain::annulus(double r, double s) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < points_.size(); ++k) {
    const double q = static_cast<double>(norm2(points_[k] - center_));
    if (q >= r * r && q < s * s) out.push_back(k);
  }
  return out;
}

int FiniteDomain::span_linf() const {
  int s = 0;
  for (int i = 0; i < d_; ++i) {
    int lo = points_[0][i], hi = points_[0][i];
    for (const auto& p : points_) {
      lo = std::min(lo, p[i]);
      hi = std::max(hi, p[i]);
    }
    s = std::max(s, hi - lo);
  }
  return s;
}

// ---------------------------------------------------------------- solve

DomainSolution solve_green_ball(const FiniteDomain& domain, const StepLaw& law, bool compute_residual) {
  if (law.d != domain.dim()) throw DomainError("solve_green_ball: dimension mismatch");
  if (law.radius < domain.span_linf())
    throw SizingError("solve_green_ball: step-law box radius " + std::to_string(law.radius) +
                      " does not cover displacements up to " + std::to_string(domain.span_linf()));
  const auto& pts = domain.points();
  const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
  DomainSolution sol;
  sol.P.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) sol.P(i, j) = law.at(pts[j] - pts[i]);

  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - sol.P;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() == Eigen::Success) {
    sol.G = llt.solve(Eigen::MatrixXd::Identity(n, n));
  } else {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    sol.G = lu.inverse();
    if (!sol.G.allFinite()) throw NumericError("solve_green_ball: singular system (defect-free configuration?)");
  }
  sol.eta = sol.G.rowwise().sum();
  sol.defect = Eigen::VectorXd::Ones(n) - sol.P.rowwise().sum();
  sol.symmetry_error = (sol.G - sol.G.transpose()).cwiseAbs().maxCoeff();
  sol.residual = compute_residual ? (A * sol.G - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff()
                                  : std::numeric_limits<double>::quiet_NaN();
  sol.entry_bias_bound = law.tail_pointwise_bound;
  const double delta = sol.entry_bias_bound * static_cast<double>(n);
  const double eta_max = sol.eta.maxCoeff();
  sol.eta_bias_bound = delta * eta_max < 1.0 ? eta_max * eta_max * delta / (1.0 - delta * eta_max)
                                             : std::numeric_limits<double>::infinity();
  return sol;
}

// ---------------------------------------------------------------- generator

GeneratorValue generator_apply(const StepLaw& law, const std::function<double(const Site&)>& f, const Site& x,
                               FarField far) {
  const int L = law.radius;
  const int r1 = law.d >= 2 ? L : 0, r2 = law.d >= 3 ? L : 0;
  long double acc = 0.0L;
  long double dev = 0.0L;
  for (int a = -L; a <= L; ++a)
    for (int b = -r1; b <= r1; ++b)
      for (int c = -r2; c <= r2; ++c) {
        const Site z{a, b, c};
        const double fz = f(x + z);
        acc += static_cast<long double>(law.at(z)) * fz;
        dev += std::abs(fz - far.value);
      }
  GeneratorValue g;
  g.value = static_cast<double>(acc + static_cast<long double>(law.unassigned_mass()) * far.value) - f(x);
  g.bound = law.unassigned_mass() * far.bound + law.tail_pointwise_bound * static_cast<double>(dev);
  return g;
}

GeneratorValue generator_apply(const StepLaw& law, const DomainFunction& f, const Site& x) {
  const auto& pts = f.domain->points();
  long double acc = 0.0L, mass = 0.0L;
  double fx = 0.0;
  auto visit = [&](const Site& y, double v) {
    const Site z = y - x;
    if (!law.grid.contains(z))
      throw SizingError("generator_apply: function support leaves the step-law box around x");
    acc += static_cast<long double>(law.at(z)) * v;
    mass += std::abs(v);
    if (z == Site{0, 0, 0}) fx = v;
  };
  for (std::size_t k = 0; k < pts.size(); ++k) visit(pts[k], f.inside[k]);
  for (const auto& [z, v] : f.outside) visit(z, v);
  GeneratorValue g;
  g.value = static_cast<double>(acc) - fx;
  g.bound = law.tail_pointwise_bound * static_cast<double>(mass);
  return g;
}

ProbeReport maximum_principle_probe(const StepLaw& law, int trials, std::uint64_t seed, int window) {
  if (law.radius < 2 * window) throw SizingError("maximum_principle_probe: step-law box smaller than the window");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> coord(-window, window);
  const int side = 2 * window + 1;
  const int cells = law.d == 1 ? side : law.d == 2 ? side * side : side * side * side;
  ProbeReport rep;
  std::vector<double> values(static_cast<std::size_t>(cells));
  auto cell = [&](const Site& y) -> int {
    int idx = 0;
    for (int i = law.d - 1; i >= 0; --i) {
      if (std::abs(y[i]) > window) return -1;
      idx = idx * side + (y[i] + window);
    }
    return idx;
  };
  for (int t = 0; t < trials; ++t) {
    const double density = unit(rng);
    const int kind = t % 4;
    for (auto& v : values) {
      v = unit(rng) < density ? val(rng) : 0.0;
      if (kind == 1) v = std::abs(v);
      if (kind == 2) v = -std::abs(v);
    }
    Site x{0, 0, 0};
    for (int i = 0; i < law.d; ++i) x[i] = coord(rng);
    if (kind == 3) {  // single spike
      std::fill(values.begin(), values.end(), 0.0);
      values[cell(x)] = unit(rng) < 0.5 ? 1.0 : -1.0;
    }
    auto f = [&](const Site& y) {
      const int c = cell(y);
      return c < 0 ? 0.0 : values[c];
    };
    const auto g = generator_apply(law, f, x);
    ++rep.trials;
    if (g.value < -g.bound) {
      ++rep.decisive;
      double inf = 0.0;
      for (double v : values) inf = std::min(inf, v);
      if (!(f(x) > inf)) ++rep.violations;
    }
  }
  return rep;
}

// ---------------------------------------------------------------- Poisson kernel

std::vector<Site> exterior_window(const FiniteDomain& domain, double exterior_radius) {
  std::vector<Site> out;
  const double n = domain.radius();
  for (const Site& s : ball_sites(domain.dim(), exterior_radius)) {
    const double q = static_cast<double>(norm2(s));
    if (q >= n * n) out.push_back(domain.center() + s);
  }
  return out;
}

std::vector<PoissonKernelRow> poisson_kernel_rows(const FiniteDomain& domain, const DomainSolution& sol,
                                                  const StepLaw& law, std::span<const std::size_t> x_indices,
                                                  double exterior_radius) {
  const double n = domain.radius();
  if (law.radius < static_cast<int>(std::ceil(exterior_radius + n)))
    throw SizingError("poisson_kernel: step-law box radius " + std::to_string(law.radius) +
                      " below exterior radius + n = " + std::to_string(exterior_radius + n));
  const auto zs = exterior_window(domain, exterior_radius);
  const auto& pts = domain.points();
  const Eigen::Index nb = static_cast<Eigen::Index>(pts.size());
  const Eigen::Index nr = static_cast<Eigen::Index>(x_indices.size());
  Eigen::MatrixXd Gr(nr, nb);
  for (Eigen::Index r = 0; r < nr; ++r) Gr.row(r) = sol.G.row(static_cast<Eigen::Index>(x_indices[r]));

  std::vector<PoissonKernelRow> rows(static_cast<std::size_t>(nr));
  for (Eigen::Index r = 0; r < nr; ++r) {
    auto& row = rows[r];
    row.x_index = x_indices[r];
    row.x = pts[x_indices[r]];
    row.exterior_radius = exterior_radius;
    row.z = zs;
    row.k.resize(zs.size());
  }
  constexpr Eigen::Index kBlock = 1024;
  Eigen::MatrixXd Pz;
  for (Eigen::Index start = 0; start < static_cast<Eigen::Index>(zs.size()); start += kBlock) {
    const Eigen::Index cols = std::min<Eigen::Index>(kBlock, static_cast<Eigen::Index>(zs.size()) - start);
    Pz.resize(nb, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index y = 0; y < nb; ++y) Pz(y, c) = law.at(zs[start + c] - pts[y]);
    const Eigen::MatrixXd K = Gr * Pz;
    for (Eigen::Index r = 0; r < nr; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) rows[r].k[start + c] = K(r, c);
  }
  for (Eigen::Index r = 0; r < nr; ++r) {
    auto& row = rows[r];
    long double s = 0.0L;
    for (double v : row.k) s += v;
    row.captured_mass = static_cast<double>(s);
    row.unassigned_exit = sol.eta(static_cast<Eigen::Index>(row.x_index)) * law.unassigned_mass();
    row.truncation_note = "exits carried by unassigned step mass: " + std::to_string(row.unassigned_exit) +
                          "; entries are lower bounds, each short by at most " +
                          std::to_string(sol.eta(static_cast<Eigen::Index>(row.x_index)) * law.tail_pointwise_bound);
  }
  return rows;
}

PoissonKernelRow poisson_kernel(const FiniteDomain& domain, const DomainSolution& sol, const StepLaw& law,
                                std::size_t x_index, double exterior_radius) {
  const std::size_t idx[1] = {x_index};
  return std::move(poisson_kernel_rows(domain, sol, law, idx, exterior_radius)[0]);
}

std::vector<double> l_function(const BernsteinSpec& spec, const FiniteDomain& domain, const DomainSolution& sol,
                               std::span<const Site> zs, double b2) {
  const double n = domain.radius();
  const int d = domain.dim();
  const auto ann = domain.annulus(b2 * n, n);
  const double head_scale = 1.0 / phi(spec, 1.0 / (n * n));
  std::vector<double> j_by_r2;  // lazily filled, NaN = not yet evaluated
  auto j_of = [&](long long r2) {
    if (r2 >= static_cast<long long>(j_by_r2.size()))
      j_by_r2.resize(static_cast<std::size_t>(r2) + 1, std::numeric_limits<double>::quiet_NaN());
    double& v = j_by_r2[static_cast<std::size_t>(r2)];
    if (std::isnan(v)) v = j_profile(spec, std::sqrt(static_cast<double>(r2)), d);
    return v;
  };
  std::vector<double> out;
  out.reserve(zs.size());
  for (const Site& z : zs) {
    long double acc = 0.0L;
    for (std::size_t k : ann) acc += sol.eta(static_cast<Eigen::Index>(k)) * j_of(norm2(z - domain.points()[k]));
    out.push_back(j_of(norm2(z - domain.center())) * head_scale + std::pow(n, -d) * static_cast<double>(acc));
  }
  return out;
}

double l_function(const BernsteinSpec& spec, const FiniteDomain& domain, const DomainSolution& sol, const Site& z,
                  double b2) {
  return l_function(spec, domain, sol, std::span<const Site>(&z, 1), b2)[0];
}

std::vector<double> harmonic_extend(std::span<const PoissonKernelRow> rows,
                                    std::span<const std::pair<Site, double>> data) {
  std::vector<double> out;
  if (rows.empty()) return out;
  const auto& zs = rows[0].z;
  std::vector<std::size_t> pos;
  for (const auto& [z, v] : data) {
    auto it = std::find(zs.begin(), zs.end(), z);
    if (it == zs.end())
      throw DomainError("harmonic_extend: boundary datum outside the computed exterior window");
    if (v < 0.0) throw DomainError("harmonic_extend: boundary data must be non-negative");
    pos.push_back(static_cast<std::size_t>(it - zs.begin()));
  }
  for (const auto& row : rows) {
    double f = 0.0;
    for (std::size_t i = 0; i < pos.size(); ++i) f += data[i].second * row.k[pos[i]];
    out.push_back(f);
  }
  return out;
}

Eigen::VectorXd harmonic_extension_on_domain(const FiniteDomain& domain, const DomainSolution& sol,
                                             const StepLaw& law, std::span<const std::pair<Site, double>> data) {
  const auto& pts = domain.points();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pts.size()));
  for (const auto& [z, val] : data) {
    if (domain.contains(z)) throw DomainError("harmonic extension: boundary datum inside the domain");
    for (std::size_t y = 0; y < pts.size(); ++y) {
      const Site dz = z - pts[y];
      if (!law.grid.contains(dz)) throw SizingError("harmonic extension: datum beyond the step-law box");
      v(static_cast<Eigen::Index>(y)) += val * law.at(dz);
    }
  }
  return sol.G * v;
}

HarnackReport harnack_ratio(const FiniteDomain& domain, const DomainSolution& sol, const StepLaw& law, double a,
                            std::span<const Site> z0_family) {
  if (!(a > 0.0 && a < 1.0)) throw DomainError("harnack_ratio: a must lie in (0,1)");
  HarnackReport rep;
  rep.n = domain.radius();
  rep.a = a;
  const auto inner = domain.within(a * domain.radius());
  for (const Site& z0 : z0_family) {
    const std::pair<Site, double> datum[1] = {{z0, 1.0}};
    const Eigen::VectorXd f = harmonic_extension_on_domain(domain, sol, law, datum);
    HarnackEntry e;
    e.z0 = z0;
    e.sup = -std::numeric_limits<double>::infinity();
    e.inf = std::numeric_limits<double>::infinity();
    for (std::size_t k : inner) {
      e.sup = std::max(e.sup, f(static_cast<Eigen::Index>(k)));
      e.inf = std::min(e.inf, f(static_cast<Eigen::Index>(k)));
    }
    if (!(e.inf > 0.0)) throw NumericError("harnack_ratio: non-positive infimum signals a truncation problem");
    rep.max_ratio = std::max(rep.max_ratio, e.ratio());
    rep.entries.push_back(e);
  }
  return rep;
}

// ---------------------------------------------------------------- CSV

void write_eta_csv(std::ostream& os, const FiniteDomain& domain, const DomainSolution& sol) {
  const int d = domain.dim();
  for (int i = 0; i < d; ++i) os << kCoordNames[0][i] << ',';
  os << "eta\n" << std::setprecision(17);
  for (std::size_t k = 0; k < domain.size(); ++k) {
    write_site(os, d, domain.points()[k]);
    os << sol.eta(static_cast<Eigen::Index>(k)) << "\n";
  }
}

void write_ball_green_csv(std::ostream& os, const FiniteDomain& domain, const DomainSolution& sol,
                          std::span<const std::size_t> x_indices) {
  const int d = domain.dim();
  for (int i = 0; i < d; ++i) os << kCoordNames[0][i] << ',';
  static const char* ynames[3] = {"y1", "y2", "y3"};
  for (int i = 0; i < d; ++i) os << ynames[i] << ',';
  os << "G_B\n" << std::setprecision(17);
  for (std::size_t x : x_indices)
    for (std::size_t y = 0; y < domain.size(); ++y) {
      write_site(os, d, domain.points()[x]);
      write_site(os, d, domain.points()[y]);
      os << sol.G(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) << "\n";
    }
}

void write_poisson_csv(std::ostream& os, int d, std::span<const PoissonKernelRow> rows) {
  for (int i = 0; i < d; ++i) os << kCoordNames[0][i] << ',';
  for (int i = 0; i < d; ++i) os << kCoordNames[1][i] << ',';
  os << "K_B\n" << std::setprecision(17);
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.z.size(); ++i) {
      write_site(os, d, row.x);
      write_site(os, d, row.z[i]);
      os << row.k[i] << "\n";
    }
}

}  // namespace subwalk
