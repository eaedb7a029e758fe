#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace subwalk {

// Lattice point; coordinates beyond the active dimension are zero.
using Site = std::array<int, 3>;

double norm(const Site& x);
long long norm2(const Site& x);
int l1_norm(const Site& x);
int linf_norm(const Site& x);
bool parity_matches(long long m, const Site& x);
Site operator+(const Site& a, const Site& b);
Site operator-(const Site& a, const Site& b);

// Dense storage over the orthant [0, L]^d of a function symmetric under sign flips.
class OrthantGrid {
 public:
  OrthantGrid() = default;
  OrthantGrid(int d, int radius);
  int dim() const { return d_; }
  int radius() const { return radius_; }
  std::size_t size() const { return size_; }
  bool contains(const Site& x) const { return linf_norm(x) <= radius_; }
  std::size_t index(const Site& x) const;
  Site site(std::size_t idx) const;
  // Number of lattice points represented by an orthant entry (2^#nonzero coords).
  int multiplicity(std::size_t idx) const;

 private:
  int d_ = 1;
  int radius_ = 0;
  std::size_t size_ = 0;
};

// All sites of the ball |x| <= r, in lexicographic order.
std::vector<Site> ball_sites(int d, double r);

class KernelSlab {
 public:
  static constexpr std::size_t kDefaultMemoryCap = std::size_t{1} << 30;

  // Window radius defaults to m_max so nothing leaves the window.
  static KernelSlab build(int d, int m_max, int window_radius = -1,
                          std::size_t memory_cap = kDefaultMemoryCap);

  int dim() const { return grid_.dim(); }
  int m_max() const { return m_max_; }
  int window_radius() const { return grid_.radius(); }
  const OrthantGrid& grid() const { return grid_; }
  double operator()(int m, const Site& x) const;
  double lost_mass(int m) const { return lost_[m]; }
  const double* row(int m) const { return table_.data() + static_cast<std::size_t>(m) * grid_.size(); }

  void save(const std::string& path) const;
  static KernelSlab load(const std::string& path);

 private:
  OrthantGrid grid_;
  int m_max_ = 0;
  std::vector<double> table_;
  std::vector<double> lost_;
};

// Closed-form simple random walk probabilities P(Z_m = x).
double srw_probability_1d(long long m, long long k);
double srw_probability(int d, long long m, const Site& x);

// One-dimensional row p1(m, k) for k in [0, kmax]; entry k holds P(Z_m = k).
void srw_row_1d(long long m, int kmax, std::vector<double>& out);

// Sum_{m=0}^{M} w[m] p(m, x) over the orthant grid of radius L.
// Uses the closed-form kernel, so the sum is exact for every m regardless of L.
std::vector<double> weighted_kernel_sum(int d, std::span<const double> weights, int radius);

// Parity-corrected local limit density 2 (d/(2 pi m))^{d/2} exp(-d|x|^2/(2m)).
double lclt_density(int d, double m, const Site& x);

// sup_m m^{d/2} sup_x p(m, x); the local limit value approached from below.
double kernel_sup_constant(int d);

// sup over sampled m in [m_lo, m_hi] and |x|_inf <= radius of m^{(d+2)/2} |p - q|.
double lclt_error_constant(int d, int m_lo, int m_hi, int radius, int samples = 24);

// (1/d) sum cos(theta_i).
double char_function(std::span<const double> theta);

struct GaussianBoundReport {
  double c_prime = 0.0;       // upper constant C' at the fitted C
  double c_exponent = 0.0;    // fitted C in exp(-|z|^2/(C m))
  long upper_violations = 0;
  double c7_at_060 = 0.0;     // min of m^{d/2} p(m,z) on even points with |z| <= m^0.6
  double c7_at_065 = 0.0;
  double c8_odd = 0.0;        // min of m^{d/2} p(m,z) on odd points with |z| <= m^0.5
  long lower_violations = 0;  // entries that are zero where the lower bounds assert positivity
  long parity_violations = 0;
  int m_start = 1;
};

// Lower-bound scans start at m_start to skip the trivial small-m regime where |z| <= m^0.6 is empty.
GaussianBoundReport gaussian_bound_check(const KernelSlab& slab, int m_start = 2);

}  // namespace subwalk
