// Smooth partition of unity on a lattice of cubes: the scalar bump with an
// exact plateau, the normalized grid partition eta_g at density mu, measured
// derivative-bound constants, and the vertical interface cutoff.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

#include "carleman/errors.hpp"
#include "carleman/tolerances.hpp"

namespace carleman {

namespace detail {

// s(x) = exp(-1/x) for x > 0, else 0; the standard smooth step ingredient.
inline double smooth_s(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
inline double smooth_s1(double x) {
  if (x <= 0.0) return 0.0;
  const double s = std::exp(-1.0 / x);
  return s / (x * x);
}
inline double smooth_s2(double x) {
  if (x <= 0.0) return 0.0;
  const double s = std::exp(-1.0 / x);
  return s * (1.0 - 2.0 * x) / (x * x * x * x);
}

// T(x) = s(x) / (s(x) + s(1-x)): 0 for x <= 0, 1 for x >= 1, smooth.
inline double smooth_T(double x) {
  const double u = smooth_s(x), v = smooth_s(1.0 - x);
  return u / (u + v);
}
inline double smooth_T1(double x) {
  const double u = smooth_s(x), v = smooth_s(1.0 - x);
  const double up = smooth_s1(x), vp = -smooth_s1(1.0 - x);
  const double g = u + v;
  return (up * v - u * vp) / (g * g);
}
inline double smooth_T2(double x) {
  const double u = smooth_s(x), v = smooth_s(1.0 - x);
  const double up = smooth_s1(x), vp = -smooth_s1(1.0 - x);
  const double us = smooth_s2(x), vs = smooth_s2(1.0 - x);
  const double g = u + v, gp = up + vp;
  const double num = (us * v - u * vs) * g - 2.0 * gp * (up * v - u * vp);
  return num / (g * g * g);
}

}  // namespace detail

// theta0(t) = T(3 - 2|t|): exactly 1 on [-1, 1], exactly 0 outside
// (-3/2, 3/2), C-infinity everywhere (the |t| kink sits in the plateau).
inline double bump(double t) { return detail::smooth_T(3.0 - 2.0 * std::abs(t)); }

inline double bump_deriv(double t, int order) {
  switch (order) {
    case 0:
      return bump(t);
    case 1: {
      if (t == 0.0) return 0.0;
      const double sgn = t > 0.0 ? 1.0 : -1.0;
      return detail::smooth_T1(3.0 - 2.0 * std::abs(t)) * (-2.0 * sgn);
    }
    case 2:
      return detail::smooth_T2(3.0 - 2.0 * std::abs(t)) * 4.0;
    default:
      throw invalid_input_error("bump_deriv: only orders 0, 1, 2 are supported");
  }
}

struct PartitionAudit {
  double max_sum_defect = 0.0;  // max |sum_g eta_g - 1| over the audit grid
  bool support_ok = false;      // eta_g vanishes outside Q_{3/(2 mu)}(g / mu)
  double C1 = 0.0;              // max_k max |D^k theta_g| / mu^k, k = 0, 1, 2
  double C2 = 0.0;              // same for theta_bar; also checks theta_bar >= 1
  double C3 = 0.0;              // same for eta_g
  double theta_bar_min = 0.0;
  int overlap_count = 0;        // lattice neighbors with overlapping support
  bool pass = false;
};

// Lattice partition at density mu on a box: theta_g(x) = prod theta0(mu x_j - g_j),
// theta_bar = sum over the full lattice (separable, at most three terms per
// axis), eta_g = theta_g / theta_bar.
class PartitionGrid {
 public:
  PartitionGrid(double mu, int d, std::vector<double> lo, std::vector<double> hi)
      : mu_(mu), d_(d), lo_(std::move(lo)), hi_(std::move(hi)) {
    if (!(mu_ >= 1.0)) throw invalid_input_error("PartitionGrid: mu must be >= 1");
    if (d_ < 1 || lo_.size() != static_cast<size_t>(d_) ||
        hi_.size() != static_cast<size_t>(d_))
      throw dimension_error("PartitionGrid: box does not match dimension");
    for (int j = 0; j < d_; ++j)
      if (!(lo_[j] < hi_[j]))
        throw invalid_input_error("PartitionGrid: empty box");
    g_lo_.resize(d_);
    g_hi_.resize(d_);
    for (int j = 0; j < d_; ++j) {
      g_lo_[j] = static_cast<long>(std::ceil(mu_ * lo_[j] - 1.5));
      g_hi_[j] = static_cast<long>(std::floor(mu_ * hi_[j] + 1.5));
    }
  }

  double mu() const { return mu_; }
  int dim() const { return d_; }
  const std::vector<long>& index_lo() const { return g_lo_; }
  const std::vector<long>& index_hi() const { return g_hi_; }
  std::vector<double> center(const std::vector<long>& g) const {
    std::vector<double> c(d_);
    for (int j = 0; j < d_; ++j) c[j] = g[j] / mu_;
    return c;
  }

  double theta(const std::vector<long>& g, const std::vector<double>& x) const {
    double p = 1.0;
    for (int j = 0; j < d_; ++j) {
      p *= bump(mu_ * x[j] - g[j]);
      if (p == 0.0) return 0.0;
    }
    return p;
  }

  // Full-lattice sum; separability reduces it to a product of per-axis sums
  // with at most three integer translates each.
  double theta_bar(const std::vector<double>& x) const {
    double p = 1.0;
    for (int j = 0; j < d_; ++j) p *= axis_sum(mu_ * x[j]);
    return p;
  }

  double eta(const std::vector<long>& g, const std::vector<double>& x) const {
    const double t = theta(g, x);
    return t == 0.0 ? 0.0 : t / theta_bar(x);
  }

  // Sum over every lattice index whose support can reach x; equals 1 by
  // construction, re-derived here without using that identity.
  double eta_sum(const std::vector<double>& x) const {
    std::vector<long> g(d_, 0);
    double total = 0.0;
    accumulate_eta(x, 0, g, total);
    return total;
  }

 private:
  double axis_sum(double y) const {
    const long m_lo = static_cast<long>(std::ceil(y - 1.5));
    const long m_hi = static_cast<long>(std::floor(y + 1.5));
    double s = 0.0;
    for (long m = m_lo; m <= m_hi; ++m) s += bump(y - m);
    return s;
  }

  void accumulate_eta(const std::vector<double>& x, int axis, std::vector<long>& g,
                      double& total) const {
    if (axis == d_) {
      total += eta(g, x);
      return;
    }
    const long m_lo = static_cast<long>(std::ceil(mu_ * x[axis] - 1.5));
    const long m_hi = static_cast<long>(std::floor(mu_ * x[axis] + 1.5));
    for (long m = m_lo; m <= m_hi; ++m) {
      g[axis] = m;
      accumulate_eta(x, axis + 1, g, total);
    }
  }

  double mu_;
  int d_;
  std::vector<double> lo_, hi_;
  std::vector<long> g_lo_, g_hi_;
};

namespace detail {

// Central finite differences at step 1e-4 / mu; k = 1 first derivative along
// an axis, k = 2 second derivative along an axis pair.
template <class F>
double fd1(const F& f, std::vector<double> x, int j, double h) {
  x[j] += h;
  const double fp = f(x);
  x[j] -= 2.0 * h;
  const double fm = f(x);
  return (fp - fm) / (2.0 * h);
}

template <class F>
double fd2(const F& f, std::vector<double> x, int j, int l, double h) {
  if (j == l) {
    const double f0 = f(x);
    x[j] += h;
    const double fp = f(x);
    x[j] -= 2.0 * h;
    const double fm = f(x);
    return (fp - 2.0 * f0 + fm) / (h * h);
  }
  double acc = 0.0;
  for (int sj : {1, -1})
    for (int sl : {1, -1}) {
      auto y = x;
      y[j] += sj * h;
      y[l] += sl * h;
      acc += sj * sl * f(y);
    }
  return acc / (4.0 * h * h);
}

template <class F>
double scaled_deriv_sup(const F& f, const std::vector<std::vector<double>>& pts,
                        int d, double mu, double h) {
  double c = 0.0;
  for (const auto& x : pts) {
    c = std::max(c, std::abs(f(x)));
    for (int j = 0; j < d; ++j) c = std::max(c, std::abs(fd1(f, x, j, h)) / mu);
    for (int j = 0; j < d; ++j)
      for (int l = j; l < d; ++l)
        c = std::max(c, std::abs(fd2(f, x, j, l, h)) / (mu * mu));
  }
  return c;
}

}  // namespace detail

// Measures the partition bounds on a uniform audit grid: sum-to-one defect,
// support containment of one interior bump, the scaled derivative constants
// for theta_g / theta_bar / eta_g, and the support-overlap cardinality 5^d.
inline PartitionAudit audit_partition(const PartitionGrid& grid, int points_per_axis = 9) {
  const int d = grid.dim();
  const double mu = grid.mu();
  const double h = 1e-4 / mu;

  // Center the probe bump at a lattice point interior to the index box.
  std::vector<long> g0(d);
  for (int j = 0; j < d; ++j)
    g0[j] = (grid.index_lo()[j] + grid.index_hi()[j]) / 2;
  const auto c0 = grid.center(g0);

  // Audit points: a uniform grid on the cube of half width 2/mu around the
  // probe center (covers the bump's support and its surroundings), plus the
  // same grid shifted off-lattice by a third of a cell.
  std::vector<std::vector<double>> pts;
  std::vector<double> x(d, 0.0);
  const int ppa = std::max(3, points_per_axis);
  std::vector<int> idx(d, 0);
  while (true) {
    for (int j = 0; j < d; ++j)
      x[j] = c0[j] + (-2.0 + 4.0 * idx[j] / (ppa - 1)) / mu;
    pts.push_back(x);
    int j = 0;
    while (j < d && ++idx[j] == ppa) idx[j++] = 0;
    if (j == d) break;
  }
  {
    const size_t base = pts.size();
    for (size_t i = 0; i < base; ++i) {
      auto y = pts[i];
      for (int j = 0; j < d; ++j) y[j] += 1.0 / (3.0 * mu);
      pts.push_back(y);
    }
  }

  PartitionAudit audit;
  audit.theta_bar_min = std::numeric_limits<double>::infinity();
  audit.support_ok = true;
  for (const auto& p : pts) {
    audit.max_sum_defect = std::max(audit.max_sum_defect, std::abs(grid.eta_sum(p) - 1.0));
    audit.theta_bar_min = std::min(audit.theta_bar_min, grid.theta_bar(p));
    bool outside = false;
    for (int j = 0; j < d; ++j)
      if (std::abs(p[j] - c0[j]) >= 1.5 / mu) outside = true;
    if (outside && grid.eta(g0, p) != 0.0) audit.support_ok = false;
  }

  const auto f_theta = [&](const std::vector<double>& y) { return grid.theta(g0, y); };
  const auto f_bar = [&](const std::vector<double>& y) { return grid.theta_bar(y); };
  const auto f_eta = [&](const std::vector<double>& y) { return grid.eta(g0, y); };
  audit.C1 = detail::scaled_deriv_sup(f_theta, pts, d, mu, h);
  audit.C2 = detail::scaled_deriv_sup(f_bar, pts, d, mu, h);
  audit.C3 = detail::scaled_deriv_sup(f_eta, pts, d, mu, h);

  // Open supports Q_{3/(2mu)} overlap iff every index offset is at most 2.
  audit.overlap_count = 0;
  std::vector<long> off(d, -2);
  while (true) {
    bool overlaps = true;
    for (int j = 0; j < d; ++j)
      if (std::labs(off[j]) > 2) overlaps = false;
    if (overlaps) ++audit.overlap_count;
    int j = 0;
    while (j < d && ++off[j] == 3) off[j++] = -2;
    if (j == d) break;
  }

  const bool card_ok = [&] {
    int expect = 1;
    for (int j = 0; j < d; ++j) expect *= 5;
    return audit.overlap_count == expect;
  }();
  audit.pass = audit.max_sum_defect <= tol().sum_to_one && audit.support_ok &&
               audit.theta_bar_min >= 1.0 - 1e-12 && card_ok &&
               std::isfinite(audit.C1) && std::isfinite(audit.C2) &&
               std::isfinite(audit.C3) && audit.C1 >= 1.0 && audit.C2 >= 1.0 &&
               audit.C3 >= 0.999;
  return audit;
}

inline PartitionGrid build_partition(double mu, int d, const std::vector<double>& lo,
                                     const std::vector<double>& hi) {
  return PartitionGrid(mu, d, lo, hi);
}

// Interface cutoff in the normal variable: eta_mu(x_n) = theta0(mu x_n) is 1
// on |x_n| <= 1/mu and 0 outside |x_n| < 3/(2 mu). The induced split of a
// field is u = eta_mu u + (1 - eta_mu) u; the first factor keeps the traces.
struct VerticalCutoff {
  double mu = 0.0;
  double near(double x_n) const { return bump(mu * x_n); }
  double far(double x_n) const { return 1.0 - bump(mu * x_n); }
};

inline VerticalCutoff vertical_cutoff(double mu, double r0) {
  if (!(mu >= 1.0)) throw invalid_input_error("vertical_cutoff: mu must be >= 1");
  if (!(2.0 / mu < r0))
    throw constraint_error("vertical_cutoff: 2/mu must be smaller than the field radius");
  return VerticalCutoff{mu};
}

}  // namespace carleman
