// Uniform tensor grids on the box [-rho, rho]^n with the interface {x_n = 0}
// as a node layer. A field is a pair of smooth per-side extensions stored on
// the full box; integrals restrict each side to its half box, so every finite
// difference stencil stays interior.
//
// Index layout: the normal axis is the slowest index, so the interface slice
// is one contiguous block of tangential nodes.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "carleman/coefficients.hpp"
#include "carleman/errors.hpp"

namespace carleman {

struct GridSpec {
  int n = 0;         // space dimension
  double rho = 0.0;  // half width of the box
  double h = 0.0;    // node spacing
  int m = 0;         // rho / h; nodes per axis = 2m + 1
  long axis_nodes = 0;
  long tangential_size = 0;  // (2m+1)^(n-1)
  long total_size = 0;       // (2m+1)^n

  static GridSpec make(int n, double rho, double h) {
    if (n < 2) throw dimension_error("GridSpec: dimension must be at least 2");
    if (!(rho > 0.0) || !(h > 0.0)) throw invalid_input_error("GridSpec: rho, h > 0");
    const double ratio = rho / h;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * ratio || rounded < 4)
      throw invalid_input_error("GridSpec: rho must be an integer multiple (>= 4) of h");
    GridSpec s;
    s.n = n;
    s.rho = rho;
    s.h = h;
    s.m = static_cast<int>(rounded);
    s.axis_nodes = 2L * s.m + 1;
    s.tangential_size = 1;
    for (int j = 0; j + 1 < n; ++j) s.tangential_size *= s.axis_nodes;
    s.total_size = s.tangential_size * s.axis_nodes;
    return s;
  }

  double coord(long i) const { return -rho + h * static_cast<double>(i); }

  // Linear index from per-axis indices; axis n-1 (normal) is slowest.
  long index(const std::vector<long>& i) const {
    long t = 0;
    for (int j = 0; j + 1 < n; ++j) t = t * axis_nodes + i[j];
    return i[n - 1] * tangential_size + t;
  }

  void unindex(long idx, std::vector<long>& i) const {
    i.resize(n);
    i[n - 1] = idx / tangential_size;
    long t = idx % tangential_size;
    for (int j = n - 2; j >= 0; --j) {
      i[j] = t % axis_nodes;
      t /= axis_nodes;
    }
  }

  void node(long idx, std::vector<double>& x) const {
    thread_local std::vector<long> i;
    unindex(idx, i);
    x.resize(n);
    for (int j = 0; j < n; ++j) x[j] = coord(i[j]);
  }

  long interface_layer() const { return m; }  // i_n with x_n = 0

  long tangential_index(const std::vector<long>& i) const {
    long t = 0;
    for (int j = 0; j + 1 < n; ++j) t = t * axis_nodes + i[j];
    return t;
  }

  void tangential_unindex(long t, std::vector<long>& i) const {
    i.resize(n - 1);
    for (int j = n - 2; j >= 0; --j) {
      i[j] = t % axis_nodes;
      t /= axis_nodes;
    }
  }

  void tangential_node(long t, std::vector<double>& xp) const {
    thread_local std::vector<long> i;
    tangential_unindex(t, i);
    xp.resize(n - 1);
    for (int j = 0; j + 1 < n; ++j) xp[j] = coord(i[j]);
  }
};

struct GridField {
  GridSpec spec;
  std::vector<cplx> plus, minus;  // per-side smooth extensions on the full box
  double support_radius = 0.0;

  const std::vector<cplx>& side(Side s) const { return s == Side::plus ? plus : minus; }
  std::vector<cplx>& side(Side s) { return s == Side::plus ? plus : minus; }
};

namespace detail {

// Compactly supported radial profile (1 - t^2)^8 for |t| < 1: C^7 across the
// support edge, and polynomial so the weighted Laplace shell at large tau
// stays resolvable by a second order grid.
inline double poly_profile(double t) {
  const double s = 1.0 - t * t;
  if (s <= 0.0) return 0.0;
  const double s2 = s * s;
  const double s4 = s2 * s2;
  return s4 * s4;
}

// Classic exponential bump exp(1 - 1/(1 - t^2)) on |t| < 1, value 1 at 0.
inline double exp_profile(double t) {
  const double s = 1.0 - t * t;
  if (s <= 0.0) return 0.0;
  return std::exp(1.0 - 1.0 / s);
}

inline double radial(const std::vector<double>& xp, double scale, bool poly) {
  double r2 = 0.0;
  for (double c : xp) r2 += c * c;
  const double t = std::sqrt(r2) / scale;
  return poly ? poly_profile(t) : exp_profile(t);
}

}  // namespace detail

// Synthesized test fields: tangential radial bump b(x') times a vertical
// profile w(x_n) (with w(0) = 1, w'(0) = 0) times a per-side quadratic
// c0 + c1 x_n + c2 x_n^2. The quadratic's c0/c1 set the interface traces and
// conormal fluxes exactly; c2 only adds interior body.
//
// Families:
//   bump_poly   polynomial profile; c0+ = h0_amp, c1+ = h1_amp / a_nn(+),
//               minus side carries body through c2 only
//   bump_gauss  same layout with the exponential profile
//   matched     equal traces and equal conormal fluxes: h0 = h1 = 0 exactly
//               when the normal coefficient column is (0, ..., 0, a_nn)
//   offset_bump plus-side bump centered at x_n = 0.6 r_s, width 0.35 r_s,
//               minus side zero: vanishes near the interface
struct FieldSpec {
  std::string family = "bump_poly";
  double support_radius = 0.0;  // 0 selects 0.8 * rho
  cplx h0_amp{1.0, 0.0};
  cplx h1_amp{1.0, 0.0};
};

inline GridField synthesize_field(const GridSpec& spec, const FieldSpec& fs,
                                  const CoefficientPair& pair) {
  const int n = spec.n;
  const double rs = fs.support_radius > 0.0 ? fs.support_radius : 0.8 * spec.rho;
  if (!(rs <= spec.rho - 2.0 * spec.h))
    throw support_error("synthesize_field: support radius " + std::to_string(rs) +
                        " leaves fewer than 2 vanishing boundary cells");

  const bool poly = fs.family != "bump_gauss";
  cplx c0p{}, c1p{}, c2p{}, c0m{}, c1m{}, c2m{};
  bool offset = false;
  if (fs.family == "bump_poly" || fs.family == "bump_gauss") {
    c0p = fs.h0_amp;
    c1p = fs.h1_amp / pair.plus.a_nn();
    c2p = cplx(0.5, 0.0);
    c2m = cplx(1.0, 0.0);
  } else if (fs.family == "matched") {
    c0p = c0m = cplx(1.0, 0.0);
    c1p = cplx(1.0, 0.0) / pair.plus.a_nn();
    c1m = cplx(1.0, 0.0) / pair.minus.a_nn();
    c2p = cplx(0.5, 0.0);
    c2m = cplx(1.0, 0.0);
  } else if (fs.family == "offset_bump") {
    offset = true;
  } else {
    throw invalid_input_error("synthesize_field: unknown family " + fs.family);
  }

  GridField f;
  f.spec = spec;
  f.support_radius = rs;
  f.plus.assign(spec.total_size, cplx{});
  f.minus.assign(spec.total_size, cplx{});

  std::vector<double> x;
  std::vector<double> xp(n - 1);
  for (long idx = 0; idx < spec.total_size; ++idx) {
    spec.node(idx, x);
    for (int j = 0; j + 1 < n; ++j) xp[j] = x[j];
    const double xn = x[n - 1];
    const double b = detail::radial(xp, rs, poly);
    if (offset) {
      const double v = (poly ? detail::poly_profile((xn - 0.6 * rs) / (0.35 * rs))
                             : detail::exp_profile((xn - 0.6 * rs) / (0.35 * rs)));
      f.plus[idx] = b * v;
      continue;
    }
    const double w = poly ? detail::poly_profile(xn / rs) : detail::exp_profile(xn / rs);
    const double bw = b * w;
    f.plus[idx] = bw * (c0p + c1p * xn + c2p * xn * xn);
    f.minus[idx] = bw * (c0m + c1m * xn + c2m * xn * xn);
  }
  return f;
}

// Central differences on one side's extension, zero beyond the box (the
// support invariant keeps real data two cells clear of the boundary).
// Multi-index as per-axis orders, |k| <= 2.
inline std::vector<cplx> derivative(const GridField& f, Side side,
                                    const std::vector<int>& k) {
  const GridSpec& s = f.spec;
  if (static_cast<int>(k.size()) != s.n)
    throw dimension_error("derivative: multi-index length must equal the dimension");
  int order = 0;
  for (int v : k) {
    if (v < 0) throw invalid_input_error("derivative: negative multi-index entry");
    order += v;
  }
  if (order > 2) throw invalid_input_error("derivative: only |k| <= 2 is supported");

  const std::vector<cplx>& u = f.side(side);
  if (order == 0) return u;

  // strides per axis in the linear index
  std::vector<long> stride(s.n);
  stride[s.n - 1] = s.tangential_size;
  long acc = 1;
  for (int j = s.n - 2; j >= 0; --j) {
    stride[j] = acc;
    acc *= s.axis_nodes;
  }

  auto shifted = [&](long idx, const std::vector<long>& i, int axis, int off) -> cplx {
    const long pos = i[axis] + off;
    if (pos < 0 || pos >= s.axis_nodes) return cplx{};
    return u[idx + off * stride[axis]];
  };

  std::vector<cplx> out(s.total_size);
  std::vector<long> i;
  int a1 = -1, a2 = -1;
  for (int j = 0; j < s.n; ++j)
    for (int c = 0; c < k[j]; ++c) {
      if (a1 < 0)
        a1 = j;
      else
        a2 = j;
    }

  const double h = s.h;
  for (long idx = 0; idx < s.total_size; ++idx) {
    s.unindex(idx, i);
    if (order == 1) {
      out[idx] = (shifted(idx, i, a1, +1) - shifted(idx, i, a1, -1)) / (2.0 * h);
    } else if (a1 == a2) {
      out[idx] = (shifted(idx, i, a1, +1) - 2.0 * u[idx] + shifted(idx, i, a1, -1)) /
                 (h * h);
    } else {
      auto corner = [&](int o1, int o2) -> cplx {
        const long p1 = i[a1] + o1, p2 = i[a2] + o2;
        if (p1 < 0 || p1 >= s.axis_nodes || p2 < 0 || p2 >= s.axis_nodes) return cplx{};
        return u[idx + o1 * stride[a1] + o2 * stride[a2]];
      };
      out[idx] = (corner(+1, +1) - corner(+1, -1) - corner(-1, +1) + corner(-1, -1)) /
                 (4.0 * h * h);
    }
  }
  return out;
}

// Trapezoid weight of a node for integration over the side's half box:
// product of per-axis weights, 1/2 at the interface layer and box ends.
inline double half_box_weight(const GridSpec& s, const std::vector<long>& i, Side side) {
  const long in = i[s.n - 1];
  if (side == Side::plus && in < s.m) return 0.0;
  if (side == Side::minus && in > s.m) return 0.0;
  double w = 1.0;
  for (int j = 0; j + 1 < s.n; ++j)
    if (i[j] == 0 || i[j] == s.axis_nodes - 1) w *= 0.5;
  if (in == s.m || in == 0 || in == s.axis_nodes - 1) w *= 0.5;
  return w;
}

// h^n * sum of w_i * f(idx) over the side's half box.
template <class F>
double integrate_half(const GridSpec& s, Side side, F&& f) {
  double acc = 0.0;
  std::vector<long> i;
  const long lo = side == Side::plus ? s.m : 0;
  const long hi = side == Side::plus ? s.axis_nodes - 1 : s.m;
  for (long in = lo; in <= hi; ++in) {
    for (long t = 0; t < s.tangential_size; ++t) {
      const long idx = in * s.tangential_size + t;
      s.unindex(idx, i);
      const double w = half_box_weight(s, i, side);
      if (w != 0.0) acc += w * f(idx);
    }
  }
  double cell = 1.0;
  for (int j = 0; j < s.n; ++j) cell *= s.h;
  return acc * cell;
}

// Tangential trapezoid integral over the interface layer.
template <class F>
double integrate_interface(const GridSpec& s, F&& f) {
  double acc = 0.0;
  std::vector<long> i;
  for (long t = 0; t < s.tangential_size; ++t) {
    s.tangential_unindex(t, i);
    double w = 1.0;
    for (int j = 0; j + 1 < s.n; ++j)
      if (i[j] == 0 || i[j] == s.axis_nodes - 1) w *= 0.5;
    acc += w * f(t);
  }
  double cell = 1.0;
  for (int j = 0; j + 1 < s.n; ++j) cell *= s.h;
  return acc * cell;
}

// Interface slice of one side (contiguous by the index layout).
inline std::vector<cplx> trace_slice(const GridField& f, Side side) {
  const GridSpec& s = f.spec;
  const long off = s.interface_layer() * s.tangential_size;
  const auto& u = f.side(side);
  return std::vector<cplx>(u.begin() + off, u.begin() + off + s.tangential_size);
}

inline std::vector<cplx> slice_at_interface(const GridSpec& s, const std::vector<cplx>& u) {
  const long off = s.interface_layer() * s.tangential_size;
  return std::vector<cplx>(u.begin() + off, u.begin() + off + s.tangential_size);
}

struct JumpData {
  std::vector<cplx> h0, h1;  // tangential arrays on the interface layer
};

// h0 = u+ - u- and h1 = sum_j a_nj(+) d_j u+ - sum_j a_nj(-) d_j u- at
// x_n = 0, the conormal direction being e_n. Coefficients are either the
// frozen matrices or, when spatial, the pair's field evaluated at (x', 0).
inline JumpData jump_data(const GridField& f, const ComplexSymmetricMatrix& a_plus,
                          const ComplexSymmetricMatrix& a_minus) {
  const GridSpec& s = f.spec;
  const int n = s.n;
  JumpData jd;
  jd.h0.resize(s.tangential_size);
  jd.h1.assign(s.tangential_size, cplx{});

  const auto up = trace_slice(f, Side::plus);
  const auto um = trace_slice(f, Side::minus);
  for (long t = 0; t < s.tangential_size; ++t) jd.h0[t] = up[t] - um[t];

  std::vector<int> k(n, 0);
  for (int j = 0; j < n; ++j) {
    k.assign(n, 0);
    k[j] = 1;
    const auto dp = slice_at_interface(s, derivative(f, Side::plus, k));
    const auto dm = slice_at_interface(s, derivative(f, Side::minus, k));
    const cplx ap = a_plus.a(n - 1, j), am = a_minus.a(n - 1, j);
    for (long t = 0; t < s.tangential_size; ++t) jd.h1[t] += ap * dp[t] - am * dm[t];
  }
  return jd;
}

inline JumpData jump_data(const GridField& f, const CoefficientPair& pair, bool spatial) {
  if (!spatial || !pair.spatial_field) return jump_data(f, pair.plus, pair.minus);

  const GridSpec& s = f.spec;
  const int n = s.n;
  JumpData jd;
  jd.h0.resize(s.tangential_size);
  jd.h1.assign(s.tangential_size, cplx{});

  const auto up = trace_slice(f, Side::plus);
  const auto um = trace_slice(f, Side::minus);
  std::vector<std::vector<cplx>> dp(n), dm(n);
  std::vector<int> k(n, 0);
  for (int j = 0; j < n; ++j) {
    k.assign(n, 0);
    k[j] = 1;
    dp[j] = slice_at_interface(s, derivative(f, Side::plus, k));
    dm[j] = slice_at_interface(s, derivative(f, Side::minus, k));
  }
  std::vector<double> x(n, 0.0);
  std::vector<double> xp;
  for (long t = 0; t < s.tangential_size; ++t) {
    jd.h0[t] = up[t] - um[t];
    s.tangential_node(t, xp);
    for (int j = 0; j + 1 < n; ++j) x[j] = xp[j];
    x[n - 1] = 0.0;
    const auto [ap, am] = pair.spatial_field(x);
    for (int j = 0; j < n; ++j)
      jd.h1[t] += ap.a(n - 1, j) * dp[j][t] - am.a(n - 1, j) * dm[j][t];
  }
  return jd;
}

}  // namespace carleman
