// Complex symmetric coefficient matrices a_lj = M_lj + i*gamma*N_lj for the
// two sides of the interface {x_n = 0}, hypothesis validation by eigenvalue
// bracketing, and the derived constants (lambda-tildes, gamma threshold).
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "carleman/errors.hpp"
#include "carleman/tolerances.hpp"

namespace carleman {

using cplx = std::complex<double>;

enum class Side { plus, minus };

// Side index convention: k = 1 is the x_n < 0 side, k = 2 is x_n > 0.
inline Side side_from_k(int k) {
  if (k == 1) return Side::minus;
  if (k == 2) return Side::plus;
  throw invalid_input_error("side index must be 1 or 2");
}

struct ComplexSymmetricMatrix {
  int n = 0;
  std::vector<double> M;  // row-major n*n, real symmetric
  std::vector<double> N;  // row-major n*n, real symmetric
  double gamma = 0.0;

  cplx a(int l, int j) const { return {M[l * n + j], gamma * N[l * n + j]}; }
  cplx a_nn() const { return a(n - 1, n - 1); }
};

inline ComplexSymmetricMatrix scaled(const ComplexSymmetricMatrix& m, double c) {
  ComplexSymmetricMatrix out = m;
  for (auto& v : out.M) v *= c;
  for (auto& v : out.N) v *= c;
  return out;
}

struct CoefficientPair {
  ComplexSymmetricMatrix plus;   // x_n > 0
  ComplexSymmetricMatrix minus;  // x_n < 0
  double lambda0 = 0.0;          // 0 means "infer from the matrices"
  double Lambda0 = 0.0;
  double M0 = 0.0;  // Lipschitz constant of the spatial field, 0 if constant

  // Optional spatially varying field x -> (A_plus(x), A_minus(x)). When absent
  // the pair is constant and all coefficient modes coincide.
  std::function<std::pair<ComplexSymmetricMatrix, ComplexSymmetricMatrix>(
      const std::vector<double>&)>
      spatial_field;

  const ComplexSymmetricMatrix& side(Side s) const {
    return s == Side::plus ? plus : minus;
  }
  int dim() const { return plus.n; }
};

struct DerivedConstants {
  double lambda0 = 0.0;        // ellipticity bracket used to derive the rest
  double Lambda0 = 0.0;
  double lambda_tilde1 = 0.0;  // lambda0^2 / Lambda0^2, in (0, 1]
  double lambda_tilde2 = 0.0;  // sqrt(n) * Lambda0^2 / lambda0^2, >= 1
  double gamma0 = 0.0;         // imaginary-part smallness threshold, > 0
};

// gamma0 = sqrt(2) lambda0^5 / (Lambda0^3 sqrt(n lambda0^4 + n^2 Lambda0^4)).
// Homogeneous of degree 0 under a common scaling of (lambda0, Lambda0).
inline double gamma_threshold(double lambda0, double Lambda0, int n) {
  if (!(lambda0 > 0.0) || !(Lambda0 > 0.0) || lambda0 > Lambda0 || n < 2)
    throw invalid_input_error("gamma_threshold needs 0 < lambda0 <= Lambda0, n >= 2");
  const double l4 = lambda0 * lambda0 * lambda0 * lambda0;
  const double L4 = Lambda0 * Lambda0 * Lambda0 * Lambda0;
  const double den = Lambda0 * Lambda0 * Lambda0 *
                     std::sqrt(static_cast<double>(n) * l4 +
                               static_cast<double>(n) * static_cast<double>(n) * L4);
  return std::sqrt(2.0) * lambda0 * lambda0 * lambda0 * lambda0 * lambda0 / den;
}

inline DerivedConstants derived_constants(double lambda0, double Lambda0, int n) {
  DerivedConstants d;
  d.lambda0 = lambda0;
  d.Lambda0 = Lambda0;
  d.lambda_tilde1 = (lambda0 * lambda0) / (Lambda0 * Lambda0);
  d.lambda_tilde2 = std::sqrt(static_cast<double>(n)) * (Lambda0 * Lambda0) /
                    (lambda0 * lambda0);
  d.gamma0 = gamma_threshold(lambda0, Lambda0, n);
  return d;
}

struct SideValidation {
  double symmetry_defect_M = 0.0;
  double symmetry_defect_N = 0.0;
  double eig_min_M = 0.0, eig_max_M = 0.0;
  double eig_min_N = 0.0, eig_max_N = 0.0;
  bool pass = false;
};

struct ValidationReport {
  SideValidation plus, minus;
  double lambda0_used = 0.0;
  double Lambda0_used = 0.0;
  bool bounds_inferred = false;
  // Smallest (eig_min - lambda0) and (Lambda0 - eig_max) across sides/matrices.
  double worst_lower_margin = 0.0;
  double worst_upper_margin = 0.0;
  bool pass = false;
};

namespace detail {

inline void check_matrix_shape(const ComplexSymmetricMatrix& m, int n) {
  if (m.n != n || m.n < 2) throw dimension_error("matrix dimension mismatch");
  if (m.M.size() != static_cast<size_t>(n) * n ||
      m.N.size() != static_cast<size_t>(n) * n)
    throw dimension_error("matrix entry count does not match dimension");
  for (double v : m.M)
    if (!std::isfinite(v)) throw invalid_input_error("NaN/inf entry in M");
  for (double v : m.N)
    if (!std::isfinite(v)) throw invalid_input_error("NaN/inf entry in N");
  if (!std::isfinite(m.gamma) || m.gamma < 0.0)
    throw invalid_input_error("gamma must be finite and nonnegative");
}

inline std::pair<double, double> symmetric_eig_range(const std::vector<double>& a, int n) {
  Eigen::MatrixXd mat(n, n);
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j) mat(l, j) = a[static_cast<size_t>(l) * n + j];
  // Symmetrize before the solve so a tiny asymmetry cannot bias the range.
  Eigen::MatrixXd sym = 0.5 * (mat + mat.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const auto& ev = es.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

inline double symmetry_defect(const std::vector<double>& a, int n) {
  double d = 0.0;
  for (int l = 0; l < n; ++l)
    for (int j = l + 1; j < n; ++j)
      d = std::max(d, std::abs(a[l * n + j] - a[j * n + l]));
  return d;
}

}  // namespace detail

// Checks symmetry and the ellipticity bracketing of M and N on both sides.
// lambda0/Lambda0 of the pair may be zero, in which case the tightest
// bracketing values across sides and matrices are inferred and recorded.
inline ValidationReport validate(const CoefficientPair& pair) {
  const int n = pair.plus.n;
  detail::check_matrix_shape(pair.plus, n);
  detail::check_matrix_shape(pair.minus, n);
  if (pair.minus.gamma != pair.plus.gamma)
    throw invalid_input_error("gamma is a single per-pair scalar; per-side gamma rejected");

  ValidationReport rep;
  auto fill = [&](const ComplexSymmetricMatrix& m, SideValidation& sv) {
    sv.symmetry_defect_M = detail::symmetry_defect(m.M, n);
    sv.symmetry_defect_N = detail::symmetry_defect(m.N, n);
    std::tie(sv.eig_min_M, sv.eig_max_M) = detail::symmetric_eig_range(m.M, n);
    std::tie(sv.eig_min_N, sv.eig_max_N) = detail::symmetric_eig_range(m.N, n);
  };
  fill(pair.plus, rep.plus);
  fill(pair.minus, rep.minus);

  const double eig_lo = std::min({rep.plus.eig_min_M, rep.plus.eig_min_N,
                                  rep.minus.eig_min_M, rep.minus.eig_min_N});
  const double eig_hi = std::max({rep.plus.eig_max_M, rep.plus.eig_max_N,
                                  rep.minus.eig_max_M, rep.minus.eig_max_N});
  if (pair.lambda0 > 0.0 && pair.Lambda0 > 0.0) {
    rep.lambda0_used = pair.lambda0;
    rep.Lambda0_used = pair.Lambda0;
  } else {
    rep.lambda0_used = eig_lo;
    rep.Lambda0_used = eig_hi;
    rep.bounds_inferred = true;
  }
  rep.worst_lower_margin = eig_lo - rep.lambda0_used;
  rep.worst_upper_margin = rep.Lambda0_used - eig_hi;

  const double tm = tol().eig_margin;
  auto side_pass = [&](const SideValidation& sv) {
    return sv.symmetry_defect_M <= tol().symmetry &&
           sv.symmetry_defect_N <= tol().symmetry &&
           std::min(sv.eig_min_M, sv.eig_min_N) >= rep.lambda0_used - tm &&
           std::max(sv.eig_max_M, sv.eig_max_N) <= rep.Lambda0_used + tm;
  };
  rep.plus.pass = side_pass(rep.plus);
  rep.minus.pass = side_pass(rep.minus);
  rep.pass = rep.plus.pass && rep.minus.pass && rep.lambda0_used > 0.0 &&
             rep.lambda0_used <= rep.Lambda0_used;
  return rep;
}

// Constants from a pair's validated (or inferred) ellipticity bracket.
inline DerivedConstants derived_constants(const CoefficientPair& pair) {
  const ValidationReport rep = validate(pair);
  if (!rep.pass) throw invalid_input_error("derived_constants: pair fails validation");
  return derived_constants(rep.lambda0_used, rep.Lambda0_used, pair.plus.n);
}

}  // namespace carleman
