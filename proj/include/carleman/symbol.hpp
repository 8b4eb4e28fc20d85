// Principal-symbol factorization at a tangential frequency: the reduced
// symbol b, its decomposition b = (A - iB)^2 with A >= 0, the shifts E + iF,
// and the roots of the conjugated quadratic in the normal variable. The
// lower bound A >= sqrt(lt1 |xi'|^2 + F^2) drives every downstream sign fact.
#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "carleman/coefficients.hpp"
#include "carleman/errors.hpp"
#include "carleman/tolerances.hpp"

namespace carleman {

struct TangentialFrequency {
  std::vector<double> xi_prime;  // in R^{n-1}, nonzero for classification
  double tau = 0.0;              // positive
};

struct SymbolFactorization {
  int k = 0;  // 1 = minus side, 2 = plus side
  cplx a_nn{};
  double E = 0.0, F = 0.0;  // E + iF = sum_{j<n} (a_nj / a_nn) xi_j
  double A = 0.0, B = 0.0;  // b = (A - iB)^2, A >= 0
  cplx b{};                 // reduced symbol value at xi'
  // Conjugated-quadratic roots; populated by with_roots().
  cplx sigma1{}, sigma2{};
  double alpha = 0.0, tau = 0.0;
};

// Complex bilinear form sum a_lj zeta_l zeta_j (no conjugation).
inline cplx principal_symbol(const ComplexSymmetricMatrix& m,
                             std::span<const cplx> zeta) {
  if (zeta.size() != static_cast<size_t>(m.n))
    throw dimension_error("principal_symbol: vector length != matrix dimension");
  cplx s{};
  for (int l = 0; l < m.n; ++l)
    for (int j = 0; j < m.n; ++j) s += m.a(l, j) * zeta[l] * zeta[j];
  return s;
}

// Gradient of the symbol: d/d zeta_j p = 2 sum_l a_jl zeta_l.
inline std::vector<cplx> symbol_gradient(const ComplexSymmetricMatrix& m,
                                         std::span<const cplx> zeta) {
  if (zeta.size() != static_cast<size_t>(m.n))
    throw dimension_error("symbol_gradient: vector length != matrix dimension");
  std::vector<cplx> g(m.n);
  for (int j = 0; j < m.n; ++j) {
    cplx s{};
    for (int l = 0; l < m.n; ++l) s += m.a(j, l) * zeta[l];
    g[j] = 2.0 * s;
  }
  return g;
}

// (A, B) with A = Re sqrt(b) >= 0 on the principal branch and (A - iB)^2 = b.
// For b <= 0 real the root is purely imaginary; the sign is fixed by B >= 0.
inline std::pair<double, double> principal_sqrt(cplx b) {
  const double a = b.real(), bb = b.imag();
  const double mod = std::hypot(a, bb);
  if (a >= 0.0) {
    const double A = std::sqrt(0.5 * (a + mod));
    return {A, A > 0.0 ? -bb / (2.0 * A) : 0.0};
  }
  // Left half plane: a + mod cancels, so build the imaginary component from
  // the cancellation-free mod - a and divide for the real one.
  const double y = std::sqrt(0.5 * (mod - a));  // |Im sqrt(b)|
  if (bb == 0.0) return {0.0, y};               // B >= 0 fixes the branch
  return {std::abs(bb) / (2.0 * y), bb > 0.0 ? -y : y};
}

// Factorization data at xi'. The reduced symbol is
//   b = a_nn^{-2} sum_{l,j<n} (a_lj a_nn - a_nl a_nj) xi_l xi_j,
// cross-checked against b = (1/a_nn) sum_{l,j<n} a_lj xi_l xi_j - (E+iF)^2.
inline SymbolFactorization factor_at(const ComplexSymmetricMatrix& m,
                                     std::span<const double> xi_prime, int k) {
  const int n = m.n;
  if (xi_prime.size() != static_cast<size_t>(n - 1))
    throw dimension_error("factor_at: xi' length must be n-1");
  double nrm2 = 0.0;
  for (double v : xi_prime) nrm2 += v * v;
  if (!(nrm2 > 0.0)) throw invalid_input_error("factor_at: xi' must be nonzero");
  (void)side_from_k(k);

  SymbolFactorization f;
  f.k = k;
  f.a_nn = m.a_nn();

  cplx ef{};  // E + iF
  for (int j = 0; j + 1 < n; ++j) ef += (m.a(n - 1, j) / f.a_nn) * xi_prime[j];
  f.E = ef.real();
  f.F = ef.imag();

  cplx num{};
  cplx tang{};  // sum_{l,j<n} a_lj xi_l xi_j
  for (int l = 0; l + 1 < n; ++l)
    for (int j = 0; j + 1 < n; ++j) {
      const cplx w = xi_prime[l] * xi_prime[j];
      num += (m.a(l, j) * f.a_nn - m.a(n - 1, l) * m.a(n - 1, j)) * w;
      tang += m.a(l, j) * w;
    }
  f.b = num / (f.a_nn * f.a_nn);

  const cplx b_alt = tang / f.a_nn - ef * ef;
  if (std::abs(f.b - b_alt) > tol().factor_identity * (1.0 + std::abs(f.b)))
    throw internal_inconsistency_error("reduced-symbol identity failed");

  std::tie(f.A, f.B) = principal_sqrt(f.b);
  const cplx sq = cplx(f.A, -f.B) * cplx(f.A, -f.B);
  if (std::abs(sq - f.b) > tol().factor_identity * (1.0 + std::abs(f.b)))
    throw internal_inconsistency_error("principal square root identity failed");
  return f;
}

inline SymbolFactorization factor_at(const CoefficientPair& pair, int k,
                                     std::span<const double> xi_prime) {
  return factor_at(pair.side(side_from_k(k)), xi_prime, k);
}

// Roots of the conjugated quadratic in the normal dual variable lambda:
//   k = 2: sigma1 = -E - B - i(tau a + F + A), sigma2 = -E + B - i(tau a + F - A)
//   k = 1: sigma1 =  E + B + i(tau a + F + A), sigma2 =  E - B + i(tau a + F - A)
// sigma1 always lies strictly in the half plane the side's weight pushes it to.
inline std::pair<cplx, cplx> conjugated_roots(const SymbolFactorization& f,
                                              double alpha_k, double tau) {
  if (!(alpha_k > 0.0) || !(tau > 0.0))
    throw invalid_input_error("conjugated_roots needs alpha, tau > 0");
  if (f.k == 2) {
    return {cplx(-f.E - f.B, -(tau * alpha_k + f.F + f.A)),
            cplx(-f.E + f.B, -(tau * alpha_k + f.F - f.A))};
  }
  return {cplx(f.E + f.B, tau * alpha_k + f.F + f.A),
          cplx(f.E - f.B, tau * alpha_k + f.F - f.A)};
}

inline SymbolFactorization with_roots(SymbolFactorization f, double alpha_k, double tau) {
  auto [s1, s2] = conjugated_roots(f, alpha_k, tau);
  f.sigma1 = s1;
  f.sigma2 = s2;
  f.alpha = alpha_k;
  f.tau = tau;
  return f;
}

// Conjugated quadratic evaluated at lambda:
//   a_nn [ ((-1)^k lambda + i tau alpha + E + iF)^2 + b ].
inline cplx conjugated_symbol(const SymbolFactorization& f, double alpha_k, double tau,
                              cplx lambda) {
  const double sign = (f.k == 2) ? 1.0 : -1.0;
  const cplx lin = sign * lambda + cplx(f.E, tau * alpha_k + f.F);
  return f.a_nn * (lin * lin + f.b);
}

struct FactorBound {
  double lhs = 0.0;       // A
  double rhs = 0.0;       // sqrt(lt1 |xi'|^2 + F^2)
  double cap_lhs = 0.0;   // A^2 + B^2
  double cap_rhs = 0.0;   // n (Lambda0/lambda0)^2 |xi'|^2
  bool pass = false;
};

inline FactorBound factor_bound(const SymbolFactorization& f,
                                 const DerivedConstants& d,
                                 std::span<const double> xi_prime, int n,
                                 double lambda0, double Lambda0) {
  double nrm2 = 0.0;
  for (double v : xi_prime) nrm2 += v * v;
  FactorBound out;
  out.lhs = f.A;
  out.rhs = std::sqrt(d.lambda_tilde1 * nrm2 + f.F * f.F);
  out.cap_lhs = f.A * f.A + f.B * f.B;
  out.cap_rhs = static_cast<double>(n) * (Lambda0 / lambda0) * (Lambda0 / lambda0) * nrm2;
  out.pass = out.lhs >= out.rhs - tol().factor_bound_slack &&
             out.cap_lhs <= out.cap_rhs + tol().factor_bound_slack;
  return out;
}

}  // namespace carleman
