// Interface transmission analysis: case classification from the root signs,
// the weight-slope ratio that excludes the unsolvable case, the 4x4 interface
// system with its closed-form determinant, and grid certification.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "carleman/coefficients.hpp"
#include "carleman/sphere.hpp"
#include "carleman/symbol.hpp"
#include "carleman/weights.hpp"

namespace carleman {

enum class CaseId { case1, case2, case3 };

inline const char* case_name(CaseId c) {
  switch (c) {
    case CaseId::case1: return "Case1";
    case CaseId::case2: return "Case2";
    default: return "Case3";
  }
}

struct CaseClassification {
  CaseId case_id = CaseId::case3;
  double im_sigma2_plus = 0.0;   // Im sigma2 on the plus side: -tau a2 - F2 + A2
  double im_sigma2_minus = 0.0;  // Im sigma2 on the minus side: tau a1 + F1 - A1
  cplx detT{};                   // populated for Case3
  std::string certificate;
};

// Case1: both plus-side roots below the real axis (division construction
// works unconditionally). Case2: the leftover roots of both sides sit in the
// closed upper half plane (no certificate; must be excluded by the slope
// ratio). Case3: one root each; solvability reduces to det T != 0.
inline CaseClassification classify(const SymbolFactorization& minus_fact,
                                   const SymbolFactorization& plus_fact,
                                   double alpha_minus, double alpha_plus, double tau) {
  CaseClassification c;
  c.im_sigma2_plus = -tau * alpha_plus - plus_fact.F + plus_fact.A;
  c.im_sigma2_minus = tau * alpha_minus + minus_fact.F - minus_fact.A;
  if (c.im_sigma2_plus < 0.0) {
    c.case_id = CaseId::case1;
    c.certificate = "division remainder construction (both plus-side roots in Im < 0)";
  } else if (c.im_sigma2_minus >= 0.0) {
    c.case_id = CaseId::case2;
    c.certificate = "no certificate: leftover roots of both sides in Im >= 0";
  } else {
    c.case_id = CaseId::case3;
    c.certificate = "4x4 interface system, solvable iff det T != 0";
  }
  return c;
}

// Smallest admissible alpha_plus / alpha_minus:
// max over unit xi' of (A2 - F2)/(A1 - F1), plus 1. Denominators are positive
// whenever the lower bound A > |F| holds.
inline double alpha_ratio(const CoefficientPair& pair, int sphere_samples = 2048) {
  const int n = pair.dim();
  const auto dirs = unit_sphere_points(n - 1, sphere_samples);
  double worst = 0.0;
  for (const auto& xi : dirs) {
    const auto f1 = factor_at(pair, 1, xi);
    const auto f2 = factor_at(pair, 2, xi);
    const double den = f1.A - f1.F;
    if (!(den > 0.0))
      throw internal_inconsistency_error(
          "alpha_ratio: nonpositive denominator A - F on the minus side");
    worst = std::max(worst, (f2.A - f2.F) / den);
  }
  return worst + 1.0;
}

// 4x4 interface matrix in the unknowns (mu1, mu2, c1, c2).
inline std::array<std::array<cplx, 4>, 4> build_T(const SymbolFactorization& f1,
                                                  const SymbolFactorization& f2,
                                                  double alpha_minus, double alpha_plus,
                                                  double tau) {
  const auto [s1m, s2m] = conjugated_roots(f1, alpha_minus, tau);
  const auto [s1p, s2p] = conjugated_roots(f2, alpha_plus, tau);
  (void)s2m;
  (void)s1p;
  const cplx z1 = f1.a_nn * cplx(f1.E, tau * alpha_minus + f1.F);
  const cplx z2 = f2.a_nn * cplx(f2.E, tau * alpha_plus + f2.F);
  return {{{cplx(1), cplx(0), cplx(0), f1.a_nn},
           {cplx(0), cplx(1), cplx(0), f2.a_nn},
           {s1m, cplx(0), cplx(1), z1},
           {cplx(0), -s2p, cplx(1), z2}}};
}

// Brute-force Laplace expansion; independent of the closed form below.
inline cplx det4_laplace(const std::array<std::array<cplx, 4>, 4>& m) {
  auto det3 = [](cplx a, cplx b, cplx c, cplx d, cplx e, cplx f, cplx g, cplx h, cplx i) {
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
  };
  cplx det{};
  for (int col = 0; col < 4; ++col) {
    std::array<cplx, 9> sub;
    int idx = 0;
    for (int r = 1; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        if (c != col) sub[idx++] = m[r][c];
    const cplx minor =
        det3(sub[0], sub[1], sub[2], sub[3], sub[4], sub[5], sub[6], sub[7], sub[8]);
    det += ((col % 2 == 0) ? 1.0 : -1.0) * m[0][col] * minor;
  }
  return det;
}

inline cplx det_T_closed(const SymbolFactorization& f1, const SymbolFactorization& f2) {
  return f2.a_nn * cplx(f2.B, f2.A) + f1.a_nn * cplx(f1.B, f1.A);
}

// Closed form, cross-checked against the assembled matrix every call.
inline cplx det_T(const SymbolFactorization& f1, const SymbolFactorization& f2,
                  double alpha_minus, double alpha_plus, double tau) {
  const cplx closed = det_T_closed(f1, f2);
  const cplx brute = det4_laplace(build_T(f1, f2, alpha_minus, alpha_plus, tau));
  if (std::abs(closed - brute) > tol().det_cross_check * (1.0 + std::abs(closed)))
    throw internal_inconsistency_error("det T closed form disagrees with 4x4 determinant");
  return closed;
}

struct TransmissionSolution {
  cplx mu1{}, mu2{}, c1{}, c2{};
  double residual = 0.0;
};

// Solves T (mu1, mu2, c1, c2)^t = (0, 0, -q1t, q2t)^t and reports the
// residual against the four equations.
inline TransmissionSolution solve_transmission_system(const SymbolFactorization& f1,
                                                      const SymbolFactorization& f2,
                                                      cplx q1t, cplx q2t,
                                                      double alpha_minus,
                                                      double alpha_plus, double tau) {
  const auto T = build_T(f1, f2, alpha_minus, alpha_plus, tau);
  const cplx dt = det4_laplace(T);
  const double scale = std::abs(f1.a_nn) * (f1.A + std::abs(f1.B)) +
                       std::abs(f2.a_nn) * (f2.A + std::abs(f2.B));
  if (std::abs(dt) <= tol().det_cross_check * (1.0 + scale))
    throw singular_system_error("transmission system: det T numerically zero");

  Eigen::Matrix4cd M;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) M(r, c) = T[r][c];
  Eigen::Vector4cd rhs(cplx(0), cplx(0), -q1t, q2t);
  Eigen::Vector4cd x = M.partialPivLu().solve(rhs);

  TransmissionSolution sol;
  sol.mu1 = x(0);
  sol.mu2 = x(1);
  sol.c1 = x(2);
  sol.c2 = x(3);
  sol.residual = (M * x - rhs).cwiseAbs().maxCoeff();
  const double res_scale = 1.0 + std::abs(q1t) + std::abs(q2t);
  if (sol.residual > tol().solve_residual * res_scale)
    throw singular_system_error("transmission system: residual beyond tolerance");
  return sol;
}

struct TransmissionViolation {
  std::vector<double> xi_prime;
  double tau = 0.0;
  std::string kind;  // "case2" | "singular" | "case-exclusion"
};

struct TransmissionReport {
  bool certified = false;
  double min_abs_detT = 0.0;
  double alpha_ratio_required = 0.0;  // computed from the pair
  double alpha_ratio_used = 0.0;      // from the weight parameters
  size_t case1_count = 0, case2_count = 0, case3_count = 0;
  double worst_solve_residual = 0.0;
  std::vector<TransmissionViolation> violations;
};

// Default certification tau grid: logarithmic on [1, 1e3], 50 points.
inline std::vector<double> default_tau_grid(double lo = 1.0, double hi = 1e3,
                                            int points = 50) {
  std::vector<double> g;
  g.reserve(points);
  for (int i = 0; i < points; ++i)
    g.push_back(lo * std::pow(hi / lo, points > 1 ? double(i) / (points - 1) : 0.0));
  return g;
}

// Runs the case analysis over (xi', tau): no Case2 anywhere; in Case3 the
// system must solve. Each xi' also probes the case-boundary tau where the
// plus side's leftover root crosses the real axis.
inline TransmissionReport certify_transmission(const CoefficientPair& pair,
                                               const WeightParameters& weights,
                                               const std::vector<std::vector<double>>& xi_grid,
                                               const std::vector<double>& tau_grid) {
  TransmissionReport rep;
  rep.alpha_ratio_used = weights.alpha_plus / weights.alpha_minus;
  rep.alpha_ratio_required = alpha_ratio(pair, std::max<int>(64, xi_grid.size()));
  rep.min_abs_detT = std::numeric_limits<double>::infinity();
  constexpr size_t kMaxViolations = 32;

  for (const auto& xi : xi_grid) {
    const auto f1 = factor_at(pair, 1, xi);
    const auto f2 = factor_at(pair, 2, xi);
    std::vector<double> taus = tau_grid;
    const double boundary = (f2.A - f2.F) / weights.alpha_plus;
    if (boundary > 0.0) taus.push_back(boundary);

    for (double tau : taus) {
      const auto cls = classify(f1, f2, weights.alpha_minus, weights.alpha_plus, tau);
      const cplx dt = det_T(f1, f2, weights.alpha_minus, weights.alpha_plus, tau);
      rep.min_abs_detT = std::min(rep.min_abs_detT, std::abs(dt));

      // Exclusion implication: once the plus side's leftover root has
      // nonnegative imaginary part, the minus side's must be negative.
      if (cls.im_sigma2_plus >= 0.0 && !(cls.im_sigma2_minus < 0.0) &&
          cls.case_id != CaseId::case2) {
        if (rep.violations.size() < kMaxViolations)
          rep.violations.push_back({xi, tau, "case-exclusion"});
      }

      switch (cls.case_id) {
        case CaseId::case1:
          ++rep.case1_count;
          break;
        case CaseId::case2:
          ++rep.case2_count;
          if (rep.violations.size() < kMaxViolations)
            rep.violations.push_back({xi, tau, "case2"});
          break;
        case CaseId::case3: {
          ++rep.case3_count;
          try {
            const auto sol = solve_transmission_system(
                f1, f2, cplx(1.0), cplx(1.0), weights.alpha_minus, weights.alpha_plus, tau);
            rep.worst_solve_residual = std::max(rep.worst_solve_residual, sol.residual);
          } catch (const singular_system_error&) {
            if (rep.violations.size() < kMaxViolations)
              rep.violations.push_back({xi, tau, "singular"});
          }
          break;
        }
      }
    }
  }
  rep.certified = rep.violations.empty();
  return rep;
}

}  // namespace carleman
