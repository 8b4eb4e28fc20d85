// Strong pseudoconvexity of the quadratic weight across the interface:
// the functional Q, exact enumeration of the conjugated symbol's null set,
// certification of the sphere bound C1 Q + |p| >= C2, and calibration of
// the tangential concavity parameter epsilon.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "carleman/coefficients.hpp"
#include "carleman/sphere.hpp"
#include "carleman/symbol.hpp"
#include "carleman/weights.hpp"

namespace carleman {

// Q(x, xi, tau) = sum_{l,j} Hess(psi)_{lj} d_{xi_j}p(zeta) conj(d_{xi_l}p(zeta))
// with zeta = xi + i tau grad(psi)(x). Real because the Hessian is real
// symmetric; the imaginary residue is asserted tiny and dropped.
inline double eval_Q(const ComplexSymmetricMatrix& m, const WeightParameters& w,
                     std::span<const double> x, std::span<const double> xi, double tau,
                     Side side) {
  const int n = m.n;
  if (static_cast<int>(x.size()) != n || static_cast<int>(xi.size()) != n)
    throw dimension_error("eval_Q: x and xi must match the matrix dimension");
  const auto grad = grad_psi(w, x, side);
  std::vector<cplx> zeta(n);
  for (int j = 0; j < n; ++j) zeta[j] = cplx(xi[j], tau * grad[j]);
  const auto gp = symbol_gradient(m, zeta);
  const auto H = hess_psi(w, n);
  cplx q{};
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j) q += H[l * n + j] * gp[j] * std::conj(gp[l]);
  if (std::abs(q.imag()) > tol().q_imag_residual * (1.0 + std::abs(q)))
    throw internal_inconsistency_error("eval_Q: pseudoconvexity sum has a nonreal part");
  return q.real();
}

struct NullPoint {
  std::vector<double> xi;  // full n-vector (xi', xi_n)
  double tau = 0.0;        // positive
  Side side = Side::plus;
  bool normalized = false;  // |xi|^2 + tau^2 = 1 when set
};

struct NullPointSet {
  std::vector<NullPoint> points;
  int discarded_nonpositive_tau = 0;
};

// Exact null set of p(xi + i tau alpha e_n) from the factorization: with
// sqrt(b) = A - iB the two roots of (zeta_n + E + iF)^2 = -b are
//   zeta_n = -E + B + i(A - F)   (kept: tau = (A - F)/alpha > 0 since A > |F|)
//   zeta_n = -E - B - i(A + F)   (discarded: tau = -(A + F)/alpha < 0)
// Each kept point is residual-checked against the full symbol, then scaled
// onto the sphere |xi|^2 + tau^2 = 1.
inline NullPointSet null_points(const ComplexSymmetricMatrix& m, int k, double alpha,
                                int count) {
  if (!(alpha > 0.0)) throw invalid_input_error("null_points: alpha must be positive");
  const int n = m.n;
  NullPointSet out;
  const auto dirs = unit_sphere_points(n - 1, count);
  for (const auto& xp : dirs) {
    const auto f = factor_at(m, xp, k);
    const double branch[2][2] = {{-f.E + f.B, (f.A - f.F) / alpha},
                                 {-f.E - f.B, -(f.A + f.F) / alpha}};
    for (const auto& br : branch) {
      const double xi_n = br[0], tau = br[1];
      if (!(tau > 0.0)) {
        ++out.discarded_nonpositive_tau;
        continue;
      }
      NullPoint p;
      p.xi.assign(xp.begin(), xp.end());
      p.xi.push_back(xi_n);
      p.tau = tau;
      p.side = side_from_k(k);

      std::vector<cplx> zeta(n);
      for (int j = 0; j + 1 < n; ++j) zeta[j] = cplx(p.xi[j], 0.0);
      zeta[n - 1] = cplx(xi_n, tau * alpha);
      double norm2 = tau * tau;
      for (double c : p.xi) norm2 += c * c;
      if (std::abs(principal_symbol(m, zeta)) > tol().null_residual * norm2)
        throw internal_inconsistency_error("null point fails the p = 0 residual check");

      const double s = 1.0 / std::sqrt(norm2);
      for (double& c : p.xi) c *= s;
      p.tau *= s;
      p.normalized = true;
      out.points.push_back(p);
    }
  }
  return out;
}

struct PseudoconvexityCertificate {
  double epsilon_used = 0.0;
  double min_Q_on_null_set = 0.0;
  double bound_constant = 0.0;  // empirical C in Q >= C beta |xi + i tau alpha e_n|^2
  double C1 = 0.0, C2 = 0.0;    // sphere bound C1 Q + |p| >= C2 on S
  double delta_prime = 0.0;     // localization radius after shrinking
  int null_point_count = 0;
  int discarded_count = 0;
};

namespace detail {

// Deterministic samples of the closed ball of the given radius; radii come
// from a van der Corput sequence in a base unused by the sphere sampler.
inline std::vector<std::vector<double>> ball_points(int ambient, int count,
                                                    double radius) {
  auto dirs = unit_sphere_points(ambient, count);
  for (int i = 0; i < count; ++i) {
    const double u = radical_inverse(17, static_cast<unsigned long long>(i) + 1);
    const double r = radius * std::pow(u, 1.0 / ambient);
    for (double& c : dirs[i]) c *= r;
  }
  return dirs;
}

struct SpherePoint {
  std::vector<double> xi;
  double tau = 0.0;
};

// Samples of S = {|xi|^2 + tau^2 = 1} in R^{n+1}; both tau signs occur.
// start shifts the underlying low-discrepancy stream for fresh resamples.
inline std::vector<SpherePoint> frequency_sphere(int n, int count, long start = 0) {
  const auto raw = unit_sphere_points(n + 1, count, start);
  std::vector<SpherePoint> pts(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    pts[i].xi.assign(raw[i].begin(), raw[i].begin() + n);
    pts[i].tau = raw[i][n];
  }
  return pts;
}

inline double q_plus_p(const ComplexSymmetricMatrix& m, const WeightParameters& w,
                       Side side, std::span<const double> x, const SpherePoint& s,
                       double C1) {
  const int n = m.n;
  const auto grad = grad_psi(w, x, side);
  std::vector<cplx> zeta(n);
  for (int j = 0; j < n; ++j) zeta[j] = cplx(s.xi[j], s.tau * grad[j]);
  const double Q = eval_Q(m, w, x, s.xi, s.tau, side);
  return C1 * Q + std::abs(principal_symbol(m, zeta));
}

}  // namespace detail

// Certificate for one side's matrix:
//  (a) on the exact null set at x = 0, Q clears 2 beta lt1 lambda0^2 |xi'|^2;
//  (b) grid search C1 in {2^k} for the sphere bound C1 Q + |p| >= 2 C2 > 0;
//      the certified C2 is half the sampled minimum, headroom for sphere
//      points the sample missed;
//  (c) the bound persists at level C2 for base points |x| <= delta',
//      halving delta' until it does.
inline PseudoconvexityCertificate certify(const ComplexSymmetricMatrix& m,
                                          const WeightParameters& w,
                                          const DerivedConstants& d, Side side,
                                          double delta_prime, int sphere_samples = 4096,
                                          int null_samples = 256) {
  const int n = m.n;
  const double alpha = alpha_of(w, side);
  if (!(delta_prime > 0.0) || !(delta_prime < alpha / (2.0 * w.beta)))
    throw invalid_input_error("certify: delta' must lie in (0, alpha/(2 beta))");

  PseudoconvexityCertificate cert;
  cert.epsilon_used = w.epsilon;
  cert.delta_prime = delta_prime;

  const int k = side == Side::minus ? 1 : 2;
  const auto nulls = null_points(m, k, alpha, null_samples);
  cert.null_point_count = static_cast<int>(nulls.points.size());
  cert.discarded_count = nulls.discarded_nonpositive_tau;
  if (nulls.points.empty())
    throw pseudoconvexity_error("certify: empty null set, nothing to bound");

  // Q is degree-2 homogeneous in (xi, tau): rescaling each null point to
  // |xi'| = 1 makes the tangential floor read Q >= 2 beta lt1 lambda0^2.
  const std::vector<double> origin(n, 0.0);
  const double floor_q = 2.0 * w.beta * d.lambda_tilde1 * d.lambda0 * d.lambda0;
  cert.min_Q_on_null_set = std::numeric_limits<double>::infinity();
  cert.bound_constant = std::numeric_limits<double>::infinity();
  for (const auto& p : nulls.points) {
    double xi_t2 = 0.0;
    for (int j = 0; j + 1 < n; ++j) xi_t2 += p.xi[j] * p.xi[j];
    if (!(xi_t2 > 0.0))
      throw internal_inconsistency_error("certify: null point with vanishing xi'");
    const double s = 1.0 / std::sqrt(xi_t2);
    std::vector<double> xi_unit(p.xi.begin(), p.xi.end());
    for (double& c : xi_unit) c *= s;
    const double Q = eval_Q(m, w, origin, xi_unit, s * p.tau, side);
    cert.min_Q_on_null_set = std::min(cert.min_Q_on_null_set, Q);
    if (Q < floor_q - 1e-10)
      throw pseudoconvexity_error("certify: Q below its tangential floor on a null point");
    const double zeta2 = 1.0 + xi_unit[n - 1] * xi_unit[n - 1] +
                         s * p.tau * s * p.tau * alpha * alpha;
    cert.bound_constant = std::min(cert.bound_constant, Q / (w.beta * zeta2));
  }
  if (!(cert.bound_constant > 0.0))
    throw pseudoconvexity_error("certify: nonpositive empirical constant on the null set");

  // (b) constant search on the frequency sphere at the base point x = 0.
  const auto sphere = detail::frequency_sphere(n, sphere_samples);
  double best_C1 = 0.0, best_C2 = -std::numeric_limits<double>::infinity();
  std::vector<double> worst_xi;
  double worst_tau = 0.0;
  for (int e = -16; e <= 16; ++e) {
    const double C1 = std::ldexp(1.0, e);
    double c2 = std::numeric_limits<double>::infinity();
    const detail::SpherePoint* argmin = nullptr;
    for (const auto& s : sphere) {
      const double v = detail::q_plus_p(m, w, side, origin, s, C1);
      if (v < c2) {
        c2 = v;
        argmin = &s;
      }
    }
    if (c2 > best_C2) {
      best_C2 = c2;
      best_C1 = C1;
      if (argmin) {
        worst_xi = argmin->xi;
        worst_tau = argmin->tau;
      }
    }
  }
  if (!(best_C2 > 0.0)) {
    std::string where = "(xi =";
    for (double c : worst_xi) where += " " + std::to_string(c);
    where += ", tau = " + std::to_string(worst_tau) + ")";
    throw pseudoconvexity_error("certify: no positive sphere constant; minimizer " + where);
  }
  cert.C1 = best_C1;
  cert.C2 = best_C2 / 2.0;

  // (c) persistence near the interface: halve delta' until the bound holds
  // at level C2 for every sampled base point.
  const int ball_count = 64;
  double dp = delta_prime;
  while (true) {
    bool ok = true;
    const auto bases = detail::ball_points(n, ball_count, dp);
    for (const auto& x : bases) {
      for (const auto& s : sphere) {
        if (detail::q_plus_p(m, w, side, x, s, cert.C1) < cert.C2) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) break;
    dp /= 2.0;
    if (dp < 1e-8)
      throw pseudoconvexity_error("certify: localization radius shrank below 1e-8");
  }
  cert.delta_prime = dp;
  return cert;
}

// Worst margin of the certified sphere bound on a sample disjoint from the
// one that produced the certificate. Nonnegative (up to round-off) when the
// certificate is sound.
inline double revalidate(const ComplexSymmetricMatrix& m, const WeightParameters& w,
                         Side side, const PseudoconvexityCertificate& cert,
                         int sphere_samples = 4096, long start = 1) {
  const std::vector<double> origin(m.n, 0.0);
  const auto sphere = detail::frequency_sphere(m.n, sphere_samples, start);
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& s : sphere)
    margin = std::min(margin, detail::q_plus_p(m, w, side, origin, s, cert.C1) - cert.C2);
  return margin;
}

// Largest epsilon on the lattice {beta 2^-m} whose Q stays above half the
// epsilon -> 0 value at every sampled null point. Q is affine and decreasing
// in epsilon, so the per-point criterion is monotone and the scan terminates.
inline double calibrate_epsilon(const ComplexSymmetricMatrix& m,
                                const WeightParameters& base, const DerivedConstants& d,
                                Side side, int null_samples = 128) {
  (void)d;
  const int n = m.n;
  const double alpha = alpha_of(base, side);
  const int k = side == Side::minus ? 1 : 2;
  const auto nulls = null_points(m, k, alpha, null_samples);
  if (nulls.points.empty())
    throw pseudoconvexity_error("calibrate_epsilon: empty null set");

  WeightParameters w0 = base;
  w0.epsilon = 0.0;
  const std::vector<double> origin(n, 0.0);
  std::vector<double> q0(nulls.points.size());
  for (size_t i = 0; i < nulls.points.size(); ++i)
    q0[i] = eval_Q(m, w0, origin, nulls.points[i].xi, nulls.points[i].tau, side);

  for (int mexp = 1; mexp <= 48; ++mexp) {
    const double eps = base.beta * std::ldexp(1.0, -mexp);
    WeightParameters w = base;
    w.epsilon = eps;
    bool ok = true;
    for (size_t i = 0; i < nulls.points.size(); ++i) {
      const double q = eval_Q(m, w, origin, nulls.points[i].xi, nulls.points[i].tau, side);
      if (q < q0[i] / 2.0) {
        ok = false;
        break;
      }
    }
    if (ok) return eps;
  }
  throw pseudoconvexity_error("calibrate_epsilon: no admissible epsilon on the lattice");
}

// Smaller of the two per-side calibrations; what the pipeline uses.
inline double calibrate_epsilon(const CoefficientPair& pair, const WeightParameters& base,
                                const DerivedConstants& d, int null_samples = 128) {
  const double em = calibrate_epsilon(pair.side(Side::minus), base, d, Side::minus,
                                      null_samples);
  const double ep = calibrate_epsilon(pair.side(Side::plus), base, d, Side::plus,
                                      null_samples);
  return std::min(em, ep);
}

}  // namespace carleman
