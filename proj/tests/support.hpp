// Shared test fixtures: seeded random coefficient pairs that pass hypothesis
// validation, plus small numeric helpers. All randomness flows through a
// caller-owned mt19937 so every test is reproducible from its literal seed.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "carleman/coefficients.hpp"

namespace testsupport {

using carleman::ComplexSymmetricMatrix;
using carleman::CoefficientPair;

// Random symmetric matrix with prescribed eigenvalue range: Q diag(d) Q^T
// with Q from the QR factorization of a Gaussian matrix.
inline std::vector<double> random_spd(int n, std::mt19937& rng, double lo, double hi) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(lo, hi);
  Eigen::MatrixXd G(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) G(r, c) = gauss(rng);
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d(i) = unif(rng);
  // Pin the extremes so the sampled range is the target range.
  d(0) = lo;
  if (n > 1) d(n - 1) = hi;
  const Eigen::MatrixXd A = Q * d.asDiagonal() * Q.transpose();
  std::vector<double> m(static_cast<size_t>(n) * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      m[static_cast<size_t>(r) * n + c] = 0.5 * (A(r, c) + A(c, r));
  return m;
}

// Validated pair: all four matrices share the eigenvalue bracket [lo, hi],
// gamma is the given fraction of the pair's threshold gamma0(lo, hi, n).
inline CoefficientPair random_validated_pair(int n, std::mt19937& rng,
                                             double gamma_fraction = 0.5,
                                             double lo = 0.6, double hi = 2.4) {
  CoefficientPair pair;
  pair.plus.n = pair.minus.n = n;
  pair.plus.M = random_spd(n, rng, lo, hi);
  pair.plus.N = random_spd(n, rng, lo, hi);
  pair.minus.M = random_spd(n, rng, lo, hi);
  pair.minus.N = random_spd(n, rng, lo, hi);
  const double gamma = gamma_fraction * carleman::gamma_threshold(lo, hi, n);
  pair.plus.gamma = pair.minus.gamma = gamma;
  pair.lambda0 = lo;
  pair.Lambda0 = hi;
  return pair;
}

inline ComplexSymmetricMatrix identity_matrix(int n, double scale = 1.0,
                                              double gamma = 0.0) {
  ComplexSymmetricMatrix m;
  m.n = n;
  m.gamma = gamma;
  m.M.assign(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) m.M[static_cast<size_t>(i) * n + i] = scale;
  m.N = m.M;
  return m;
}

// The acceptance coefficient pair: a_plus = 2I, a_minus = I, gamma = 0.1.
inline CoefficientPair contrast_pair(int n = 2, double gamma = 0.1) {
  CoefficientPair pair;
  pair.plus = identity_matrix(n, 2.0, gamma);
  pair.minus = identity_matrix(n, 1.0, gamma);
  return pair;
}

inline CoefficientPair isotropic_equal_pair(int n = 2, double gamma = 0.1) {
  CoefficientPair pair;
  pair.plus = identity_matrix(n, 1.0, gamma);
  pair.minus = identity_matrix(n, 1.0, gamma);
  return pair;
}

inline std::vector<double> random_unit_vector(int n, std::mt19937& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(n);
  double nrm = 0.0;
  do {
    nrm = 0.0;
    for (double& c : v) {
      c = gauss(rng);
      nrm += c * c;
    }
  } while (nrm < 1e-12);
  nrm = std::sqrt(nrm);
  for (double& c : v) c /= nrm;
  return v;
}

inline double rel_diff(double a, double b) {
  const double ref = std::max(std::abs(a), std::abs(b));
  return ref > 0.0 ? std::abs(a - b) / ref : 0.0;
}

}  // namespace testsupport
