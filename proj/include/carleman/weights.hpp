// Carleman weight functions. psi is alpha_side*x_n + beta*x_n^2/2 -
// eps*|x'|^2/2; phi_delta rescales psi (with eps replaced by beta*delta) to
// argument x/delta. Each side's weight is a globally smooth function; the
// side argument selects the branch, it is not restricted to sign(x_n).
#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "carleman/coefficients.hpp"
#include "carleman/errors.hpp"

namespace carleman {

struct WeightParameters {
  double alpha_plus = 0.0;   // slope on x_n > 0
  double alpha_minus = 0.0;  // slope on x_n < 0
  double beta = 1.0;         // quadratic normal coefficient
  double epsilon = 0.0;      // tangential concavity
  double delta = 0.0;        // localization scale, in (0, 1]
};

inline double alpha_of(const WeightParameters& w, Side s) {
  return s == Side::plus ? w.alpha_plus : w.alpha_minus;
}

namespace detail {
inline double tangential_sq(std::span<const double> x) {
  double s = 0.0;
  for (size_t j = 0; j + 1 < x.size(); ++j) s += x[j] * x[j];
  return s;
}
}  // namespace detail

inline double psi(const WeightParameters& w, std::span<const double> x, Side side) {
  const double xn = x.back();
  return alpha_of(w, side) * xn + 0.5 * w.beta * xn * xn -
         0.5 * w.epsilon * detail::tangential_sq(x);
}

// phi_delta(x) = psi_{eps := beta*delta}(x / delta), so scaling (alpha, beta,
// eps) by a common factor scales phi_delta by the same factor.
inline double phi_delta(const WeightParameters& w, std::span<const double> x, Side side) {
  if (!(w.delta > 0.0)) throw invalid_input_error("phi_delta needs delta > 0");
  const double xn = x.back() / w.delta;
  return alpha_of(w, side) * xn + 0.5 * w.beta * xn * xn -
         0.5 * w.beta * detail::tangential_sq(x) / w.delta;
}

// gradient of psi: (-eps x', alpha + beta x_n)
inline std::vector<double> grad_psi(const WeightParameters& w, std::span<const double> x,
                                    Side side) {
  std::vector<double> g(x.size());
  for (size_t j = 0; j + 1 < x.size(); ++j) g[j] = -w.epsilon * x[j];
  g.back() = alpha_of(w, side) + w.beta * x.back();
  return g;
}

// Hessian of psi: diag(-eps I_{n-1}, beta), constant in x. Row-major n*n.
inline std::vector<double> hess_psi(const WeightParameters& w, int n) {
  std::vector<double> h(static_cast<size_t>(n) * n, 0.0);
  for (int j = 0; j + 1 < n; ++j) h[j * n + j] = -w.epsilon;
  h[static_cast<size_t>(n - 1) * n + (n - 1)] = w.beta;
  return h;
}

// gradient of phi_delta: (-beta x'/delta, (alpha + beta x_n/delta)/delta)
inline std::vector<double> grad_phi_delta(const WeightParameters& w,
                                          std::span<const double> x, Side side) {
  if (!(w.delta > 0.0)) throw invalid_input_error("grad_phi_delta needs delta > 0");
  std::vector<double> g(x.size());
  for (size_t j = 0; j + 1 < x.size(); ++j) g[j] = -w.beta * x[j] / w.delta;
  g.back() = (alpha_of(w, side) + w.beta * x.back() / w.delta) / w.delta;
  return g;
}

// Weight dispatch used by the quadrature layer: psi for the frozen and
// x_n-profile estimates, phi_delta for the full one.
inline double weight_value(const WeightParameters& w, std::span<const double> x, Side side,
                           bool use_phi_delta) {
  return use_phi_delta ? phi_delta(w, x, side) : psi(w, x, side);
}

inline std::vector<double> weight_grad(const WeightParameters& w, std::span<const double> x,
                                       Side side, bool use_phi_delta) {
  return use_phi_delta ? grad_phi_delta(w, x, side) : grad_psi(w, x, side);
}

}  // namespace carleman
