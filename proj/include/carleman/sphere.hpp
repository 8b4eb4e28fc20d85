// Deterministic low-discrepancy point sets on unit spheres. Used for the
// tangential maximization, null-set enumeration, and the constants search;
// no RNG state so reruns are byte-identical.
#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "carleman/errors.hpp"

namespace carleman {

namespace detail {

// Radical-inverse (van der Corput) in the given base, index starts at 1.
inline double radical_inverse(unsigned base, unsigned long long i) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

}  // namespace detail

// count points on the unit sphere of R^ambient. ambient = 1 always returns
// {+1} and {-1}; ambient = 2 uses uniform angles; ambient = 3 a Fibonacci
// spiral; higher dimensions map Halton tuples through Box-Muller normals.
// start offsets the low-discrepancy index stream so callers can draw a fresh
// sample disjoint from an earlier one; the closed-form branches (ambient <= 3)
// instead rotate their lattice, which changes every point.
inline std::vector<std::vector<double>> unit_sphere_points(int ambient, int count,
                                                           long start = 0) {
  if (ambient < 1) throw invalid_input_error("sphere ambient dimension must be >= 1");
  if (count < 1) throw invalid_input_error("sphere sample count must be >= 1");
  if (start < 0) throw invalid_input_error("sphere sample start must be >= 0");
  std::vector<std::vector<double>> pts;

  if (ambient == 1) {
    pts.push_back({1.0});
    pts.push_back({-1.0});
    return pts;
  }
  if (ambient == 2) {
    pts.reserve(count);
    for (int k = 0; k < count; ++k) {
      const double th = 2.0 * std::numbers::pi * ((k + 0.5) / count + 0.123 * start);
      pts.push_back({std::cos(th), std::sin(th)});
    }
    return pts;
  }
  if (ambient == 3) {
    pts.reserve(count);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double th = golden * (k + start);
      pts.push_back({r * std::cos(th), r * std::sin(th), z});
    }
    return pts;
  }

  // General case: Halton-driven Gaussian directions, normalized.
  static constexpr unsigned bases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  const int npairs = (ambient + 1) / 2;
  if (npairs > 10) throw invalid_input_error("sphere dimension too large");
  pts.reserve(count);
  for (int k = 0; k < count; ++k) {
    std::vector<double> v(ambient);
    for (int p = 0; p < npairs; ++p) {
      double u1 = detail::radical_inverse(bases[2 * p], k + 1 + start);
      double u2 = detail::radical_inverse(bases[2 * p + 1], k + 1 + start);
      u1 = std::max(u1, 1e-12);
      const double rad = std::sqrt(-2.0 * std::log(u1));
      const double ang = 2.0 * std::numbers::pi * u2;
      v[2 * p] = rad * std::cos(ang);
      if (2 * p + 1 < ambient) v[2 * p + 1] = rad * std::sin(ang);
    }
    double nrm = 0.0;
    for (double c : v) nrm += c * c;
    nrm = std::sqrt(nrm);
    if (nrm < 1e-12) {
      v.assign(ambient, 0.0);
      v[0] = 1.0;
      nrm = 1.0;
    }
    for (double& c : v) c /= nrm;
    pts.push_back(std::move(v));
  }
  return pts;
}

}  // namespace carleman
