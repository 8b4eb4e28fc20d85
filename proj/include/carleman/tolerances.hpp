// Single source for the numeric tolerances used by invariant checks across
// the toolkit, so every assertion cites one configuration record.
#pragma once

namespace carleman {

struct Tolerances {
  double symmetry = 1e-12;          // stored-matrix symmetry defect
  double eig_margin = 1e-10;        // ellipticity bracketing slack
  double factor_identity = 1e-12;   // (A-iB)^2 = b and the reduced-symbol identity
  double root_residual = 1e-10;     // factorization of the conjugated symbol
  double factor_bound_slack = 1e-10;       // lower-bound slack for A
  double det_cross_check = 1e-10;   // closed form vs brute-force determinant (relative)
  double solve_residual = 1e-10;    // 4x4 system residual scale
  double null_residual = 1e-10;     // |p| at constructed null points (relative to |xi|^2+tau^2)
  double q_imag_residual = 1e-12;   // imaginary residue allowed in Q before truncation
  double homogeneity = 1e-12;       // scaling identities
  double support_vanish = 1e-14;    // "vanishes at the box boundary" threshold
  double sum_to_one = 1e-12;        // partition normalization defect
};

inline const Tolerances& tol() {
  static const Tolerances t{};
  return t;
}

}  // namespace carleman
