// Exception types shared by the toolkit. The CLI maps these to exit codes:
// config/input problems -> 1, detected violations are reported (not thrown).
#pragma once

#include <stdexcept>
#include <string>

namespace carleman {

// Malformed or inconsistent user input (config files, bad parameters).
struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Non-square matrices, mismatched sizes, wrong vector lengths.
struct dimension_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// NaN/inf entries or out-of-domain scalar arguments.
struct invalid_input_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A quantity the theory guarantees (Lemma-type bound, nonzero determinant)
// failed numerically; indicates inconsistent inputs or a genuine violation.
struct internal_inconsistency_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Field support exceeds the radius the requested estimate allows.
struct support_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 4x4 interface system has (numerically) vanishing determinant.
struct singular_system_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested tau range would underflow/overflow the weighted integrals.
struct overflow_budget_error : std::runtime_error {
  double admissible_tau_max;
  overflow_budget_error(const std::string& msg, double tau_max)
      : std::runtime_error(msg), admissible_tau_max(tau_max) {}
};

// No positive lower bound found in the constants search.
struct pseudoconvexity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// mu too small for the configured support radius (needs 2/mu < r0).
struct constraint_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace carleman
