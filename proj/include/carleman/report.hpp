// Deterministic report emission. JSON objects are built with the
// alphabetically-ordered container, doubles round-trip at full precision,
// and no timestamps or machine identifiers are written, so identical runs
// produce byte-identical artifacts.
#pragma once

#include <charconv>
#include <ostream>
#include <string>

#include <json.hpp>

#include "carleman/coefficients.hpp"
#include "carleman/harness.hpp"
#include "carleman/partition.hpp"
#include "carleman/pseudoconvexity.hpp"
#include "carleman/transmission.hpp"
#include "carleman/weights.hpp"

namespace carleman {

using json = nlohmann::json;

// Shortest decimal that round-trips the double; used for CSV cells.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline json to_json(const WeightParameters& w) {
  return json{{"alpha_plus", w.alpha_plus},
              {"alpha_minus", w.alpha_minus},
              {"beta", w.beta},
              {"epsilon", w.epsilon},
              {"delta", w.delta}};
}

inline json to_json(const DerivedConstants& d) {
  return json{{"lambda0", d.lambda0},
              {"Lambda0", d.Lambda0},
              {"lambda_tilde1", d.lambda_tilde1},
              {"lambda_tilde2", d.lambda_tilde2},
              {"gamma0", d.gamma0}};
}

inline json to_json(const SideValidation& s) {
  return json{{"symmetry_defect_M", s.symmetry_defect_M},
              {"symmetry_defect_N", s.symmetry_defect_N},
              {"eig_min_M", s.eig_min_M},
              {"eig_max_M", s.eig_max_M},
              {"eig_min_N", s.eig_min_N},
              {"eig_max_N", s.eig_max_N},
              {"pass", s.pass}};
}

inline json to_json(const ValidationReport& r) {
  return json{{"plus", to_json(r.plus)},
              {"minus", to_json(r.minus)},
              {"lambda0_used", r.lambda0_used},
              {"Lambda0_used", r.Lambda0_used},
              {"bounds_inferred", r.bounds_inferred},
              {"worst_lower_margin", r.worst_lower_margin},
              {"worst_upper_margin", r.worst_upper_margin},
              {"pass", r.pass}};
}

inline json to_json(const TransmissionViolation& v) {
  return json{{"xi_prime", v.xi_prime}, {"tau", v.tau}, {"kind", v.kind}};
}

inline json to_json(const TransmissionReport& r) {
  json viols = json::array();
  for (const auto& v : r.violations) viols.push_back(to_json(v));
  return json{{"certified", r.certified},
              {"min_abs_detT", r.min_abs_detT},
              {"alpha_ratio_required", r.alpha_ratio_required},
              {"alpha_ratio_used", r.alpha_ratio_used},
              {"case1_count", r.case1_count},
              {"case2_count", r.case2_count},
              {"case3_count", r.case3_count},
              {"worst_solve_residual", r.worst_solve_residual},
              {"violations", viols}};
}

inline json to_json(const PseudoconvexityCertificate& c) {
  return json{{"epsilon_used", c.epsilon_used},
              {"min_Q_on_null_set", c.min_Q_on_null_set},
              {"bound_constant", c.bound_constant},
              {"C1", c.C1},
              {"C2", c.C2},
              {"delta_prime", c.delta_prime},
              {"null_point_count", c.null_point_count},
              {"discarded_count", c.discarded_count}};
}

inline json to_json(const PartitionAudit& a) {
  return json{{"max_sum_defect", a.max_sum_defect},
              {"support_ok", a.support_ok},
              {"C1", a.C1},
              {"C2", a.C2},
              {"C3", a.C3},
              {"theta_bar_min", a.theta_bar_min},
              {"overlap_count", a.overlap_count},
              {"pass", a.pass}};
}

inline json to_json(const ReportRow& r) {
  return json{{"tau", r.tau},
              {"lhs_total", r.lhs_total},
              {"rhs_total", r.rhs_total},
              {"ratio", r.ratio},
              {"lhs_k0", r.lhs_k0},
              {"lhs_k1", r.lhs_k1},
              {"lhs_k2", r.lhs_k2},
              {"lhs_trace0", r.lhs_trace0},
              {"lhs_trace1", r.lhs_trace1},
              {"lhs_half_u", r.lhs_half_u},
              {"lhs_half_Du", r.lhs_half_Du},
              {"rhs_op", r.rhs_op},
              {"rhs_half_h1", r.rhs_half_h1},
              {"rhs_half_Dh0", r.rhs_half_Dh0},
              {"rhs_l2_h0", r.rhs_l2_h0},
              {"rhs_l2_h1", r.rhs_l2_h1},
              {"log_offset", r.log_offset},
              {"empty", r.empty}};
}

inline json to_json(const CarlemanReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back(to_json(row));
  return json{{"estimate", estimate_name(r.estimate)},
              {"rows", rows},
              {"max_ratio", r.max_ratio},
              {"argmax_tau", r.argmax_tau},
              {"knee_tau", r.knee_tau},
              {"bounded", r.bounded},
              {"grid", json{{"n", r.grid.n}, {"rho", r.grid.rho}, {"h", r.grid.h}}},
              {"weights", to_json(r.weights)},
              {"field_support_radius", r.field_support_radius},
              {"family", r.family}};
}

inline constexpr const char* kSweepCsvHeader =
    "estimate_id,tau,lhs_total,rhs_total,ratio,lhs_k0,lhs_k1,lhs_k2,lhs_trace0,"
    "lhs_trace1,lhs_half_u,lhs_half_Du,rhs_op,rhs_half_h1,rhs_half_Dh0,rhs_l2_h0,"
    "rhs_l2_h1,log_offset";

inline void write_sweep_csv(std::ostream& out, const CarlemanReport& r) {
  out << kSweepCsvHeader << "\n";
  const std::string id = estimate_name(r.estimate);
  for (const auto& w : r.rows) {
    out << id << ',' << format_double(w.tau) << ',' << format_double(w.lhs_total) << ','
        << format_double(w.rhs_total) << ',' << format_double(w.ratio) << ','
        << format_double(w.lhs_k0) << ',' << format_double(w.lhs_k1) << ','
        << format_double(w.lhs_k2) << ',' << format_double(w.lhs_trace0) << ','
        << format_double(w.lhs_trace1) << ',' << format_double(w.lhs_half_u) << ','
        << format_double(w.lhs_half_Du) << ',' << format_double(w.rhs_op) << ','
        << format_double(w.rhs_half_h1) << ',' << format_double(w.rhs_half_Dh0) << ','
        << format_double(w.rhs_l2_h0) << ',' << format_double(w.rhs_l2_h1) << ','
        << format_double(w.log_offset) << "\n";
  }
}

inline constexpr const char* kPartitionCsvHeader =
    "mu,dim,max_sum_defect,theta_bar_min,overlap_count,C1,C2,C3,support_ok,pass";

inline void write_partition_csv_row(std::ostream& out, double mu, int dim,
                                    const PartitionAudit& a) {
  out << format_double(mu) << ',' << dim << ',' << format_double(a.max_sum_defect) << ','
      << format_double(a.theta_bar_min) << ',' << a.overlap_count << ','
      << format_double(a.C1) << ',' << format_double(a.C2) << ',' << format_double(a.C3)
      << ',' << (a.support_ok ? 1 : 0) << ',' << (a.pass ? 1 : 0) << "\n";
}

}  // namespace carleman
