// End-to-end flows behind the CLI subcommands: weight auto-configuration,
// interface analysis (validation, symbol, transmission, pseudoconvexity),
// estimate sweeps, and the partition audit. Pure functions from config-level
// inputs to JSON-ready results; no I/O here.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "carleman/config.hpp"
#include "carleman/report.hpp"

namespace carleman {

// The sweep window is fixed by the caller, so the only free global is the
// weight magnitude. The estimates are invariant under scaling all of
// (alpha_+, alpha_-, beta, epsilon) together, and the quadrature error of the
// exponential factors is governed by the per-cell log growth
// 2 tau |grad w| h. The rule below picks the largest power-of-two scale that
// keeps that growth below cell_budget at the foot of the window, where the r
// ratio attains its maximum; the steeper large-tau rows only need finiteness.
struct AutoConfigOptions {
  double tau_floor = 20.0;   // foot of the intended sweep window
  double cell_budget = 0.8;  // admissible per-cell log growth at tau_floor
  double r0 = 0.5;           // localization radius entering the slope bound
  double delta_max = 0.5;
  int sphere_samples = 2048;
  int null_samples = 128;
};

struct AutoWeights {
  WeightParameters params;
  double alpha_ratio_required = 0.0;  // transmission case-exclusion threshold
  double epsilon_base = 0.0;          // calibrated epsilon at unit scale
  double scale = 1.0;                 // common factor applied to alpha, beta, epsilon
};

inline AutoWeights auto_configure_weights(const CoefficientPair& pair, double grid_h,
                                          const AutoConfigOptions& opt = {}) {
  if (!(grid_h > 0.0)) throw invalid_input_error("auto_configure_weights: grid_h > 0");
  AutoWeights out;
  out.alpha_ratio_required = alpha_ratio(pair, opt.sphere_samples);

  WeightParameters base;
  base.alpha_plus = out.alpha_ratio_required;
  base.alpha_minus = 1.0;
  base.beta = 1.0;
  base.epsilon = 0.0;
  base.delta = opt.delta_max;
  const DerivedConstants d = derived_constants(pair);
  out.epsilon_base = calibrate_epsilon(pair, base, d, opt.null_samples);

  // phi_delta's tangential slot is beta * delta, so delta itself must clear
  // the unit-scale epsilon calibration.
  const double delta = std::min(opt.delta_max, out.epsilon_base);

  // Steepest weight gradient at unit scale over the admissible support:
  // (alpha_+ + beta r0) / delta, attained by phi_delta at x_n = delta r0.
  const double slope = (out.alpha_ratio_required + opt.r0) / delta;
  const double raw = opt.cell_budget / (2.0 * opt.tau_floor * grid_h * slope);
  double scale = std::ldexp(1.0, static_cast<int>(std::floor(std::log2(raw))));
  scale = std::clamp(scale, std::ldexp(1.0, -40), 1.0);

  out.scale = scale;
  out.params.alpha_plus = scale * out.alpha_ratio_required;
  out.params.alpha_minus = scale;
  out.params.beta = scale;
  out.params.epsilon = scale * out.epsilon_base;
  out.params.delta = delta;
  return out;
}

struct AnalyzeResult {
  json report;
  bool certified = false;
  std::vector<std::string> violations;
};

namespace detail {

// Residual of the conjugated factorization: each root sigma of the
// conjugated quadratic must return p to zero after undoing the i tau alpha
// shift of the normal covariable. The minus side (k = 1) states its roots
// with the sign of sigma reflected, so p vanishes at -sigma + i tau alpha.
inline double root_residual(const ComplexSymmetricMatrix& m, int k, double alpha,
                            std::span<const double> xi_prime, double tau) {
  const auto f = with_roots(factor_at(m, xi_prime, k), alpha, tau);
  std::vector<cplx> zeta(m.n);
  for (int j = 0; j + 1 < m.n; ++j) zeta[j] = xi_prime[j];
  double worst = 0.0;
  for (cplx sigma : {f.sigma1, f.sigma2}) {
    zeta[m.n - 1] = (k == 1 ? -sigma : sigma) + cplx(0.0, tau * alpha);
    worst = std::max(worst, std::abs(principal_symbol(m, zeta)));
  }
  return worst;
}

}  // namespace detail

inline AnalyzeResult analyze_run(const CoefficientPair& pair,
                                 const std::optional<WeightParameters>& override_w,
                                 const SamplingConfig& sampling, double grid_h) {
  AnalyzeResult res;
  const ValidationReport val = validate(pair);
  if (!val.pass) throw invalid_input_error("analyze: coefficient pair fails validation");
  const DerivedConstants d = derived_constants(val.lambda0_used, val.Lambda0_used,
                                               pair.dim());

  const double gamma = pair.plus.gamma;
  const bool gamma_ok = gamma < d.gamma0;
  if (!gamma_ok)
    res.violations.push_back("gamma-threshold: gamma = " + std::to_string(gamma) +
                             " is not below gamma0 = " + std::to_string(d.gamma0));

  AutoWeights aw;
  WeightParameters w;
  if (override_w) {
    w = *override_w;
    aw.params = w;
    aw.alpha_ratio_required = alpha_ratio(pair, sampling.sphere);
  } else {
    aw = auto_configure_weights(pair, grid_h);
    w = aw.params;
  }

  // Symbol spot check on a modest direction sample.
  double worst_root = 0.0;
  {
    const auto dirs = unit_sphere_points(pair.dim() - 1, std::min(sampling.xi_grid, 64));
    for (const auto& xi : dirs)
      for (double tau : {0.1, 1.0, 10.0})
        for (int k : {1, 2}) {
          const double alpha = alpha_of(w, side_from_k(k));
          worst_root = std::max(
              worst_root, detail::root_residual(pair.side(side_from_k(k)), k, alpha, xi, tau));
        }
  }

  const auto xi_grid = unit_sphere_points(pair.dim() - 1, sampling.xi_grid);
  const auto tau_grid = default_tau_grid(1.0, 1e3, sampling.tau_grid);
  const TransmissionReport tr = certify_transmission(pair, w, xi_grid, tau_grid);
  if (!tr.certified)
    for (const auto& v : tr.violations)
      res.violations.push_back("transmission " + v.kind + " at tau = " +
                               std::to_string(v.tau));

  json pc = json::object();
  bool pc_ok = true;
  for (Side side : {Side::minus, Side::plus}) {
    const char* name = side == Side::minus ? "minus" : "plus";
    try {
      const double dp0 = 0.45 * alpha_of(w, side) / w.beta;
      const auto cert = certify(pair.side(side), w, d, side, dp0, sampling.sphere,
                                sampling.null_points);
      const double margin = revalidate(pair.side(side), w, side, cert, sampling.sphere, 1);
      json cj = to_json(cert);
      cj["revalidation_margin"] = margin;
      pc[name] = cj;
      if (margin < -1e-8) {
        pc_ok = false;
        res.violations.push_back(std::string("pseudoconvexity revalidation on ") + name);
      }
    } catch (const pseudoconvexity_error& e) {
      pc_ok = false;
      pc[name] = json{{"error", e.what()}};
      res.violations.push_back(std::string("pseudoconvexity on ") + name + ": " + e.what());
    }
  }

  res.certified = val.pass && gamma_ok && tr.certified && pc_ok;
  res.report = json{{"certified", res.certified},
                    {"validation", to_json(val)},
                    {"derived", to_json(d)},
                    {"gamma", gamma},
                    {"gamma_ok", gamma_ok},
                    {"weights", to_json(w)},
                    {"weights_auto_configured", !override_w.has_value()},
                    {"alpha_ratio_required", aw.alpha_ratio_required},
                    {"symbol_max_root_residual", worst_root},
                    {"transmission", to_json(tr)},
                    {"pseudoconvexity", pc},
                    {"violations", res.violations},
                    {"context", json{{"xi_grid", sampling.xi_grid},
                                     {"tau_grid", sampling.tau_grid},
                                     {"sphere_samples", sampling.sphere},
                                     {"null_samples", sampling.null_points},
                                     {"grid_h", grid_h},
                                     {"seed", sampling.seed}}}};
  return res;
}

inline json weights_run(const CoefficientPair& pair, const SamplingConfig& sampling,
                        double grid_h, const AutoConfigOptions& opt = {}) {
  const ValidationReport val = validate(pair);
  if (!val.pass) throw invalid_input_error("weights: coefficient pair fails validation");
  const DerivedConstants d = derived_constants(val.lambda0_used, val.Lambda0_used,
                                               pair.dim());
  AutoConfigOptions o = opt;
  o.sphere_samples = sampling.sphere;
  o.null_samples = sampling.null_points;
  const AutoWeights aw = auto_configure_weights(pair, grid_h, o);
  json j = to_json(aw.params);
  j["gamma0"] = d.gamma0;
  j["alpha_ratio_required"] = aw.alpha_ratio_required;
  j["epsilon_base"] = aw.epsilon_base;
  j["scale"] = aw.scale;
  j["context"] = json{{"grid_h", grid_h},
                      {"sphere_samples", sampling.sphere},
                      {"null_samples", sampling.null_points},
                      {"tau_floor", o.tau_floor},
                      {"cell_budget", o.cell_budget}};
  return j;
}

struct VerifyResult {
  CarlemanReport report;
  WeightParameters weights;
  bool weights_auto = false;
  bool support_shrunk = false;
  double support_radius = 0.0;
  bool pass = false;  // every ratio finite
};

inline VerifyResult verify_run(const CoefficientPair& pair, const RunConfig& cfg) {
  VerifyResult out;
  if (cfg.weights) {
    out.weights = *cfg.weights;
  } else {
    out.weights = auto_configure_weights(pair, cfg.grid.h).params;
    out.weights_auto = true;
  }

  const GridSpec spec = GridSpec::make(pair.dim(), cfg.grid.rho, cfg.grid.h);
  FieldSpec fs = cfg.grid.field;
  const bool full = cfg.sweep.estimate == EstimateId::full;
  const double target = full ? out.weights.delta * cfg.sweep.r0 : cfg.sweep.r0;
  double rs = fs.support_radius > 0.0 ? fs.support_radius : 0.8 * spec.rho;
  if (rs > target) {
    rs = 0.8 * target;  // keep the support inside the localization ball
    out.support_shrunk = true;
  }
  fs.support_radius = rs;
  out.support_radius = rs;

  const GridField field = synthesize_field(spec, fs, pair);
  if (cfg.sweep.estimate == EstimateId::interior) {
    out.report = interior_check(field, pair, out.weights, cfg.sweep.delta,
                                cfg.sweep.tau_min, cfg.sweep.tau_max, cfg.sweep.points,
                                cfg.sweep.interface_gap);
  } else {
    out.report = tau_sweep(cfg.sweep.estimate, field, pair, out.weights,
                           cfg.sweep.tau_min, cfg.sweep.tau_max, cfg.sweep.points,
                           cfg.sweep.r0);
  }
  out.report.family = fs.family;
  out.pass = out.report.bounded;
  return out;
}

inline json verify_json(const VerifyResult& r) {
  json j = to_json(r.report);
  j["weights_auto_configured"] = r.weights_auto;
  j["support_shrunk"] = r.support_shrunk;
  return j;
}

struct PartitionResult {
  PartitionAudit base, doubled;  // audited at mu and 2 mu
  bool pass = false;
};

inline PartitionResult partition_run(const PartitionConfig& cfg) {
  PartitionResult out;
  const std::vector<double> lo(cfg.dim, cfg.lo), hi(cfg.dim, cfg.hi);
  const PartitionGrid g1 = build_partition(cfg.mu, cfg.dim, lo, hi);
  const PartitionGrid g2 = build_partition(2.0 * cfg.mu, cfg.dim, lo, hi);
  out.base = audit_partition(g1, cfg.points_per_axis);
  out.doubled = audit_partition(g2, cfg.points_per_axis);
  auto stable = [](double a, double b) {
    return b <= 1.1 * a + 1e-12 && a <= 1.1 * b + 1e-12;
  };
  out.pass = out.base.pass && out.doubled.pass && stable(out.base.C1, out.doubled.C1) &&
             stable(out.base.C2, out.doubled.C2) && stable(out.base.C3, out.doubled.C3);
  return out;
}

}  // namespace carleman
