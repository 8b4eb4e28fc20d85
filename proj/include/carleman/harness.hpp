// Assembly of the weighted estimates: operator application per coefficient
// mode, itemized LHS/RHS rows, tau sweeps with a shared-shift overflow guard,
// the interior (single operator, no interface) variant, and the bookkeeping
// check for the near/far interface split.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include "carleman/partition.hpp"
#include "carleman/terms.hpp"
#include "carleman/transmission.hpp"

namespace carleman {

enum class EstimateId { frozen, vertical, full, interior };

inline const char* estimate_name(EstimateId id) {
  switch (id) {
    case EstimateId::frozen: return "frozen";
    case EstimateId::vertical: return "vertical";
    case EstimateId::full: return "full";
    default: return "interior";
  }
}

inline EstimateId estimate_from_name(const std::string& s) {
  if (s == "frozen") return EstimateId::frozen;
  if (s == "vertical") return EstimateId::vertical;
  if (s == "full") return EstimateId::full;
  if (s == "interior") return EstimateId::interior;
  throw invalid_input_error("unknown estimate id: " + s);
}

enum class CoefficientMode { frozen, vertical, full };

namespace detail {

inline ComplexSymmetricMatrix pick_side(
    const std::pair<ComplexSymmetricMatrix, ComplexSymmetricMatrix>& p, Side s) {
  return s == Side::plus ? p.first : p.second;
}

// Coefficient lookup per mode: frozen uses the pair's constant matrices
// (equal to the spatial field at 0 when one exists), vertical samples the
// spatial field along (0', delta x_n), full samples it at x.
inline ComplexSymmetricMatrix coefficient_at(const CoefficientPair& pair, Side side,
                                             CoefficientMode mode, double delta,
                                             const std::vector<double>& x) {
  if (mode == CoefficientMode::frozen || !pair.spatial_field) return pair.side(side);
  std::vector<double> q(x.size(), 0.0);
  if (mode == CoefficientMode::vertical) {
    q.back() = delta * x.back();
  } else {
    q = x;
  }
  return pick_side(pair.spatial_field(q), side);
}

}  // namespace detail

// Divergence form application: L u = sum_l d_l ( sum_j a_lj d_j u ) per side,
// nested central differences. The flux arrays are materialized first, so
// variable coefficients sit inside the outer difference as the divergence
// form requires.
inline std::pair<std::vector<cplx>, std::vector<cplx>> apply_operator(
    const GridField& f, const CoefficientPair& pair, CoefficientMode mode,
    double delta = 1.0) {
  const GridSpec& s = f.spec;
  const int n = s.n;
  std::pair<std::vector<cplx>, std::vector<cplx>> out;

  for (Side side : {Side::plus, Side::minus}) {
    // d_j u for all axes
    std::vector<std::vector<cplx>> du(n);
    std::vector<int> k(n, 0);
    for (int j = 0; j < n; ++j) {
      k.assign(n, 0);
      k[j] = 1;
      du[j] = derivative(f, side, k);
    }

    // flux_l = sum_j a_lj d_j u, with a evaluated per node as the mode asks
    std::vector<std::vector<cplx>> flux(n, std::vector<cplx>(s.total_size));
    std::vector<double> x;
    const bool constant = mode == CoefficientMode::frozen || !pair.spatial_field;
    const ComplexSymmetricMatrix frozen = pair.side(side);
    for (long idx = 0; idx < s.total_size; ++idx) {
      ComplexSymmetricMatrix a = frozen;
      if (!constant) {
        s.node(idx, x);
        a = detail::coefficient_at(pair, side, mode, delta, x);
      }
      for (int l = 0; l < n; ++l) {
        cplx acc{};
        for (int j = 0; j < n; ++j) acc += a.a(l, j) * du[j][idx];
        flux[l][idx] = acc;
      }
    }

    // L u = sum_l d_l flux_l; central difference of each flux array
    GridField tmp;
    tmp.spec = s;
    std::vector<cplx>& res = (side == Side::plus ? out.first : out.second);
    res.assign(s.total_size, cplx{});
    for (int l = 0; l < n; ++l) {
      tmp.plus = std::move(flux[l]);
      std::vector<int> kk(n, 0);
      kk[l] = 1;
      const auto dl = derivative(tmp, Side::plus, kk);
      for (long idx = 0; idx < s.total_size; ++idx) res[idx] += dl[idx];
    }
  }
  return out;
}

// Non divergence form P(delta x, D) u = sum_{j,l} a_jl(delta x) d_j d_l u on
// one side, compact second difference stencils; the interior estimate's
// operator.
// Nondivergence form with the same nested central differences as the
// divergence path, so the two assemblies stay comparable even where the
// weighted mass concentrates near the support edge.
inline std::vector<cplx> apply_nondivergence(const GridField& f, Side side,
                                             const CoefficientPair& pair, double delta) {
  const GridSpec& s = f.spec;
  const int n = s.n;
  GridField tmp;
  tmp.spec = s;
  tmp.support_radius = f.support_radius;
  std::vector<std::vector<cplx>> d2;
  std::vector<int> k(n, 0);
  for (int l = 0; l < n; ++l) {
    k.assign(n, 0);
    k[l] = 1;
    auto dl = derivative(f, side, k);
    (side == Side::plus ? tmp.plus : tmp.minus) = std::move(dl);
    for (int j = 0; j <= l; ++j) {
      k.assign(n, 0);
      k[j] = 1;
      d2.push_back(derivative(tmp, side, k));
    }
  }

  std::vector<cplx> res(s.total_size, cplx{});
  std::vector<double> x, q;
  const bool constant = !pair.spatial_field;
  const ComplexSymmetricMatrix frozen = pair.side(side);
  for (long idx = 0; idx < s.total_size; ++idx) {
    ComplexSymmetricMatrix a = frozen;
    if (!constant) {
      s.node(idx, x);
      q = x;
      for (double& c : q) c *= delta;
      a = detail::pick_side(pair.spatial_field(q), side);
    }
    cplx acc{};
    int pos = 0;
    for (int l = 0; l < n; ++l)
      for (int j = 0; j <= l; ++j, ++pos)
        acc += (j == l ? 1.0 : 2.0) * a.a(j, l) * d2[pos][idx];
    res[idx] = acc;
  }
  return res;
}

struct ReportRow {
  double tau = 0.0;
  double lhs_total = 0.0, rhs_total = 0.0, ratio = 0.0;
  double lhs_k0 = 0.0, lhs_k1 = 0.0, lhs_k2 = 0.0;
  double lhs_trace0 = 0.0, lhs_trace1 = 0.0, lhs_half_u = 0.0, lhs_half_Du = 0.0;
  double rhs_op = 0.0, rhs_half_h1 = 0.0, rhs_half_Dh0 = 0.0;
  double rhs_l2_h0 = 0.0, rhs_l2_h1 = 0.0;
  double log_offset = 0.0;
  bool empty = false;  // all terms zero (zero field)
};

struct CarlemanReport {
  EstimateId estimate = EstimateId::frozen;
  std::vector<ReportRow> rows;
  double max_ratio = 0.0;
  double argmax_tau = 0.0;
  double knee_tau = 0.0;  // first tau where the ratio stops growing
  bool bounded = false;   // every ratio finite
  GridSpec grid;
  WeightParameters weights;
  double field_support_radius = 0.0;
  std::string family;
};

// Overflow budget: the shifted integrands span exp(-2 tau osc); past
// 2 tau osc = 1350 even the shifted form degenerates to a single node in
// double precision, so the sweep refuses and names the admissible tau.
inline void check_overflow_budget(double tau_max, double osc) {
  constexpr double budget = 1350.0;
  if (2.0 * tau_max * osc > budget) {
    const double adm = osc > 0.0 ? budget / (2.0 * osc) : tau_max;
    throw overflow_budget_error(
        "tau range exceeds the weighted-term budget; admissible tau_max = " +
            std::to_string(adm),
        adm);
  }
}

// One itemized row at a fixed tau. The evaluator carries the shared shift;
// jump data and the operator image are supplied by the caller so sweeps reuse
// them across tau.
inline ReportRow assemble_row(const WeightedTermEvaluator& ev, const JumpData& jd,
                              const std::vector<cplx>& op_plus,
                              const std::vector<cplx>& op_minus, double tau) {
  ReportRow row;
  row.tau = tau;
  row.log_offset = ev.log_offset(tau);

  row.lhs_k0 = ev.volume(tau, 0);
  row.lhs_k1 = ev.volume(tau, 1);
  row.lhs_k2 = ev.volume(tau, 2);
  const TraceGroups tg = ev.trace_groups(tau);
  row.lhs_trace0 = tg.trace0;
  row.lhs_trace1 = tg.trace1;
  row.lhs_half_u = tg.half_u;
  row.lhs_half_Du = tg.half_Du;
  row.lhs_total = row.lhs_k0 + row.lhs_k1 + row.lhs_k2 + row.lhs_trace0 +
                  row.lhs_trace1 + row.lhs_half_u + row.lhs_half_Du;

  row.rhs_op = ev.volume_of(op_plus, op_minus, tau);
  row.rhs_l2_h0 = tau * tau * tau * ev.interface_l2(jd.h0, tau);
  row.rhs_l2_h1 = tau * ev.interface_l2(jd.h1, tau);

  const GridSpec& s = ev.spec();
  std::vector<int> dims(s.n - 1, static_cast<int>(s.axis_nodes));
  row.rhs_half_h1 = h_half_seminorm(ev.weighted_trace(jd.h1, tau), dims, s.h);
  for (int j = 0; j + 1 < s.n; ++j) {
    const auto dh0 = tangential_derivative(s, jd.h0, j);
    std::vector<cplx> g(s.tangential_size);
    for (long t = 0; t < s.tangential_size; ++t)
      g[t] = dh0[t] + tau * ev.interface_weight_grad(t, j) * jd.h0[t];
    row.rhs_half_Dh0 += h_half_seminorm(ev.weighted_trace(g, tau), dims, s.h);
  }
  row.rhs_total =
      row.rhs_op + row.rhs_half_h1 + row.rhs_half_Dh0 + row.rhs_l2_h0 + row.rhs_l2_h1;

  if (row.lhs_total == 0.0 && row.rhs_total == 0.0) {
    row.empty = true;
    row.ratio = 0.0;
  } else if (row.rhs_total == 0.0) {
    row.ratio = std::numeric_limits<double>::infinity();
  } else {
    row.ratio = row.lhs_total / row.rhs_total;
  }
  return row;
}

namespace detail {

inline void check_support(const GridField& f, double limit, const char* what) {
  if (f.support_radius > limit + 1e-12)
    throw support_error(std::string(what) + ": field support radius " +
                        std::to_string(f.support_radius) + " exceeds " +
                        std::to_string(limit));
}

inline int harness_threads() {
  if (const char* env = std::getenv("CARLEMAN_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

inline std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo) || points < 1)
    throw invalid_input_error("tau grid: need 0 < tau_min <= tau_max, points >= 1");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i)
    g[i] = points > 1 ? lo * std::pow(hi / lo, double(i) / (points - 1)) : lo;
  return g;
}

inline void finalize_report(CarlemanReport& rep) {
  rep.bounded = !rep.rows.empty();
  rep.max_ratio = 0.0;
  rep.argmax_tau = 0.0;
  rep.knee_tau = 0.0;
  double prev = -1.0;
  bool knee_found = false;
  for (const auto& row : rep.rows) {
    if (!std::isfinite(row.ratio)) rep.bounded = false;
    if (row.ratio > rep.max_ratio) {
      rep.max_ratio = row.ratio;
      rep.argmax_tau = row.tau;
    }
    if (!knee_found && prev >= 0.0 && row.ratio <= prev) {
      rep.knee_tau = row.tau;
      knee_found = true;
    }
    prev = row.ratio;
  }
  if (!knee_found && !rep.rows.empty()) rep.knee_tau = rep.rows.back().tau;
}

}  // namespace detail

// Fixed-tau assembly of one estimate. Support preconditions: radius <= r0 for
// the psi weighted estimates, <= delta r0 for the phi_delta one.
inline ReportRow assemble(EstimateId id, const GridField& field, const CoefficientPair& pair,
                          const WeightParameters& weights, double tau, double r0 = 0.5) {
  const bool use_phi = id == EstimateId::full;
  if (use_phi)
    detail::check_support(field, weights.delta * r0, "full estimate");
  else
    detail::check_support(field, r0, estimate_name(id));

  const CoefficientMode mode = id == EstimateId::frozen     ? CoefficientMode::frozen
                               : id == EstimateId::vertical ? CoefficientMode::vertical
                                                            : CoefficientMode::full;
  const auto op = apply_operator(field, pair, mode,
                                 id == EstimateId::vertical ? weights.delta : 1.0);
  const JumpData jd = id == EstimateId::full ? jump_data(field, pair, true)
                                             : jump_data(field, pair.plus, pair.minus);
  WeightedTermEvaluator ev(field, weights, use_phi);
  check_overflow_budget(tau, ev.support_oscillation());
  return assemble_row(ev, jd, op.first, op.second, tau);
}

// Logarithmic tau sweep of one estimate; rows computed concurrently, merged
// in tau order.
inline CarlemanReport tau_sweep(EstimateId id, const GridField& field,
                                const CoefficientPair& pair, const WeightParameters& weights,
                                double tau_min, double tau_max, int points,
                                double r0 = 0.5) {
  if (id == EstimateId::interior)
    throw invalid_input_error("tau_sweep: use interior_check for the interior estimate");
  const bool use_phi = id == EstimateId::full;
  if (use_phi)
    detail::check_support(field, weights.delta * r0, "full estimate");
  else
    detail::check_support(field, r0, estimate_name(id));

  const CoefficientMode mode = id == EstimateId::frozen     ? CoefficientMode::frozen
                               : id == EstimateId::vertical ? CoefficientMode::vertical
                                                            : CoefficientMode::full;
  const auto op = apply_operator(field, pair, mode,
                                 id == EstimateId::vertical ? weights.delta : 1.0);
  const JumpData jd = id == EstimateId::full ? jump_data(field, pair, true)
                                             : jump_data(field, pair.plus, pair.minus);
  WeightedTermEvaluator ev(field, weights, use_phi);
  check_overflow_budget(tau_max, ev.support_oscillation());

  const auto taus = detail::log_grid(tau_min, tau_max, points);
  CarlemanReport rep;
  rep.estimate = id;
  rep.grid = field.spec;
  rep.weights = weights;
  rep.field_support_radius = field.support_radius;
  rep.rows.resize(taus.size());

  const int workers = std::min<int>(detail::harness_threads(), points);
  std::atomic<size_t> next{0};
  auto work = [&]() {
    for (size_t i = next.fetch_add(1); i < taus.size(); i = next.fetch_add(1))
      rep.rows[i] = assemble_row(ev, jd, op.first, op.second, taus[i]);
  };
  std::vector<std::future<void>> futs;
  for (int t = 1; t < workers; ++t)
    futs.push_back(std::async(std::launch::async, work));
  work();
  for (auto& f : futs) f.get();

  detail::finalize_report(rep);
  return rep;
}

// Interior estimate: single operator, no interface groups. The field must
// vanish within the stated gap of the interface.
inline CarlemanReport interior_check(const GridField& field, const CoefficientPair& pair,
                                     const WeightParameters& weights, double delta,
                                     double tau_min, double tau_max, int points,
                                     double interface_gap = 0.0) {
  const GridSpec& s = field.spec;
  const double gap = interface_gap > 0.0 ? interface_gap : 4.0 * s.h;
  for (Side side : {Side::plus, Side::minus}) {
    const auto& u = field.side(side);
    for (long idx = 0; idx < s.total_size; ++idx) {
      const long in = idx / s.tangential_size;
      if (std::abs(s.coord(in)) < gap && std::abs(u[idx]) > tol().support_vanish)
        throw support_error("interior_check: field does not vanish near the interface");
    }
  }

  const auto opp = apply_nondivergence(field, Side::plus, pair, delta);
  const auto opm = apply_nondivergence(field, Side::minus, pair, delta);
  WeightedTermEvaluator ev(field, weights, false);
  check_overflow_budget(tau_max, ev.support_oscillation());

  const auto taus = detail::log_grid(tau_min, tau_max, points);
  CarlemanReport rep;
  rep.estimate = EstimateId::interior;
  rep.grid = s;
  rep.weights = weights;
  rep.field_support_radius = field.support_radius;
  rep.rows.resize(taus.size());
  for (size_t i = 0; i < taus.size(); ++i) {
    const double tau = taus[i];
    ReportRow row;
    row.tau = tau;
    row.log_offset = ev.log_offset(tau);
    row.lhs_k0 = ev.volume(tau, 0);
    row.lhs_k1 = ev.volume(tau, 1);
    row.lhs_k2 = ev.volume(tau, 2);
    row.lhs_total = row.lhs_k0 + row.lhs_k1 + row.lhs_k2;
    row.rhs_op = ev.volume_of(opp, opm, tau);
    row.rhs_total = row.rhs_op;
    if (row.lhs_total == 0.0 && row.rhs_total == 0.0) {
      row.empty = true;
    } else if (row.rhs_total == 0.0) {
      row.ratio = std::numeric_limits<double>::infinity();
    } else {
      row.ratio = row.lhs_total / row.rhs_total;
    }
    rep.rows[i] = row;
  }
  detail::finalize_report(rep);
  return rep;
}

struct SplitReport {
  double mu = 0.0;
  double lhs_u = 0.0, lhs_v = 0.0, lhs_z = 0.0;
  double slack = 0.0;  // 2 (lhs_v + lhs_z) - lhs_u, nonnegative when pass
  double z_trace_total = 0.0;
  double reconstruction_error = 0.0;  // max |v + z - u|
  bool pass = false;
};

// Near/far interface split bookkeeping: v = eta_mu(x_n) u keeps the traces,
// z = u - v vanishes on |x_n| <= 1/mu, and each quadratic LHS group obeys
// group(u) <= 2 group(v) + 2 group(z).
inline SplitReport split_check(const GridField& field, const CoefficientPair& pair,
                               const WeightParameters& weights, double mu, double tau) {
  (void)pair;
  const GridSpec& s = field.spec;
  const VerticalCutoff vc = vertical_cutoff(mu, field.support_radius);
  if (!(1.0 / mu >= 2.0 * s.h))
    throw constraint_error("split_check: cutoff plateau narrower than two cells");

  GridField v, z;
  v.spec = z.spec = s;
  v.support_radius = z.support_radius = field.support_radius;
  v.plus.resize(s.total_size);
  v.minus.resize(s.total_size);
  z.plus.resize(s.total_size);
  z.minus.resize(s.total_size);
  double recon = 0.0;
  for (long idx = 0; idx < s.total_size; ++idx) {
    const long in = idx / s.tangential_size;
    const double xn = s.coord(in);
    const double eta = vc.near(xn);
    for (Side side : {Side::plus, Side::minus}) {
      const cplx u = field.side(side)[idx];
      (side == Side::plus ? v.plus : v.minus)[idx] = eta * u;
      (side == Side::plus ? z.plus : z.minus)[idx] = (1.0 - eta) * u;
      recon = std::max(recon, std::abs(eta * u + (1.0 - eta) * u - u));
    }
  }

  auto lhs_of = [&](const GridField& g, TraceGroups* tg_out) {
    WeightedTermEvaluator ev(g, weights, false);
    check_overflow_budget(tau, ev.support_oscillation());
    const TraceGroups tg = ev.trace_groups(tau);
    if (tg_out) *tg_out = tg;
    return ev.volume(tau, 0) + ev.volume(tau, 1) + ev.volume(tau, 2) + tg.trace0 +
           tg.trace1 + tg.half_u + tg.half_Du;
  };

  SplitReport rep;
  rep.mu = mu;
  rep.reconstruction_error = recon;
  TraceGroups tz;
  rep.lhs_u = lhs_of(field, nullptr);
  rep.lhs_v = lhs_of(v, nullptr);
  rep.lhs_z = lhs_of(z, &tz);
  rep.z_trace_total = tz.trace0 + tz.trace1 + tz.half_u + tz.half_Du;
  rep.slack = 2.0 * (rep.lhs_v + rep.lhs_z) - rep.lhs_u;
  rep.pass = rep.slack >= -1e-10 * rep.lhs_u && rep.z_trace_total == 0.0 &&
             rep.reconstruction_error <= 1e-14;
  return rep;
}

}  // namespace carleman
