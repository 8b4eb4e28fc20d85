// Weighted Sobolev terms of the estimates. Every exponential is evaluated in
// the shifted form exp(2 tau (w - w_ref)) with one shared reference w_ref =
// max of the side weights over the field's support; true values are the
// shifted ones times exp(2 tau w_ref), and only the shared offset keeps the
// LHS/RHS ratio offset-free.
#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "carleman/grid.hpp"
#include "carleman/seminorm.hpp"
#include "carleman/weights.hpp"

namespace carleman {

struct TraceGroups {
  double trace0 = 0.0;   // tau^3 * weighted L2 of the u traces
  double trace1 = 0.0;   // tau   * weighted L2 of the Du traces (all n components)
  double half_u = 0.0;   // tau^2 * [e^{tau w} u]_{1/2}^2, both sides
  double half_Du = 0.0;  // sum_j [d_j(e^{tau w} u)]_{1/2}^2, both sides
};

// Central difference of an interface slice along a tangential axis, zero
// beyond the tangential box.
inline std::vector<cplx> tangential_derivative(const GridSpec& s,
                                               const std::vector<cplx>& slice, int axis) {
  if (axis < 0 || axis >= s.n - 1)
    throw dimension_error("tangential_derivative: axis out of range");
  long stride = 1;
  for (int j = s.n - 2; j > axis; --j) stride *= s.axis_nodes;
  std::vector<cplx> out(slice.size());
  std::vector<long> i;
  for (long t = 0; t < static_cast<long>(slice.size()); ++t) {
    s.tangential_unindex(t, i);
    const cplx up = i[axis] + 1 < s.axis_nodes ? slice[t + stride] : cplx{};
    const cplx dn = i[axis] - 1 >= 0 ? slice[t - stride] : cplx{};
    out[t] = (up - dn) / (2.0 * s.h);
  }
  return out;
}

// Precomputes per-side node weights, derivative arrays, and trace slices for
// one (field, weight, estimate-kind) combination so a tau sweep only pays for
// the exponentials.
class WeightedTermEvaluator {
 public:
  WeightedTermEvaluator(const GridField& field, const WeightParameters& wp,
                        bool use_phi_delta)
      : spec_(field.spec), wp_(wp), use_phi_(use_phi_delta) {
    const int n = spec_.n;
    for (Side side : {Side::plus, Side::minus}) {
      const int si = side_index(side);
      u_[si] = field.side(side);

      w_[si].resize(spec_.total_size);
      std::vector<double> x;
      for (long idx = 0; idx < spec_.total_size; ++idx) {
        spec_.node(idx, x);
        w_[si][idx] = weight_value(wp_, x, side, use_phi_);
      }

      d1_[si].resize(n);
      std::vector<int> k(n, 0);
      for (int j = 0; j < n; ++j) {
        k.assign(n, 0);
        k[j] = 1;
        d1_[si][j] = derivative(field, side, k);
      }
      d2_[si].clear();
      for (int j = 0; j < n; ++j)
        for (int l = j; l < n; ++l) {
          k.assign(n, 0);
          k[j] += 1;
          k[l] += 1;
          d2_[si].push_back(derivative(field, side, k));
        }

      trace_u_[si] = slice_at_interface(spec_, u_[si]);
      trace_d1_[si].resize(n);
      for (int j = 0; j < n; ++j)
        trace_d1_[si][j] = slice_at_interface(spec_, d1_[si][j]);
    }

    // Interface weight is side independent (both branches agree at x_n = 0).
    trace_w_.resize(spec_.tangential_size);
    std::vector<double> x(n, 0.0), xp;
    for (long t = 0; t < spec_.tangential_size; ++t) {
      spec_.tangential_node(t, xp);
      for (int j = 0; j + 1 < n; ++j) x[j] = xp[j];
      x[n - 1] = 0.0;
      trace_w_[t] = weight_value(wp_, x, Side::plus, use_phi_);
    }

    compute_reference(field);
  }

  const GridSpec& spec() const { return spec_; }
  bool uses_phi_delta() const { return use_phi_; }
  const WeightParameters& weights() const { return wp_; }
  double w_ref() const { return w_ref_; }
  double support_oscillation() const { return osc_; }
  double log_offset(double tau) const { return 2.0 * tau * w_ref_; }

  // tau^{3-2k} * sum_sides integral over the half box of |D^k u|^2
  // exp(2 tau (w - w_ref)).
  double volume(double tau, int k) const {
    const int n = spec_.n;
    double total = 0.0;
    for (Side side : {Side::plus, Side::minus}) {
      const int si = side_index(side);
      total += integrate_half(spec_, side, [&](long idx) {
        double mag = 0.0;
        if (k == 0) {
          mag = std::norm(u_[si][idx]);
        } else if (k == 1) {
          for (int j = 0; j < n; ++j) mag += std::norm(d1_[si][j][idx]);
        } else {
          int pos = 0;
          for (int j = 0; j < n; ++j)
            for (int l = j; l < n; ++l, ++pos)
              mag += (j == l ? 1.0 : 2.0) * std::norm(d2_[si][pos][idx]);
        }
        return mag == 0.0 ? 0.0 : mag * std::exp(2.0 * tau * (w_[si][idx] - w_ref_));
      });
    }
    return std::pow(tau, 3 - 2 * k) * total;
  }

  TraceGroups trace_groups(double tau) const {
    const int n = spec_.n;
    TraceGroups g;
    std::vector<int> dims(n - 1, static_cast<int>(spec_.axis_nodes));
    std::vector<cplx> scratch(spec_.tangential_size);
    std::vector<double> xp;

    for (Side side : {Side::plus, Side::minus}) {
      const int si = side_index(side);
      g.trace0 += integrate_interface(spec_, [&](long t) {
        const double mag = std::norm(trace_u_[si][t]);
        return mag == 0.0 ? 0.0 : mag * std::exp(2.0 * tau * (trace_w_[t] - w_ref_));
      });
      for (int j = 0; j < n; ++j)
        g.trace1 += integrate_interface(spec_, [&](long t) {
          const double mag = std::norm(trace_d1_[si][j][t]);
          return mag == 0.0 ? 0.0 : mag * std::exp(2.0 * tau * (trace_w_[t] - w_ref_));
        });

      for (long t = 0; t < spec_.tangential_size; ++t)
        scratch[t] = std::exp(tau * (trace_w_[t] - w_ref_)) * trace_u_[si][t];
      g.half_u += h_half_seminorm(scratch, dims, spec_.h);

      // d_j(e^{tau w} u) = e^{tau w} (d_j u + tau (d_j w) u) on the layer.
      for (int j = 0; j < n; ++j) {
        for (long t = 0; t < spec_.tangential_size; ++t) {
          spec_.tangential_node(t, xp);
          double dw;
          if (j + 1 < n)
            dw = use_phi_ ? -wp_.beta * xp[j] / wp_.delta : -wp_.epsilon * xp[j];
          else
            dw = use_phi_ ? alpha_of(wp_, side) / wp_.delta : alpha_of(wp_, side);
          scratch[t] = std::exp(tau * (trace_w_[t] - w_ref_)) *
                       (trace_d1_[si][j][t] + tau * dw * trace_u_[si][t]);
        }
        g.half_Du += h_half_seminorm(scratch, dims, spec_.h);
      }
    }
    g.trace0 *= tau * tau * tau;
    g.trace1 *= tau;
    g.half_u *= tau * tau;
    return g;
  }

  // Weighted L2 over both half boxes of an externally supplied per-side
  // array pair (the operator image).
  double volume_of(const std::vector<cplx>& plus_arr, const std::vector<cplx>& minus_arr,
                   double tau) const {
    double total = 0.0;
    for (Side side : {Side::plus, Side::minus}) {
      const int si = side_index(side);
      const auto& arr = side == Side::plus ? plus_arr : minus_arr;
      total += integrate_half(spec_, side, [&](long idx) {
        const double mag = std::norm(arr[idx]);
        return mag == 0.0 ? 0.0 : mag * std::exp(2.0 * tau * (w_[si][idx] - w_ref_));
      });
    }
    return total;
  }

  // Weighted interface L2 and the shifted e^{tau w} multiplier for h0/h1.
  double interface_l2(const std::vector<cplx>& trace, double tau) const {
    return integrate_interface(spec_, [&](long t) {
      const double mag = std::norm(trace[t]);
      return mag == 0.0 ? 0.0 : mag * std::exp(2.0 * tau * (trace_w_[t] - w_ref_));
    });
  }

  std::vector<cplx> weighted_trace(const std::vector<cplx>& trace, double tau) const {
    std::vector<cplx> out(trace.size());
    for (long t = 0; t < static_cast<long>(trace.size()); ++t)
      out[t] = std::exp(tau * (trace_w_[t] - w_ref_)) * trace[t];
    return out;
  }

  double interface_weight(long t) const { return trace_w_[t]; }

  // Tangential gradient of the interface weight at node t, component j.
  double interface_weight_grad(long t, int j) const {
    thread_local std::vector<double> xp;
    spec_.tangential_node(t, xp);
    return use_phi_ ? -wp_.beta * xp[j] / wp_.delta : -wp_.epsilon * xp[j];
  }

 private:
  static int side_index(Side s) { return s == Side::plus ? 0 : 1; }

  void compute_reference(const GridField& field) {
    double wmax = -std::numeric_limits<double>::infinity();
    double wmin = std::numeric_limits<double>::infinity();
    bool any = false;
    for (Side side : {Side::plus, Side::minus}) {
      const int si = side_index(side);
      const long lo = side == Side::plus ? spec_.m : 0;
      const long hi = side == Side::plus ? spec_.axis_nodes - 1 : spec_.m;
      for (long in = lo; in <= hi; ++in)
        for (long t = 0; t < spec_.tangential_size; ++t) {
          const long idx = in * spec_.tangential_size + t;
          if (std::abs(field.side(side)[idx]) > 1e-300) {
            any = true;
            wmax = std::max(wmax, w_[si][idx]);
            wmin = std::min(wmin, w_[si][idx]);
          }
        }
    }
    if (!any) {
      w_ref_ = 0.0;
      osc_ = 0.0;
    } else {
      w_ref_ = wmax;
      osc_ = wmax - wmin;
    }
  }

  GridSpec spec_;
  WeightParameters wp_;
  bool use_phi_;
  double w_ref_ = 0.0, osc_ = 0.0;
  std::array<std::vector<cplx>, 2> u_;
  std::array<std::vector<double>, 2> w_;
  std::array<std::vector<std::vector<cplx>>, 2> d1_, d2_;
  std::array<std::vector<cplx>, 2> trace_u_;
  std::array<std::vector<std::vector<cplx>>, 2> trace_d1_;
  std::vector<double> trace_w_;
};

struct ShiftedTerm {
  double value = 0.0;       // shifted by exp(-2 tau w_ref)
  double log_offset = 0.0;  // 2 tau w_ref; true value = value * exp(log_offset)
};

inline ShiftedTerm weighted_volume_term(const GridField& field, const WeightParameters& wp,
                                        double tau, int k, bool use_phi_delta) {
  if (!(tau > 0.0)) throw invalid_input_error("weighted_volume_term: tau must be positive");
  if (k < 0 || k > 2)
    throw invalid_input_error("weighted_volume_term: derivative order must be 0, 1 or 2");
  WeightedTermEvaluator ev(field, wp, use_phi_delta);
  return {ev.volume(tau, k), ev.log_offset(tau)};
}

struct TraceTerms {
  TraceGroups groups;
  double log_offset = 0.0;
};

inline TraceTerms trace_terms(const GridField& field, const WeightParameters& wp,
                              double tau, bool use_phi_delta = false) {
  if (!(tau > 0.0)) throw invalid_input_error("trace_terms: tau must be positive");
  WeightedTermEvaluator ev(field, wp, use_phi_delta);
  return {ev.trace_groups(tau), ev.log_offset(tau)};
}

}  // namespace carleman
