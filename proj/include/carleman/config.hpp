// Run configuration: JSON ingestion for the command-line tools. Every knob a
// subcommand consumes lives here so that a config file plus the flag
// overrides fully determine a run.
#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "carleman/coefficients.hpp"
#include "carleman/errors.hpp"
#include "carleman/grid.hpp"
#include "carleman/harness.hpp"
#include "carleman/weights.hpp"

namespace carleman {

// Optional multiplicative coefficient perturbation A(x) = (1 + a sin(sum x_j)) A(0).
struct LipschitzSpec {
  double amplitude = 0.0;
  double M0 = 0.0;  // Lipschitz constant reported to the harness; defaults to amplitude
};

struct GridConfig {
  double rho = 0.5;
  double h = 1.0 / 64;
  FieldSpec field;
};

struct SweepConfig {
  EstimateId estimate = EstimateId::frozen;
  double tau_min = 20.0;
  double tau_max = 200.0;
  int points = 12;
  double delta = 0.1;  // coefficient dilation for the interior estimate
  double r0 = 0.5;
  double interface_gap = 0.0;  // 0 selects 4h
};

struct SamplingConfig {
  int sphere = 4096;
  int null_points = 256;
  int xi_grid = 512;
  int tau_grid = 33;
  long seed = 1234;
};

struct PartitionConfig {
  double mu = 4.0;
  int dim = 2;
  double lo = -1.0;
  double hi = 1.0;
  int points_per_axis = 9;
};

struct RunConfig {
  std::optional<CoefficientPair> pair;
  LipschitzSpec lipschitz;
  std::optional<WeightParameters> weights;  // absent: auto-configure
  GridConfig grid;
  SweepConfig sweep;
  SamplingConfig sampling;
  PartitionConfig partition;
  std::string out_dir = ".";
};

namespace detail {

inline std::vector<double> parse_matrix(const nlohmann::json& j, int n,
                                        const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw invalid_input_error("config: " + what + " must be an " + std::to_string(n) +
                              "-row array");
  std::vector<double> m(n * n);
  for (int r = 0; r < n; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw invalid_input_error("config: " + what + " row " + std::to_string(r) +
                                " must have " + std::to_string(n) + " entries");
    for (int c = 0; c < n; ++c) m[r * n + c] = row[c].get<double>();
  }
  return m;
}

inline ComplexSymmetricMatrix parse_side(const nlohmann::json& j, int n, double gamma,
                                         const std::string& what) {
  if (!j.is_object() || !j.contains("M"))
    throw invalid_input_error("config: coefficients." + what + " needs an M matrix");
  ComplexSymmetricMatrix m;
  m.n = n;
  m.gamma = gamma;
  m.M = parse_matrix(j.at("M"), n, "coefficients." + what + ".M");
  m.N = j.contains("N") ? parse_matrix(j.at("N"), n, "coefficients." + what + ".N") : m.M;
  return m;
}

inline cplx parse_amp(const nlohmann::json& j, const std::string& what) {
  if (j.is_number()) return cplx(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2)
    return cplx(j[0].get<double>(), j[1].get<double>());
  throw invalid_input_error("config: " + what + " must be a number or [re, im]");
}

}  // namespace detail

inline CoefficientPair parse_coefficients(const nlohmann::json& j, LipschitzSpec* lip) {
  if (!j.is_object()) throw invalid_input_error("config: coefficients must be an object");
  if (!j.contains("plus")) throw invalid_input_error("config: coefficients missing \"plus\"");
  if (!j.contains("minus")) throw invalid_input_error("config: coefficients missing \"minus\"");
  const int n = j.value("n", 2);
  if (n < 2) throw invalid_input_error("config: coefficients.n must be >= 2");
  const double gamma = j.value("gamma", 0.0);

  CoefficientPair pair;
  pair.plus = detail::parse_side(j.at("plus"), n, gamma, "plus");
  pair.minus = detail::parse_side(j.at("minus"), n, gamma, "minus");
  pair.lambda0 = j.value("lambda0", 0.0);
  pair.Lambda0 = j.value("Lambda0", 0.0);

  if (j.contains("lipschitz")) {
    const auto& l = j.at("lipschitz");
    LipschitzSpec spec;
    spec.amplitude = l.value("amplitude", 0.1);
    spec.M0 = l.value("M0", spec.amplitude);
    if (!(std::abs(spec.amplitude) < 1.0))
      throw invalid_input_error("config: lipschitz.amplitude must stay below 1");
    pair.M0 = spec.M0;
    pair.spatial_field = [plus = pair.plus, minus = pair.minus,
                          a = spec.amplitude](const std::vector<double>& x) {
      double s = 0.0;
      for (double c : x) s += c;
      const double g = 1.0 + a * std::sin(s);
      return std::make_pair(scaled(plus, g), scaled(minus, g));
    };
    if (lip) *lip = spec;
  }
  return pair;
}

inline RunConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw invalid_input_error("config: top level must be an object");
  RunConfig cfg;

  if (j.contains("coefficients"))
    cfg.pair = parse_coefficients(j.at("coefficients"), &cfg.lipschitz);

  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    WeightParameters wp;
    for (const char* key : {"alpha_plus", "alpha_minus", "beta", "epsilon", "delta"})
      if (!w.contains(key))
        throw invalid_input_error(std::string("config: weights override missing \"") + key +
                                  "\"; give all five or none");
    wp.alpha_plus = w.at("alpha_plus").get<double>();
    wp.alpha_minus = w.at("alpha_minus").get<double>();
    wp.beta = w.at("beta").get<double>();
    wp.epsilon = w.at("epsilon").get<double>();
    wp.delta = w.at("delta").get<double>();
    cfg.weights = wp;
  }

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    cfg.grid.rho = g.value("rho", cfg.grid.rho);
    cfg.grid.h = g.value("h", cfg.grid.h);
    cfg.grid.field.family = g.value("family", cfg.grid.field.family);
    cfg.grid.field.support_radius = g.value("support_radius", 0.0);
    if (g.contains("h0_amp")) cfg.grid.field.h0_amp = detail::parse_amp(g.at("h0_amp"), "grid.h0_amp");
    if (g.contains("h1_amp")) cfg.grid.field.h1_amp = detail::parse_amp(g.at("h1_amp"), "grid.h1_amp");
  }

  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    if (s.contains("estimate")) cfg.sweep.estimate = estimate_from_name(s.at("estimate").get<std::string>());
    cfg.sweep.tau_min = s.value("tau_min", cfg.sweep.tau_min);
    cfg.sweep.tau_max = s.value("tau_max", cfg.sweep.tau_max);
    cfg.sweep.points = s.value("points", cfg.sweep.points);
    cfg.sweep.delta = s.value("delta", cfg.sweep.delta);
    cfg.sweep.r0 = s.value("r0", cfg.sweep.r0);
    cfg.sweep.interface_gap = s.value("interface_gap", cfg.sweep.interface_gap);
    if (!(cfg.sweep.tau_min > 0.0) || !(cfg.sweep.tau_max >= cfg.sweep.tau_min))
      throw invalid_input_error("config: sweep needs 0 < tau_min <= tau_max");
    if (cfg.sweep.points < 1) throw invalid_input_error("config: sweep.points must be >= 1");
  }

  if (j.contains("sampling")) {
    const auto& s = j.at("sampling");
    cfg.sampling.sphere = s.value("sphere", cfg.sampling.sphere);
    cfg.sampling.null_points = s.value("null_points", cfg.sampling.null_points);
    cfg.sampling.xi_grid = s.value("xi_grid", cfg.sampling.xi_grid);
    cfg.sampling.tau_grid = s.value("tau_grid", cfg.sampling.tau_grid);
    cfg.sampling.seed = s.value("seed", cfg.sampling.seed);
  }

  if (j.contains("partition")) {
    const auto& p = j.at("partition");
    cfg.partition.mu = p.value("mu", cfg.partition.mu);
    cfg.partition.dim = p.value("dim", cfg.partition.dim);
    cfg.partition.lo = p.value("lo", cfg.partition.lo);
    cfg.partition.hi = p.value("hi", cfg.partition.hi);
    cfg.partition.points_per_axis = p.value("points_per_axis", cfg.partition.points_per_axis);
  }

  if (j.contains("output")) cfg.out_dir = j.at("output").value("dir", cfg.out_dir);
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input_error("config: cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input_error("config: " + path + ": " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input_error("config: " + path + ": " + e.what());
  }
}

}  // namespace carleman
