// Release gate. Each numbered check prints exactly one [PASS]/[FAIL] line
// with its measured values and wall time; the process exits nonzero if any
// check fails. Runs standalone (no test framework) so the output doubles as
// the certification record for a build.
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "carleman/cli.hpp"
#include "support.hpp"

#ifndef CARLEMAN_CONFIG_DIR
#define CARLEMAN_CONFIG_DIR "configs"
#endif

using namespace carleman;
using testsupport::contrast_pair;
using testsupport::isotropic_equal_pair;
using testsupport::random_unit_vector;
using testsupport::random_validated_pair;

namespace {

int g_failures = 0;

class Timer {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

void report(int idx, bool ok, const std::string& detail, double ms) {
  std::printf("[%s] %d. %s (%.1f ms)\n", ok ? "PASS" : "FAIL", idx, detail.c_str(), ms);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

WeightParameters weights_of(double ap, double am, double beta, double eps, double delta) {
  WeightParameters w;
  w.alpha_plus = ap;
  w.alpha_minus = am;
  w.beta = beta;
  w.epsilon = eps;
  w.delta = delta;
  return w;
}

// Multiplicative sinusoidal coefficient perturbation, matching the config
// loader's lipschitz block.
CoefficientPair lipschitz_pair(CoefficientPair pair, double amp) {
  pair.M0 = amp;
  pair.spatial_field = [plus = pair.plus, minus = pair.minus,
                        amp](const std::vector<double>& x) {
    double s = 0.0;
    for (double c : x) s += c;
    const double g = 1.0 + amp * std::sin(s);
    return std::make_pair(scaled(plus, g), scaled(minus, g));
  };
  return pair;
}

GridField make_field(int n, double rho, double h, const char* family, double rs,
                     const CoefficientPair& pair) {
  const GridSpec spec = GridSpec::make(n, rho, h);
  FieldSpec fs;
  fs.family = family;
  fs.support_radius = rs;
  return synthesize_field(spec, fs, pair);
}

template <class F>
std::vector<std::complex<double>> sample_1d(F&& f, double L, int N) {
  std::vector<std::complex<double>> out(N);
  const double h = 2.0 * L / N;
  for (int i = 0; i < N; ++i) out[i] = f(-L + h * i);
  return out;
}

// --- 1. closed-form gamma threshold -----------------------------------------

void check_gamma_formula() {
  Timer t;
  const double g112 = gamma_threshold(1.0, 1.0, 2);
  const double g123 = gamma_threshold(1.0, 2.0, 3);
  const double e1 = std::abs(g112 - 0.5773503);
  const double e2 = std::abs(g123 - 0.0145803);
  const double ms = t.ms();
  const bool ok = e1 <= 1e-6 && e2 <= 1e-6 && ms < 1.0;
  report(1, ok,
         fmt("gamma0 closed form: gamma0(1,1,2)=%.8f gamma0(1,2,3)=%.8f max_err=%.2e",
             g112, g123, std::max(e1, e2)),
         ms);
}

// --- 2 and 3. Monte-Carlo root-sign and factor-bound invariants --------------

void check_root_signs_and_factor_bound_slack() {
  constexpr int kTrials = 10000;
  const double taus[] = {0.1, 1.0, 10.0};

  Timer t2;
  int sign_fail = 0;
  double worst_sign = std::numeric_limits<double>::infinity();
  {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> ua(0.25, 4.0);
    for (int trial = 0; trial < kTrials; ++trial) {
      const int n = trial % 2 == 0 ? 2 : 3;
      const CoefficientPair pair = random_validated_pair(n, rng);
      const auto xi = random_unit_vector(n - 1, rng);
      const double a2 = ua(rng), a1 = ua(rng);
      for (double tau : taus) {
        const auto fp = with_roots(factor_at(pair, 2, xi), a2, tau);
        const auto fm = with_roots(factor_at(pair, 1, xi), a1, tau);
        const double m2 = -tau * a2 - fp.sigma1.imag();  // >= -1e-10 required
        const double m1 = fm.sigma1.imag() - tau * a1;
        worst_sign = std::min({worst_sign, m2, m1});
        if (m2 < -1e-10 || m1 < -1e-10) ++sign_fail;
      }
    }
  }
  const double ms2 = t2.ms();
  report(2, sign_fail == 0 && ms2 < 5000.0,
         fmt("conjugated root signs: %d trials x 3 tau, failures=%d worst_margin=%.2e",
             kTrials, sign_fail, worst_sign),
         ms2);

  Timer t3;
  int bound_fail = 0;
  double worst_lower = std::numeric_limits<double>::infinity();
  double worst_cap = std::numeric_limits<double>::infinity();
  {
    std::mt19937 rng(2024);  // the same family as check 2
    std::uniform_real_distribution<double> ua(0.25, 4.0);
    for (int trial = 0; trial < kTrials; ++trial) {
      const int n = trial % 2 == 0 ? 2 : 3;
      const CoefficientPair pair = random_validated_pair(n, rng);
      const auto xi = random_unit_vector(n - 1, rng);
      ua(rng);
      ua(rng);
      const DerivedConstants d = derived_constants(pair);
      for (int k : {1, 2}) {
        const auto f = factor_at(pair, k, xi);
        const FactorBound b = factor_bound(f, d, xi, n, pair.lambda0, pair.Lambda0);
        worst_lower = std::min(worst_lower, b.lhs - b.rhs);
        worst_cap = std::min(worst_cap, b.cap_rhs - b.cap_lhs);
        if (b.lhs < b.rhs - 1e-10 || b.cap_lhs > b.cap_rhs + 1e-10) ++bound_fail;
      }
    }
  }
  report(3, bound_fail == 0,
         fmt("factor bounds A >= sqrt(lt1|xi'|^2+F^2), A^2+B^2 <= n(L0/l0)^2: "
             "failures=%d worst_lower=%.2e worst_cap=%.2e",
             bound_fail, worst_lower, worst_cap),
         t3.ms());
}

// --- 4. transmission determinant and case exclusion --------------------------

void check_transmission() {
  Timer t;
  std::mt19937 rng(515);
  std::uniform_real_distribution<double> ua(0.25, 4.0), ut(0.05, 50.0);

  double worst_det = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = trial % 2 == 0 ? 2 : 3;
    const CoefficientPair pair = random_validated_pair(n, rng);
    const auto xi = random_unit_vector(n - 1, rng);
    const double a1 = ua(rng), a2 = ua(rng), tau = ut(rng);
    const auto f1 = with_roots(factor_at(pair, 1, xi), a1, tau);
    const auto f2 = with_roots(factor_at(pair, 2, xi), a2, tau);
    const cplx closed = det_T_closed(f1, f2);
    const cplx brute = det4_laplace(build_T(f1, f2, a1, a2, tau));
    worst_det = std::max(worst_det,
                         std::abs(closed - brute) / (1.0 + std::abs(closed)));
  }
  const bool det_ok = worst_det <= 1e-10;

  int cert_fail = 0;
  double min_det = std::numeric_limits<double>::infinity();
  const auto tau_grid = default_tau_grid(1.0, 1e3, 9);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = trial % 2 == 0 ? 2 : 3;
    const CoefficientPair pair = random_validated_pair(n, rng, 0.5);  // gamma < gamma0
    WeightParameters w = weights_of(alpha_ratio(pair, 256), 1.0, 1.0, 0.5, 0.5);
    const auto rep = certify_transmission(pair, w, unit_sphere_points(n - 1, 64), tau_grid);
    min_det = std::min(min_det, rep.min_abs_detT);
    if (!rep.certified || !(rep.min_abs_detT > 0.0)) ++cert_fail;
  }

  // Deliberately mis-weighted run through the real command path.
  const auto out_dir = std::filesystem::temp_directory_path() / "carleman_acceptance";
  std::filesystem::create_directories(out_dir);
  const std::string cfg = std::string(CARLEMAN_CONFIG_DIR) + "/misweighted.json";
  const std::string out = out_dir.string();
  const char* argv[] = {"carleman", "analyze", "--config", cfg.c_str(), "--out", out.c_str()};
  std::ostringstream captured;
  auto* prev = std::cout.rdbuf(captured.rdbuf());
  const int rc = run_cli(6, argv);
  std::cout.rdbuf(prev);
  const bool cli_ok = rc == 2 && captured.str().find("case2") != std::string::npos;

  report(4, det_ok && cert_fail == 0 && cli_ok,
         fmt("det T: closed-vs-4x4 worst=%.2e; certified %d/100 pairs min|detT|=%.3f; "
             "misweighted run exit=%d case2=%s",
             worst_det, 100 - cert_fail, min_det, rc, cli_ok ? "yes" : "no"),
         t.ms());
}

// --- 5. pseudoconvexity on the null set --------------------------------------

void check_pseudoconvexity() {
  Timer t;
  const auto m = isotropic_equal_pair(2, 0.0).plus;
  const WeightParameters w = weights_of(1.0, 1.0, 1.0, 0.1, 0.5);
  const std::vector<double> x{0.0, 0.0}, xi{1.0, 0.0};
  const double q = eval_Q(m, w, x, xi, 1.0, Side::plus);
  const bool canonical_ok = std::abs(q - 3.6) <= 1e-9;

  const DerivedConstants d = derived_constants(1.0, 1.0, 2);
  const double floor = 2.0 * w.beta * d.lambda_tilde1 * 1.0;  // lambda0^2 = 1
  bool cert_ok = false, margin_ok = false;
  double min_q = 0.0, margin = 0.0;
  try {
    const auto cert = certify(m, w, d, Side::plus, 0.45, 4096, 256);
    min_q = cert.min_Q_on_null_set;
    cert_ok = min_q >= floor - 1e-8 && cert.C1 > 0.0 && cert.C2 > 0.0;
    margin = revalidate(m, w, Side::plus, cert, 4096, 1);
    margin_ok = margin >= -1e-8;
  } catch (const pseudoconvexity_error&) {
  }
  const double ms = t.ms();
  report(5, canonical_ok && cert_ok && margin_ok && ms < 10000.0,
         fmt("pseudoconvexity: Q(canonical)=%.10f minQ=%.6f floor=%.6f "
             "revalidation_margin=%.2e",
             q, min_q, floor, margin),
         ms);
}

// --- 6. partition of unity ----------------------------------------------------

void check_partition() {
  Timer t;
  bool ok = true;
  double worst_defect = 0.0;
  std::string note;
  for (int d : {1, 2}) {
    const std::vector<double> lo(d, -1.0), hi(d, 1.0);
    const PartitionGrid g(4.0, d, lo, hi);
    // Explicit sum-to-one audit on >= 10^4 nodes per dimension.
    const int per_axis = d == 1 ? 10000 : 100;
    std::vector<double> x(d, 0.0);
    double defect = 0.0;
    const long total = d == 1 ? per_axis : per_axis * per_axis;
    for (long i = 0; i < total; ++i) {
      long rest = i;
      for (int j = 0; j < d; ++j) {
        x[j] = -1.0 + 2.0 * (rest % per_axis) / (per_axis - 1.0);
        rest /= per_axis;
      }
      defect = std::max(defect, std::abs(g.eta_sum(x) - 1.0));
    }
    worst_defect = std::max(worst_defect, defect);
    if (defect > 1e-12) ok = false;

    PartitionConfig cfg;
    cfg.dim = d;
    const PartitionResult p = partition_run(cfg);  // mu = 4 and 2 mu = 8
    const int expect = d == 1 ? 5 : 25;
    if (p.base.overlap_count != expect || p.doubled.overlap_count != expect) ok = false;
    if (!p.pass) ok = false;  // includes the +-10% constant stability
    if (d == 2)
      note = fmt("C1=%.3f->%.3f C2=%.3f->%.3f C3=%.3f->%.3f", p.base.C1, p.doubled.C1,
                 p.base.C2, p.doubled.C2, p.base.C3, p.doubled.C3);
  }
  report(6, ok,
         fmt("partition: sum_defect=%.2e on 1e4-node audits, overlap 5^d exact, %s",
             worst_defect, note.c_str()),
         t.ms());
}

// --- 7. interface trace seminorm ----------------------------------------------

void check_seminorm() {
  Timer t;
  const int N = 2048;
  const double L = 20.0, h = 2.0 * L / N;
  const double two_pi = 2.0 * std::acos(-1.0);
  const auto gauss = sample_1d([](double x) { return std::exp(-0.5 * x * x); }, L, N);
  const double s = h_half_seminorm(gauss, {N}, h);
  const double rel = std::abs(s - two_pi) / two_pi;
  const auto pc = parseval_check(gauss, {N}, h);

  auto poly_bump = [](double t) {
    const double u = 1.0 - t * t;
    if (u <= 0.0) return 0.0;
    const double u2 = u * u, u4 = u2 * u2;
    return u4 * u4;
  };
  const int M = 1024;
  const double hm = 2.0 * L / M;
  const std::vector<std::vector<std::complex<double>>> family{
      sample_1d([](double x) { return std::exp(-0.5 * x * x); }, L, M),
      sample_1d([&](double x) { return poly_bump(x / 5.0); }, L, M),
      sample_1d([](double x) {
        const double u = 1.0 - x * x / 25.0;
        return u > 0.0 ? std::exp(1.0 - 1.0 / u) : 0.0;
      }, L, M),
      sample_1d([](double x) { return std::exp(-0.5 * (x - 3.0) * (x - 3.0)); }, L, M),
      sample_1d([](double x) {
        return std::exp(-0.5 * x * x) *
               std::complex<double>(std::cos(3.0 * x), std::sin(3.0 * x));
      }, L, M)};
  std::vector<double> ratios;
  for (const auto& f : family)
    ratios.push_back(h_half_seminorm(f, {M}, hm) / h_half_double_integral_1d(f, hm));
  double mean = 0.0;
  for (double r : ratios) mean += r;
  mean /= ratios.size();
  double worst_spread = 0.0;
  for (double r : ratios) worst_spread = std::max(worst_spread, std::abs(r - mean) / mean);

  report(7, rel <= 0.01 && pc.relative_gap <= 1e-6 && worst_spread <= 0.2,
         fmt("seminorm: gaussian=%.5f (target 2pi, rel=%.2e) parseval=%.2e "
             "form-ratio spread=%.1f%% of mean %.3f",
             s, rel, pc.relative_gap, 100.0 * worst_spread, mean),
         t.ms());
}

// --- 8. Carleman ratio sweeps --------------------------------------------------

void check_sweeps() {
  const CoefficientPair pair = contrast_pair();  // a+ = 2I, a- = I, gamma = 0.1
  const WeightParameters w = auto_configure_weights(pair, 1.0 / 64).params;

  Timer t;
  bool ok = true;
  double drift_frozen = 0.0, drift_full = 0.0, max_frozen = 0.0, max_full = 0.0;
  double slowest = 0.0;
  {
    CarlemanReport coarse, fine;
    {
      Timer ts;
      const auto field = make_field(2, 0.5, 1.0 / 64, "bump_poly", 0.4, pair);
      coarse = tau_sweep(EstimateId::frozen, field, pair, w, 20.0, 200.0, 12, 0.5);
      slowest = std::max(slowest, ts.ms());
    }
    {
      Timer ts;
      const auto field = make_field(2, 0.5, 1.0 / 128, "bump_poly", 0.4, pair);
      fine = tau_sweep(EstimateId::frozen, field, pair, w, 20.0, 200.0, 12, 0.5);
      slowest = std::max(slowest, ts.ms());
    }
    max_frozen = coarse.max_ratio;
    drift_frozen = std::abs(coarse.max_ratio - fine.max_ratio) / coarse.max_ratio;
    if (!coarse.bounded || !fine.bounded || drift_frozen >= 0.10) ok = false;
  }
  {
    const CoefficientPair lip = lipschitz_pair(pair, 0.1);
    CarlemanReport coarse, fine;
    {
      Timer ts;
      const auto field = make_field(2, 0.25, 1.0 / 64, "bump_poly", 0.2, lip);
      coarse = tau_sweep(EstimateId::full, field, lip, w, 20.0, 200.0, 12, 0.5);
      slowest = std::max(slowest, ts.ms());
    }
    {
      Timer ts;
      const auto field = make_field(2, 0.25, 1.0 / 128, "bump_poly", 0.2, lip);
      fine = tau_sweep(EstimateId::full, field, lip, w, 20.0, 200.0, 12, 0.5);
      slowest = std::max(slowest, ts.ms());
    }
    max_full = coarse.max_ratio;
    drift_full = std::abs(coarse.max_ratio - fine.max_ratio) / coarse.max_ratio;
    if (!coarse.bounded || !fine.bounded || drift_full >= 0.10) ok = false;
  }
  if (slowest >= 120000.0) ok = false;
  report(8, ok,
         fmt("sweeps tau in [20,200]: frozen maxR=%.4f drift(h->h/2)=%.2f%%; "
             "full+lipschitz maxR=%.4f drift=%.2f%%; slowest sweep %.0f ms",
             max_frozen, 100.0 * drift_frozen, max_full, 100.0 * drift_full, slowest),
         t.ms());
}

// --- 9. interior estimate against the interface path ---------------------------

void check_interior() {
  Timer t;
  const CoefficientPair pair = contrast_pair();
  const WeightParameters w = auto_configure_weights(pair, 1.0 / 64).params;
  const auto field = make_field(2, 0.5, 1.0 / 64, "offset_bump", 0.4, pair);

  // Constant coefficients: dilation is the identity, so both paths evaluate
  // the same operator on a field whose interface groups vanish identically.
  const auto inter = interior_check(field, pair, w, 0.1, 20.0, 200.0, 12);
  const auto iface = tau_sweep(EstimateId::frozen, field, pair, w, 20.0, 200.0, 12, 0.5);
  const double gap = std::abs(inter.max_ratio - iface.max_ratio) / iface.max_ratio;

  const CoefficientPair lip = lipschitz_pair(pair, 0.1);
  const auto field_l = make_field(2, 0.5, 1.0 / 64, "offset_bump", 0.4, lip);
  const auto inter_l = interior_check(field_l, lip, w, 0.1, 20.0, 200.0, 12);
  const auto iface_l = tau_sweep(EstimateId::frozen, field_l, lip, w, 20.0, 200.0, 12, 0.5);
  const double gap_l = std::abs(inter_l.max_ratio - iface_l.max_ratio) / iface_l.max_ratio;

  const bool ok = inter.bounded && inter_l.bounded && gap <= 0.05 && gap_l <= 0.05;
  report(9, ok,
         fmt("interior: maxR=%.4f gap-vs-interface=%.3f%% (constant) %.3f%% "
             "(lipschitz delta=0.1), bounded=%s",
             inter.max_ratio, 100.0 * gap, 100.0 * gap_l,
             inter.bounded && inter_l.bounded ? "yes" : "no"),
         t.ms());
}

}  // namespace

int main() {
  check_gamma_formula();
  check_root_signs_and_factor_bound_slack();
  check_transmission();
  check_pseudoconvexity();
  check_partition();
  check_seminorm();
  check_sweeps();
  check_interior();
  if (g_failures == 0) {
    std::printf("acceptance: all 9 checks passed\n");
    return 0;
  }
  std::printf("acceptance: %d check(s) FAILED\n", g_failures);
  return 1;
}
