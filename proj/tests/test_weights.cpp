#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "carleman/weights.hpp"
#include "support.hpp"

using namespace carleman;

namespace {

WeightParameters sample_weights() {
  WeightParameters w;
  w.alpha_plus = 2.0;
  w.alpha_minus = 1.0;
  w.beta = 1.0;
  w.epsilon = 0.5;
  w.delta = 0.5;
  return w;
}

double fd1(const std::function<double(const std::vector<double>&)>& f,
           std::vector<double> x, int j, double h) {
  x[j] += h;
  const double fp = f(x);
  x[j] -= 2.0 * h;
  const double fm = f(x);
  return (fp - fm) / (2.0 * h);
}

double fd2(const std::function<double(const std::vector<double>&)>& f,
           std::vector<double> x, int j, int l, double h) {
  if (j == l) {
    const double f0 = f(x);
    x[j] += h;
    const double fp = f(x);
    x[j] -= 2.0 * h;
    const double fm = f(x);
    return (fp - 2.0 * f0 + fm) / (h * h);
  }
  double acc = 0.0;
  for (int sj : {1, -1})
    for (int sl : {1, -1}) {
      auto y = x;
      y[j] += sj * h;
      y[l] += sl * h;
      acc += sj * sl * f(y);
    }
  return acc / (4.0 * h * h);
}

}  // namespace

TEST_CASE("psi matches its closed form per side", "[weights]") {
  const auto w = sample_weights();
  const std::vector<double> x{0.3, -0.2};
  const double xp2 = 0.3 * 0.3;
  CHECK(psi(w, x, Side::plus) ==
        Catch::Approx(2.0 * -0.2 + 0.5 * 0.04 - 0.25 * xp2).epsilon(1e-14));
  CHECK(psi(w, x, Side::minus) ==
        Catch::Approx(1.0 * -0.2 + 0.5 * 0.04 - 0.25 * xp2).epsilon(1e-14));
}

TEST_CASE("both weight branches agree at the interface", "[weights]") {
  const auto w = sample_weights();
  for (double x1 : {-0.4, -0.1, 0.0, 0.2, 0.45}) {
    const std::vector<double> x{x1, 0.0};
    CHECK(psi(w, x, Side::plus) == Catch::Approx(psi(w, x, Side::minus)).margin(1e-15));
    CHECK(phi_delta(w, x, Side::plus) ==
          Catch::Approx(phi_delta(w, x, Side::minus)).margin(1e-15));
  }
}

TEST_CASE("phi at delta = 1 degenerates to psi with epsilon = beta", "[weights]") {
  WeightParameters w = sample_weights();
  w.delta = 1.0;
  WeightParameters weq = w;
  weq.epsilon = w.beta;
  for (double x1 : {-0.7, 0.0, 0.31})
    for (double xn : {-0.5, -0.01, 0.0, 0.4}) {
      const std::vector<double> x{x1, xn};
      for (Side s : {Side::plus, Side::minus})
        CHECK(phi_delta(w, x, s) == Catch::Approx(psi(weq, x, s)).margin(1e-14));
    }
}

TEST_CASE("gradients and Hessian match central differences", "[weights]") {
  const auto w = sample_weights();
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(-0.45, 0.45);
  const double h = 1e-5;

  for (int n : {2, 3}) {
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> x(n);
      for (double& c : x) c = u(rng);
      for (Side s : {Side::plus, Side::minus}) {
        auto f_psi = [&](const std::vector<double>& y) { return psi(w, y, s); };
        auto f_phi = [&](const std::vector<double>& y) { return phi_delta(w, y, s); };
        const auto gp = grad_psi(w, x, s);
        const auto gf = grad_phi_delta(w, x, s);
        for (int j = 0; j < n; ++j) {
          CHECK(gp[j] == Catch::Approx(fd1(f_psi, x, j, h)).margin(1e-6));
          CHECK(gf[j] == Catch::Approx(fd1(f_phi, x, j, h)).margin(1e-6));
        }
        const auto H = hess_psi(w, n);
        for (int j = 0; j < n; ++j)
          for (int l = 0; l < n; ++l)
            CHECK(H[j * n + l] == Catch::Approx(fd2(f_psi, x, j, l, h)).margin(1e-4));
      }
    }
  }

  // The pinned point from the worked example.
  const std::vector<double> x0{0.3, -0.2};
  auto f = [&](const std::vector<double>& y) { return psi(w, y, Side::plus); };
  const auto g = grad_psi(w, x0, Side::plus);
  CHECK(g[0] == Catch::Approx(fd1(f, x0, 0, h)).margin(1e-8));
  CHECK(g[1] == Catch::Approx(fd1(f, x0, 1, h)).margin(1e-8));
}

TEST_CASE("scaling the parameter block scales both weights linearly", "[weights]") {
  const auto w = sample_weights();
  for (double s : {0.25, 0.5, 4.0}) {
    WeightParameters ws = w;
    ws.alpha_plus *= s;
    ws.alpha_minus *= s;
    ws.beta *= s;
    ws.epsilon *= s;
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-0.45, 0.45);
    for (int trial = 0; trial < 50; ++trial) {
      const std::vector<double> x{u(rng), u(rng), u(rng)};
      for (Side side : {Side::plus, Side::minus}) {
        CHECK(psi(ws, x, side) == Catch::Approx(s * psi(w, x, side)).margin(1e-13));
        CHECK(phi_delta(ws, x, side) ==
              Catch::Approx(s * phi_delta(w, x, side)).margin(1e-13));
        const auto g0 = grad_phi_delta(w, x, side);
        const auto gs = grad_phi_delta(ws, x, side);
        for (size_t j = 0; j < g0.size(); ++j)
          CHECK(gs[j] == Catch::Approx(s * g0[j]).margin(1e-13));
      }
    }
  }
}

TEST_CASE("side selection is explicit and matches alpha_of", "[weights]") {
  const auto w = sample_weights();
  CHECK(alpha_of(w, Side::plus) == 2.0);
  CHECK(alpha_of(w, Side::minus) == 1.0);
  // The branch is a global smooth function; plus-branch values exist at
  // negative x_n too and differ from the minus branch there.
  const std::vector<double> x{0.1, -0.3};
  CHECK(psi(w, x, Side::plus) != psi(w, x, Side::minus));
}

TEST_CASE("phi rejects a nonpositive localization scale", "[weights]") {
  WeightParameters w = sample_weights();
  w.delta = 0.0;
  const std::vector<double> x{0.1, 0.2};
  CHECK_THROWS_AS(phi_delta(w, x, Side::plus), invalid_input_error);
  CHECK_THROWS_AS(grad_phi_delta(w, x, Side::plus), invalid_input_error);
}

TEST_CASE("weight dispatch selects the requested family", "[weights]") {
  const auto w = sample_weights();
  const std::vector<double> x{0.2, 0.1};
  CHECK(weight_value(w, x, Side::plus, false) == psi(w, x, Side::plus));
  CHECK(weight_value(w, x, Side::plus, true) == phi_delta(w, x, Side::plus));
  CHECK(weight_grad(w, x, Side::minus, false) == grad_psi(w, x, Side::minus));
  CHECK(weight_grad(w, x, Side::minus, true) == grad_phi_delta(w, x, Side::minus));
}
