#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "carleman/partition.hpp"

using namespace carleman;

TEST_CASE("scalar bump has an exact plateau and exact support", "[partition]") {
  for (double t : {0.0, 0.25, -0.5, 0.75, 1.0, -1.0}) {
    CHECK(bump(t) == 1.0);
  }
  for (double t : {1.5, -1.5, 1.75, 2.0, -3.0}) {
    CHECK(bump(t) == 0.0);
  }
  const double mid = bump(1.25);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
  for (int i = 0; i <= 400; ++i) {
    const double t = -2.0 + 4.0 * i / 400.0;
    const double v = bump(t);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v == bump(-t));
  }
}

TEST_CASE("bump derivatives match finite differences", "[partition]") {
  const std::vector<double> probes{-1.45, -1.4, -1.3, -1.25, -1.1, -1.05,
                                   0.0,   1.05, 1.1,  1.25,  1.3,  1.4, 1.45};
  for (double t : probes) {
    const double h1 = 1e-6;
    const double fd1 = (bump(t + h1) - bump(t - h1)) / (2.0 * h1);
    CHECK(bump_deriv(t, 1) == Catch::Approx(fd1).margin(2e-5));

    const double h2 = 1e-4;
    const double fd2 = (bump(t + h2) - 2.0 * bump(t) + bump(t - h2)) / (h2 * h2);
    CHECK(bump_deriv(t, 2) == Catch::Approx(fd2).margin(1e-2 * (1.0 + std::abs(fd2))));
  }
  // Plateau and far field: all derivatives vanish identically.
  for (double t : {0.0, 0.5, -0.9, 1.6, -2.0}) {
    CHECK(bump_deriv(t, 1) == 0.0);
    CHECK(bump_deriv(t, 2) == 0.0);
  }
  CHECK(bump_deriv(0.3, 0) == bump(0.3));
  CHECK_THROWS_AS(bump_deriv(0.3, 3), invalid_input_error);
}

TEST_CASE("one-dimensional partition sums to one", "[partition]") {
  const PartitionGrid grid(4.0, 1, {-1.0}, {1.0});
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const std::vector<double> x{-1.0 + 2.0 * i / 9999.0};
    worst = std::max(worst, std::abs(grid.eta_sum(x) - 1.0));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("lattice sum is bounded below by one", "[partition]") {
  const PartitionGrid grid(4.0, 1, {-1.0}, {1.0});
  std::mt19937 rng(81);
  std::uniform_real_distribution<double> ux(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    CHECK(grid.theta_bar({ux(rng)}) >= 1.0 - 1e-12);
  }
}

TEST_CASE("normalized bump has exact cube support", "[partition]") {
  const PartitionGrid grid(4.0, 1, {-1.0}, {1.0});
  const std::vector<long> g0{0};
  // Support is the open cube of half width 3/(2 mu) = 0.375 around 0.
  CHECK(grid.eta(g0, {0.375}) == 0.0);
  CHECK(grid.eta(g0, {-0.375}) == 0.0);
  CHECK(grid.eta(g0, {0.5}) == 0.0);
  CHECK(grid.eta(g0, {0.374}) > 0.0);
  CHECK(grid.eta(g0, {0.0}) > 0.0);
}

TEST_CASE("partition audit passes in one and two dimensions", "[partition]") {
  for (int d : {1, 2}) {
    const std::vector<double> lo(d, -1.0), hi(d, 1.0);
    const auto audit = audit_partition(build_partition(4.0, d, lo, hi));
    INFO("d = " << d);
    CHECK(audit.pass);
    CHECK(audit.max_sum_defect <= 1e-12);
    CHECK(audit.support_ok);
    CHECK(audit.theta_bar_min >= 1.0 - 1e-12);
    CHECK(audit.overlap_count == (d == 1 ? 5 : 25));
    CHECK(audit.C1 >= 1.0);
    CHECK(audit.C2 >= 1.0);
    CHECK(audit.C3 >= 0.999);
  }
}

TEST_CASE("audit constants are stable under doubling the density", "[partition]") {
  for (int d : {1, 2}) {
    const std::vector<double> lo(d, -1.0), hi(d, 1.0);
    const auto a1 = audit_partition(build_partition(4.0, d, lo, hi));
    const auto a2 = audit_partition(build_partition(8.0, d, lo, hi));
    REQUIRE(a1.pass);
    REQUIRE(a2.pass);
    // The constants are measured relative to powers of mu, so they are
    // density-free up to finite-difference noise.
    CHECK(std::abs(a2.C1 - a1.C1) <= 0.1 * a1.C1);
    CHECK(std::abs(a2.C2 - a1.C2) <= 0.1 * a1.C2);
    CHECK(std::abs(a2.C3 - a1.C3) <= 0.1 * a1.C3);
  }
}

TEST_CASE("grid construction rejects malformed input", "[partition]") {
  CHECK_THROWS_AS(PartitionGrid(0.5, 1, {-1.0}, {1.0}), invalid_input_error);
  CHECK_THROWS_AS(PartitionGrid(4.0, 2, {-1.0}, {1.0, 1.0}), dimension_error);
  CHECK_THROWS_AS(PartitionGrid(4.0, 1, {1.0}, {-1.0}), invalid_input_error);
}

TEST_CASE("vertical cutoff splits the field into near and far parts", "[partition]") {
  const auto cut = vertical_cutoff(8.0, 0.4);
  for (double xn : {-0.4, -0.2, -0.1, 0.0, 0.05, 0.11, 0.2, 0.4}) {
    CHECK(cut.near(xn) + cut.far(xn) == Catch::Approx(1.0).epsilon(1e-15));
  }
  // Plateau |x_n| <= 1/mu keeps the traces; support ends at 3/(2 mu).
  CHECK(cut.near(0.0) == 1.0);
  CHECK(cut.near(0.125) == 1.0);
  CHECK(cut.near(-0.125) == 1.0);
  CHECK(cut.near(0.1875) == 0.0);
  CHECK(cut.far(0.1875) == 1.0);
  CHECK(cut.near(0.15) > 0.0);
  CHECK(cut.near(0.15) < 1.0);

  CHECK_THROWS_AS(vertical_cutoff(0.5, 0.4), invalid_input_error);
  // 2 / mu must stay inside the field radius.
  CHECK_THROWS_AS(vertical_cutoff(5.0, 0.4), constraint_error);
  CHECK_NOTHROW(vertical_cutoff(5.1, 0.4));
}
