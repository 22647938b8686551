#include <cmath>

#include "doctest.h"
#include "foc/builtins.hpp"
#include "foc/errors.hpp"
#include "foc/fundamental_matrix.hpp"
#include "oracles.hpp"

using namespace foc;

TEST_CASE("double integrator field matches the closed form") {
  for (double alpha : {0.3, 0.5, 0.7}) {
    const TimeGrid g(0.0, 1.0, 128);
    const auto F = solve_fundamental(SystemMatrixFunction::constant(double_integrator()), g, FracOrder(alpha));
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        err = std::max(err, (F.at(i, j) - oracle::double_integrator_F(alpha, g.node(i) - g.node(j))).cwiseAbs().maxCoeff());
      }
    }
    CHECK(err < 1e-10);
  }
}

TEST_CASE("scalar constant field matches the Mittag-Leffler series") {
  const TimeGrid g(0.0, 1.0, 512);
  for (double a : {-1.0, 0.8}) {
    const auto F = solve_fundamental(SystemMatrixFunction::constant(Mat::Constant(1, 1, a)), g, FracOrder(0.5));
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); i += 4) {
      for (std::size_t j = 0; j <= i; j += 16) {
        err = std::max(err, std::abs(F.at(i, j)(0, 0) - oracle::ml_series(a, 0.5, g.node(i) - g.node(j))));
      }
    }
    CHECK(err <= 1e-5);
  }
}

TEST_CASE("time-dependent path agrees with the constant path") {
  const TimeGrid g(0.0, 1.0, 256);
  const Mat A{{-0.5, 1.0}, {0.3, -1.0}};
  const SystemMatrixFunction varying([A](double) { return A; }, 2, spectral_norm(A));
  REQUIRE_FALSE(varying.is_constant());
  const auto Fc = solve_fundamental(SystemMatrixFunction::constant(A), g, FracOrder(0.6));
  const auto Fv = solve_fundamental(varying, g, FracOrder(0.6));
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); i += 8) {
    for (std::size_t j = 0; j <= i; j += 8) {
      const Mat ref = mittag_leffler_matrix(A, FracOrder(0.6), g.node(i) - g.node(j));
      err = std::max(err, (Fv.at(i, j) - ref).cwiseAbs().maxCoeff());
      CHECK((Fv.at(i, j) - Fc.at(i, j)).cwiseAbs().maxCoeff() < 1e-5);
    }
  }
  CHECK(err <= 1e-5);
}

TEST_CASE("time-dependent field converges under refinement") {
  const auto A = SystemMatrixFunction([](double t) { return Mat::Constant(1, 1, -(1.0 + t)); }, 1, 2.0);
  double prev = 0.0;
  double prev_gap = 1.0;
  for (std::size_t N : {64u, 128u, 256u, 512u}) {
    const TimeGrid g(0.0, 1.0, N);
    const double v = solve_fundamental(A, g, FracOrder(0.5)).at(N, 0)(0, 0);
    if (N > 64) {
      const double gap = std::abs(v - prev);
      CHECK(gap < prev_gap);
      prev_gap = gap;
    }
    prev = v;
  }
  CHECK(prev_gap < 1e-5);
  CHECK(volterra_residual(solve_fundamental(A, TimeGrid(0.0, 1.0, 64), FracOrder(0.5)), A) < 1e-10);
}

TEST_CASE("field evaluation") {
  const TimeGrid g(0.0, 1.0, 64);
  const double alpha = 0.5;
  const auto F = solve_fundamental(SystemMatrixFunction::constant(double_integrator()), g, FracOrder(alpha));
  CHECK((F.eval(g.node(10), g.node(3)) - F.at(10, 3)).norm() == 0.0);
  CHECK((F.terminal(g.node(5)) - F.at(64, 5)).norm() == 0.0);
  const double t = 0.5 + 0.5 * g.step();
  const double tau = 0.25 + 0.3 * g.step();
  CHECK((F.eval(t, tau) - oracle::double_integrator_F(alpha, t - tau)).cwiseAbs().maxCoeff() < 2.0 * g.step());
  CHECK((F.eval(0.4, 0.4) - oracle::double_integrator_F(alpha, 0.0)).norm() < 1e-14);
  CHECK_THROWS_AS(F.eval(0.2, 0.3), DomainError);
  CHECK_THROWS_AS(F.at(2, 3), DomainError);
}

TEST_CASE("field constants") {
  const TimeGrid g(0.0, 1.0, 64);
  const auto F = solve_fundamental(SystemMatrixFunction::constant(double_integrator()), g, FracOrder(0.5));
  const auto C = constants(F, 1.0, 2.0, 3.0);
  const double r = 1.0 / std::sqrt(std::acos(-1.0));
  const Mat at_t0{{r, 1.0}, {0.0, r}};
  CHECK(C.M_F == doctest::Approx(Eigen::JacobiSVD<Mat>(at_t0).singularValues()(0)).epsilon(1e-12));
  CHECK(C.M_f == 2.0);
  CHECK(C.R_z == doctest::Approx((1.0 + C.M_F * 1.0 / 0.5) * 3.0));
  CHECK_THROWS_AS(constants(F, 1.0, 2.0, 0.0), DomainError);
}

TEST_CASE("declared bound is enforced") {
  const SystemMatrixFunction A([](double t) { return Mat::Constant(1, 1, 3.0 * t); }, 1, 1.0);
  CHECK_THROWS_AS(A.validate_on(TimeGrid(0.0, 1.0, 8)), DomainError);
  CHECK_NOTHROW(A.validate_on(TimeGrid(0.0, 0.3, 8)));
}
