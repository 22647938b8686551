#include <cmath>
#include <vector>

#include "doctest.h"
#include "foc/errors.hpp"
#include "foc/fractional_core.hpp"
#include "oracles.hpp"

using namespace foc;

namespace {

SampledFunction sample(const TimeGrid& g, double (*x)(double)) {
  std::vector<Vec> v;
  for (std::size_t j = 0; j < g.size(); ++j) v.push_back(Vec::Constant(1, x(g.node(j))));
  return SampledFunction(g, v);
}

}  // namespace

TEST_CASE("fractional order must lie in (0, 1)") {
  CHECK_NOTHROW(FracOrder(0.5));
  CHECK_THROWS_WITH_AS(FracOrder(1.2), "alpha out of (0,1)", DomainError);
  CHECK_THROWS_AS(FracOrder(0.0), DomainError);
  CHECK_THROWS_AS(FracOrder(1.0), DomainError);
}

TEST_CASE("time grid nodes and lookups") {
  const TimeGrid g(0.5, 2.0, 6);
  CHECK(g.step() == doctest::Approx(0.25));
  CHECK(g.node(0) == 0.5);
  CHECK(g.node(6) == 2.0);
  CHECK(g.index_of(1.25) == 3);
  CHECK(g.is_node(1.0));
  CHECK_FALSE(g.is_node(1.1));
  CHECK_THROWS_AS(g.index_of(1.1), DomainError);
  CHECK(g.panel_of(1.1) == 2);
  CHECK(g.panel_of(2.0) == 5);
  CHECK(g.panel_of(0.4) == 0);
  CHECK_THROWS_AS(TimeGrid(1.0, 1.0, 4), DomainError);
  CHECK_THROWS_AS(g.node(7), DomainError);
}

TEST_CASE("sampled functions interpolate linearly") {
  const TimeGrid g(0.0, 1.0, 4);
  const auto x = sample(g, [](double t) { return t * t; });
  CHECK(x.value_at(0.25)(0) == doctest::Approx(0.0625));
  CHECK(x.value_at(0.375)(0) == doctest::Approx(0.5 * (0.0625 + 0.25)));
  CHECK(x.prefix(2).count() == 3);
  CHECK_THROWS_AS(SampledFunction(g, {}), DomainError);
}

TEST_CASE("Riemann-Liouville integral of power functions") {
  const double alpha = 0.5;
  const TimeGrid g(0.0, 1.0, 64);
  const auto one = rl_integral(sample(g, [](double) { return 1.0; }), FracOrder(alpha));
  const auto lin = rl_integral(sample(g, [](double t) { return t; }), FracOrder(alpha));
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double t = g.node(j);
    CHECK(one.at(j)(0) == doctest::Approx(std::pow(t, alpha) / std::tgamma(1.0 + alpha)).epsilon(1e-12));
    CHECK(lin.at(j)(0) == doctest::Approx(std::pow(t, 1.5) * std::tgamma(2.0) / std::tgamma(2.5)).epsilon(1e-12));
  }
}

TEST_CASE("Caputo derivative of a linear function is exact under L1") {
  for (double alpha : {0.2, 0.5, 0.9}) {
    const TimeGrid g(0.3, 1.3, 50);
    const auto d = caputo_derivative(sample(g, [](double t) { return 2.0 * t + 1.0; }), FracOrder(alpha));
    for (std::size_t j = 1; j < g.size(); ++j) {
      const double s = g.node(j) - g.t0();
      CHECK(d.at(j)(0) == doctest::Approx(2.0 * std::pow(s, 1.0 - alpha) / std::tgamma(2.0 - alpha)).epsilon(1e-11));
    }
    CHECK(d.at(0)(0) == d.at(1)(0));
  }
  const TimeGrid g(0.0, 1.0, 4);
  CHECK_THROWS_AS(caputo_derivative(SampledFunction(g, {Vec::Zero(1)}), FracOrder(0.5)), DomainError);
}

TEST_CASE("Caputo derivative inverts the Riemann-Liouville integral") {
  const double alpha = 0.6;
  double prev = 1.0;
  for (std::size_t N : {128u, 512u}) {
    const TimeGrid g(0.0, 1.0, N);
    const auto phi = sample(g, [](double t) { return std::cos(3.0 * t); });
    const auto back = caputo_derivative(rl_integral(phi, FracOrder(alpha)), FracOrder(alpha));
    double err = 0.0;
    for (std::size_t j = g.size() / 4; j < g.size(); ++j) err = std::max(err, std::abs(back.at(j)(0) - phi.at(j)(0)));
    CHECK(err < 2e-2);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("Mittag-Leffler matrix against independent series") {
  const double root_pi = std::sqrt(std::acos(-1.0));
  for (double a : {-2.0, -0.5, 0.7, 1.5}) {
    const Mat M = mittag_leffler_matrix(Mat::Constant(1, 1, a), FracOrder(0.5), 1.0);
    CHECK(M(0, 0) == doctest::Approx(oracle::ml_series(a, 0.5, 1.0)).epsilon(1e-12));
  }
  const Mat zero = mittag_leffler_matrix(Mat::Zero(1, 1), FracOrder(0.5), 0.7);
  CHECK(zero(0, 0) == doctest::Approx(1.0 / root_pi).epsilon(1e-14));

  for (double alpha : {0.3, 0.7}) {
    const Mat M = mittag_leffler_matrix(foc::Mat{{0.0, 1.0}, {0.0, 0.0}}, FracOrder(alpha), 0.8);
    const Mat ref = oracle::double_integrator_F(alpha, 0.8);
    CHECK((M - ref).cwiseAbs().maxCoeff() < 1e-14);
  }
  CHECK_THROWS_AS(mittag_leffler_matrix(Mat::Zero(2, 3), FracOrder(0.5), 1.0), DomainError);
  CHECK_THROWS_AS(mittag_leffler_matrix(Mat::Zero(1, 1), FracOrder(0.5), -1.0), DomainError);
}
