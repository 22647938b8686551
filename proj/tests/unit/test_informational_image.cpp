#include <cmath>
#include <memory>

#include "doctest.h"
#include "foc/auxiliary_problem.hpp"
#include "foc/builtins.hpp"
#include "foc/errors.hpp"
#include "foc/informational_image.hpp"

using namespace foc;

namespace {

std::shared_ptr<const FundamentalMatrixField> field_of(const OriginalProblem& P) {
  return std::make_shared<const FundamentalMatrixField>(solve_fundamental(P.A, P.grid, P.alpha));
}

}  // namespace

TEST_CASE("image at the terminal time is the current state") {
  const auto P = example1_problem(FracOrder(0.5), 0.0, 1.0, 32);
  const auto F = field_of(P);
  const auto u = ControlSignal::constant(P.grid, 0, 32, Vec::Constant(1, 0.4));
  const auto x = solve_motion_direct(P, Position::initial(P.grid, Vec::Zero(2)), 1.0, u);
  const Position end(x);
  CHECK(info_image_ode(end, P).z == x.at(32));
  CHECK(info_image_explicit(end, *F, P).z == x.at(32));
  CHECK(info_image_ode(end, P).source_time == 1.0);
}

TEST_CASE("image of the origin in the first example") {
  const auto P = example1_problem(FracOrder(0.5), 0.0, 1.0, 32);
  const auto pos = Position::initial(P.grid, Vec::Zero(2));
  CHECK(info_image_ode(pos, P).z.norm() == 0.0);
  CHECK(info_image_explicit(pos, *field_of(P), P).z.norm() == 0.0);
}

TEST_CASE("image of an initial state") {
  for (double alpha : {0.3, 0.5, 0.8}) {
    const auto P = example2_problem(FracOrder(alpha), 0.0, 1.0, 256, 1.0);
    const Vec x0{{-0.3, 0.6}};
    const auto pos = Position::initial(P.grid, x0);
    const Vec ref{{-0.3 + 0.6 / std::tgamma(1.0 + alpha), 0.6}};
    CHECK((info_image_explicit(pos, *field_of(P), P).z - ref).norm() < 1e-12);
    CHECK((info_image_ode(pos, P).z - ref).norm() < 3e-2);
  }
}

TEST_CASE("increment for a constant input without drift") {
  OriginalProblem P;
  P.alpha = FracOrder(0.3);
  P.grid = TimeGrid(0.0, 2.0, 40);
  P.A = SystemMatrixFunction::constant(Mat::Zero(1, 1));
  P.f = [](double, const Vec& u) { return u; };
  P.sigma = [](const Vec& x) { return x(0); };
  P.chi = [](double, const Vec&) { return 0.0; };
  P.controls = ControlSet::box(Vec::Constant(1, -1.0), Vec::Constant(1, 1.0), {3});
  const auto F = field_of(P);
  const AuxiliaryProblem aux(P, F, 2.0, false);
  const auto u = ControlSignal::constant(P.grid, 0, 40, Vec::Constant(1, 1.0));
  const InfoImage start{Vec::Constant(1, 0.5), 0.0};
  const auto whole = info_image_increment(start, aux, u, 0.0, 2.0);
  CHECK(whole.z(0) == doctest::Approx(0.5 + std::pow(2.0, 0.3) / std::tgamma(1.3)).epsilon(1e-12));
  CHECK(whole.source_time == 2.0);

  const auto first = info_image_increment(start, aux, u, 0.0, 0.77);
  const auto second = info_image_increment(first, aux, u, 0.77, 2.0);
  CHECK(second.z(0) == doctest::Approx(whole.z(0)).epsilon(1e-13));
  CHECK_THROWS_AS(info_image_increment(start, aux, u, 0.0, 2.5), DomainError);
  CHECK_THROWS_AS(info_image_increment(start, aux, u, 1.0, 1.0), DomainError);
}

TEST_CASE("image along a motion follows the auxiliary dynamics") {
  const auto P = example1_problem(FracOrder(0.5), 0.0, 1.0, 256);
  const auto F = field_of(P);
  const AuxiliaryProblem aux(P, F, 1.0, false);
  const auto u = ControlSignal::sample(P.grid, 0, 256, [](double t) { return Vec::Constant(1, std::sin(5.0 * t)); });
  const auto pos = Position::initial(P.grid, Vec::Zero(2));
  const auto x = solve_motion_repr(P, pos, 1.0, u, *F);
  const InfoImage z0 = info_image_explicit(pos, *F, P);
  for (std::size_t k : {16u, 64u, 200u, 255u}) {
    const double t = P.grid.node(k);
    const auto predicted = info_image_increment(z0, aux, u, 0.0, t);
    const auto observed = info_image_explicit(Position(x.prefix(k)), *F, P);
    CHECK((predicted.z - observed.z).norm() < 2e-2);
    const auto via_ode = info_image_ode(Position(x.prefix(k)), P);
    CHECK((via_ode.z - observed.z).norm() < 3e-2);
  }
}
