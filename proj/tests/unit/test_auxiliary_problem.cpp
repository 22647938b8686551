#include <cmath>
#include <memory>

#include "doctest.h"
#include "foc/auxiliary_problem.hpp"
#include "foc/builtins.hpp"
#include "foc/errors.hpp"
#include "foc/informational_image.hpp"
#include "oracles.hpp"

using namespace foc;

namespace {

std::shared_ptr<const FundamentalMatrixField> field_of(const OriginalProblem& P) {
  return std::make_shared<const FundamentalMatrixField>(solve_fundamental(P.A, P.grid, P.alpha));
}

}  // namespace

TEST_CASE("f* of the first example") {
  const double alpha = 0.5;
  const auto P = example1_problem(FracOrder(alpha), 0.0, 1.0, 64);
  const auto F = field_of(P);
  for (std::size_t j : {0u, 10u, 40u, 63u}) {
    const double t = P.grid.node(j);
    for (double p : {-1.2, 0.0, 0.9}) {
      const Vec v = f_star(t, Vec::Constant(1, p), *F, P);
      const double b1 = oracle::b1(t, alpha, 1.0);
      const double b2 = oracle::b2(t, alpha, 1.0);
      CHECK(v(0) == doctest::Approx(b1 * std::cos(p) + b2 * std::sin(p)).epsilon(1e-12));
      CHECK(v(1) == doctest::Approx(b1 * std::sin(p)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(f_star(1.0, Vec::Zero(1), *F, P), DomainError);
}

TEST_CASE("f* without drift") {
  OriginalProblem P;
  P.alpha = FracOrder(0.3);
  P.grid = TimeGrid(0.0, 1.0, 16);
  P.A = SystemMatrixFunction::constant(Mat::Zero(1, 1));
  P.f = [](double, const Vec& u) { return u; };
  P.sigma = [](const Vec& x) { return x(0); };
  P.chi = [](double, const Vec&) { return 0.0; };
  P.controls = ControlSet::box(Vec::Constant(1, -1.0), Vec::Constant(1, 1.0), {3});
  const auto F = field_of(P);
  for (double t : {0.0, 0.33, 0.9}) {
    CHECK(f_star(t, Vec::Constant(1, 0.7), *F, P)(0) ==
          doctest::Approx(0.7 / (std::tgamma(0.3) * std::pow(1.0 - t, 0.7))).epsilon(1e-12));
  }
}

TEST_CASE("increments integrate f* exactly") {
  const double alpha = 0.4;
  const auto P = example1_problem(FracOrder(alpha), 0.0, 1.0, 32);
  const auto F = field_of(P);
  const AuxiliaryProblem aux(P, F, 1.0, false);
  const Vec u = Vec::Constant(1, 0.6);
  const int n = 400000;
  for (auto [a, b] : {std::pair{0.0, 0.03125}, std::pair{0.5, 0.53125}, std::pair{0.96875, 1.0}}) {
    // s = (theta - tau)^alpha removes the endpoint singularity.
    const double s0 = std::pow(1.0 - b, alpha);
    const double s1 = std::pow(1.0 - a, alpha);
    Vec ref = Vec::Zero(2);
    for (int i = 0; i < n; ++i) {
      const double s = s0 + (i + 0.5) * (s1 - s0) / n;
      const double tau = 1.0 - std::pow(s, 1.0 / alpha);
      ref += aux.regular(tau, u) / alpha * (s1 - s0) / n;
    }
    CHECK((aux.increment(a, b, u) - ref).norm() < 1e-9);
  }
}

TEST_CASE("second example auxiliary motion") {
  const double alpha = 0.5;
  const double c1 = 0.8;
  const auto P = example2_problem(FracOrder(alpha), 0.0, 1.0, 64, c1);
  const auto aux = AuxiliaryProblem::shifted(P, field_of(P), 0.1, true);
  REQUIRE(aux.dim() == 1);
  CHECK(aux.terminal() == doctest::Approx(0.9));
  const auto p = ControlSignal::constant(P.grid, 0, 64, Vec::Constant(1, 1.0));
  const Vec z0 = aux.reduce_image(info_image_ode(Position::initial(P.grid, Vec::Zero(2)), P).z);
  CHECK(z0(0) == doctest::Approx(-c1));
  const auto tr = solve_aux_motion(aux, p, 0.0, aux.terminal(), z0);
  CHECK(tr.times.back() == doctest::Approx(0.9));
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    const double t = tr.times[k];
    const double ref = -c1 + (1.0 - std::pow(1.0 - t, 2.0 * alpha)) / std::tgamma(2.0 * alpha + 1.0);
    CHECK(std::abs(tr.z[k](0) - ref) < 1e-4);
  }
  const double zT = -c1 + 0.9;
  CHECK(cost_J_aux(aux, tr, p) == doctest::Approx(zT * zT + 0.9).epsilon(1e-4));
}

TEST_CASE("first example auxiliary cost is minus the terminal state") {
  const auto P = example1_problem(FracOrder(0.5), 0.0, 1.0, 64);
  const AuxiliaryProblem aux(P, field_of(P), 1.0, true);
  const auto p = ControlSignal::constant(P.grid, 0, 64, Vec::Constant(1, 0.3));
  const auto tr = solve_aux_motion(aux, p, 0.0, 1.0, Vec::Zero(1));
  CHECK(cost_J_aux(aux, tr, p) == -tr.final()(0));
  CHECK(aux.sigma_aux(Vec::Constant(1, 2.0)) == -2.0);
}

TEST_CASE("reduction and layers") {
  const auto P = example3_problem(FracOrder(0.5), 0.0, 1.0, 32, 1.5);
  const auto F = field_of(P);
  const AuxiliaryProblem full(P, F, 1.0, false);
  const auto reduced = AuxiliaryProblem::shifted(P, F, 0.05, true);
  CHECK(full.dim() == 2);
  CHECK(reduced.dim() == 1);
  CHECK(reduced.reduce_image(Vec{{2.0, 7.0}})(0) == doctest::Approx(0.5));
  CHECK(full.reduce_image(Vec{{2.0, 7.0}}) == Vec{{2.0, 7.0}});

  const auto layers = reduced.layers();
  CHECK(layers.back() == doctest::Approx(0.95));
  CHECK(layers[layers.size() - 2] == doctest::Approx(30.0 / 32.0));
  CHECK(layers.size() == 32);
  CHECK(full.layers().size() == 33);
  CHECK_THROWS_AS(AuxiliaryProblem::shifted(P, F, 1.0, true), DomainError);
  CHECK_THROWS_AS(solve_aux_motion(reduced, ControlSignal::constant(P.grid, 0, 32, Vec::Zero(1)), 0.0, 1.0,
                                   Vec::Zero(1)),
                  DomainError);
}

TEST_CASE("splicing keeps the panel containing theta_eta only past its midpoint") {
  const TimeGrid g(0.0, 1.0, 10);
  const auto p = ControlSignal::constant(g, 0, 10, Vec::Constant(1, 1.0));
  const Vec u_bar = Vec::Constant(1, -1.0);
  const auto late = splice_control(p, 0.87, u_bar);
  CHECK(late.on_panel(7)(0) == 1.0);
  CHECK(late.on_panel(8)(0) == 1.0);
  CHECK(late.on_panel(9)(0) == -1.0);
  const auto early = splice_control(p, 0.83, u_bar);
  CHECK(early.on_panel(7)(0) == 1.0);
  CHECK(early.on_panel(8)(0) == -1.0);
  const auto on_node = splice_control(p, 0.8, u_bar);
  CHECK(on_node.on_panel(7)(0) == 1.0);
  CHECK(on_node.on_panel(8)(0) == -1.0);
  CHECK(on_node.panel_count() == 10);
}

TEST_CASE("epsilon budget") {
  BudgetConstants c;
  c.M_F = 1.5;
  c.M_f = 2.0;
  c.M_A = 1.0;
  c.M_chi = 4.0;
  c.R_x = 1.0;
  c.alpha = 0.5;
  c.horizon = 1.0;
  const double growth = 1.5 * 2.0 / 0.5;
  CHECK(reachable_radius(c) == doctest::Approx((1.0 + 1.5 / 0.5) + growth));

  const auto b = epsilon_budget(0.3, c, SigmaModulus::with_lipschitz(2.0));
  CHECK(b.zeta == doctest::Approx(0.025));
  CHECK(b.eta1 == doctest::Approx(std::pow(0.5 * 0.025 / 3.0, 2.0)));
  CHECK(b.eta2 == doctest::Approx(0.3 / 24.0));
  CHECK(b.eta_star == doctest::Approx(std::min(b.eta1, b.eta2)));
  CHECK(b.eps_star == doctest::Approx(0.1));
  CHECK(1.5 * 2.0 * std::pow(b.eta1, 0.5) / 0.5 <= b.zeta * (1.0 + 1e-12));

  const auto flat = epsilon_budget(0.3, c, SigmaModulus::constant());
  CHECK(std::isinf(flat.zeta));
  CHECK(flat.eta_star == doctest::Approx(0.3 / 24.0));
  CHECK_THROWS_AS(epsilon_budget(0.0, c, SigmaModulus::constant()), DomainError);
}

TEST_CASE("sampled modulus meets its target") {
  BudgetConstants c;
  c.M_F = 1.0;
  c.M_f = 1.0;
  c.alpha = 0.5;
  c.R_x = 1.0;
  const auto sigma = [](const Vec& z) { return z.squaredNorm(); };
  const auto b = epsilon_budget(0.1, c, SigmaModulus::sampled(sigma, 1, 7));
  // |z1^2 - z2^2| <= 2 M_z |z1 - z2| on B(M_z).
  CHECK(2.0 * b.M_z * b.zeta <= 2.0 * 0.1 / 6.0);
  CHECK(b.zeta > 0.0);
}
