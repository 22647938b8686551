#include "foc/informational_image.hpp"

#include <cmath>

#include "foc/auxiliary_problem.hpp"
#include "foc/errors.hpp"
#include "foc/quadrature.hpp"
#include "foc/special_functions.hpp"
#include "panel_pieces.hpp"

namespace foc {

InfoImage info_image_ode(const Position& pos, const OriginalProblem& problem) {
  problem.check_position(pos);
  const std::size_t N = problem.grid.steps();
  if (pos.index() == N) return {pos.current(), problem.grid.theta()};
  OriginalProblem homogeneous = problem;
  const auto n = static_cast<Eigen::Index>(problem.dim());
  homogeneous.f = [n](double, const Vec&) { return Vec::Zero(n); };
  const ControlSignal idle = ControlSignal::constant(problem.grid, pos.index(), N, problem.controls[0]);
  const SampledFunction y = solve_motion_direct(homogeneous, pos, problem.grid.theta(), idle);
  return {y.at(N), pos.time()};
}

InfoImage info_image_explicit(const Position& pos, const FundamentalMatrixField& F, const OriginalProblem& problem) {
  problem.check_position(pos);
  const TimeGrid& grid = problem.grid;
  const std::size_t N = grid.steps();
  const std::size_t p = pos.index();
  if (p == N) return {pos.current(), grid.theta()};
  if (!(F.grid() == grid) || F.dim() != problem.dim()) throw DomainError("field does not match the problem");
  const double a = problem.alpha.value();
  const double h = grid.step();
  const auto& w = pos.history().values();
  const Vec& wp = w[p];

  // Panel-wise: int (tau - xi)^{-a} over a linear piece of w is h^{1-a} b_{k-q-1} / (1 - a).
  const std::vector<double> b = l1_coefficients(a, N + 1);
  const double hist_scale = std::pow(h, -a) / gamma_fn(2.0 - a);
  const ProductTrapezoid pt(a, h, N);

  auto integrand = [&](std::size_t k) {
    Vec hist = Vec::Zero(wp.size());
    for (std::size_t q = 0; q < p; ++q) hist -= b[k - q - 1] * (w[q + 1] - w[q]);
    return Vec(F.view(N, k) * (problem.A(grid.node(k)) * wp + hist_scale * hist));
  };

  Vec z = wp;
  Vec g_left = integrand(p);
  for (std::size_t k = p; k < N; ++k) {
    Vec g_right = integrand(k + 1);
    z += pt.left(N - k) * g_left + pt.right(N - k) * g_right;
    g_left = std::move(g_right);
  }
  return {z, pos.time()};
}

InfoImage info_image_increment(const InfoImage& z_prev, const AuxiliaryProblem& aux, const ControlSignal& u,
                               double t_from, double t_to) {
  const double h = aux.grid().step();
  if (t_to > aux.theta() + 1e-9 * h) throw DomainError("info_image_increment: t_to beyond theta");
  if (!(t_from < t_to)) throw DomainError("info_image_increment: need t_from < t_to");
  Vec z = z_prev.z;
  detail::for_each_piece(aux.grid(), t_from, t_to,
                         [&](double a, double b, std::size_t k) { z += aux.increment(a, b, u.on_panel(k)); });
  return {z, t_to};
}

}  // namespace foc
