#pragma once

#include <algorithm>
#include <cstddef>

#include "foc/errors.hpp"
#include "foc/fractional_core.hpp"

namespace foc::detail {

/// Splits [t_from, t_to] at grid nodes and calls fn(a, b, panel) for each piece.
template <class Fn>
void for_each_piece(const TimeGrid& grid, double t_from, double t_to, Fn&& fn) {
  const double h = grid.step();
  const double tiny = 1e-9 * h;
  if (t_to < t_from - tiny) throw DomainError("interval end precedes its start");
  double a = t_from;
  while (a < t_to - tiny) {
    const std::size_t k = grid.panel_of(a);
    double b = grid.node(k + 1);
    if (b > t_to - tiny) b = t_to;
    if (b - a > tiny) fn(a, b, k);
    a = b;
  }
}

}  // namespace foc::detail
