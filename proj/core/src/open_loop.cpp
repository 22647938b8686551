#include "foc/open_loop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "foc/errors.hpp"
#include "foc/quadrature.hpp"
#include "foc/special_functions.hpp"

namespace foc {

double example1_control(double t, FracOrder alpha, double theta) {
  const double a = alpha.value();
  const double d = std::max(theta - t, 0.0);
  return std::atan(gamma_fn(a) * std::pow(d, a) / gamma_fn(2.0 * a));
}

double example1_value(FracOrder alpha, double t0, double theta, std::size_t quad_n) {
  if (quad_n < 64) throw DomainError("example1_value: quad_n must be at least 64");
  if (!(t0 < theta)) throw DomainError("example1_value: need t0 < theta");
  const double a = alpha.value();
  const double g1 = 1.0 / gamma_fn(a);
  const double g2 = 1.0 / gamma_fn(2.0 * a);
  const double upper = std::pow(theta - t0, a);
  const QuadratureRule gl = gauss_legendre_unit(8);
  const std::size_t panels = quad_n / 8;
  const double width = upper / static_cast<double>(panels);
  double sum = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double left = width * static_cast<double>(p);
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double s = left + width * gl.nodes[q];
      sum += width * gl.weights[q] * std::sqrt(g1 * g1 + s * s * g2 * g2);
    }
  }
  return -sum / a;
}

double example2_b2(double t, FracOrder alpha, double theta) {
  const double a = alpha.value();
  return std::pow(theta - t, 2.0 * a - 1.0) / gamma_fn(2.0 * a);
}

double example2_S(double zeta) { return zeta <= 2.0 ? 2.0 : zeta; }

double example2_lhs(double lambda, double eta, FracOrder alpha, double t0, double theta) {
  const double a = alpha.value();
  const double D = theta - t0;
  if (!(eta > 0.0 && eta < D)) throw DomainError("example2: eta outside (0, theta - t0)");
  const double g = gamma_fn(2.0 * a);
  const double al = std::abs(lambda);
  // In d = theta - t: b2 = d^{2a-1}/Gamma(2a).
  auto flat = [&](double lo, double hi) {  // int b2^2 / 2
    if (hi <= lo) return 0.0;
    const double e = 4.0 * a - 1.0;
    const double prim = std::abs(e) < 1e-14 ? std::log(hi) - std::log(lo) : (std::pow(hi, e) - std::pow(lo, e)) / e;
    return prim / (2.0 * g * g);
  };
  auto saturated = [&](double lo, double hi) {  // int b2 / |lambda|
    if (hi <= lo) return 0.0;
    return (std::pow(hi, 2.0 * a) - std::pow(lo, 2.0 * a)) / (2.0 * a * g * al);
  };
  double integral = 0.0;
  if (al == 0.0) {
    integral = flat(eta, D);
  } else if (std::abs(2.0 * a - 1.0) < 1e-14) {
    integral = (1.0 / g) * al <= 2.0 ? flat(eta, D) : saturated(eta, D);
  } else {
    // b2(d) |lambda| = 2 at d_star; b2 increases in d for a > 1/2 and decreases otherwise.
    const double d_star = std::pow(2.0 * g / al, 1.0 / (2.0 * a - 1.0));
    const double cut = std::clamp(d_star, eta, D);
    if (a > 0.5) {
      integral = flat(eta, cut) + saturated(cut, D);
    } else {
      integral = saturated(eta, cut) + flat(cut, D);
    }
  }
  return lambda * integral + 0.5 * lambda;
}

double example2_lambda(double c1, double eta, FracOrder alpha, double t0, double theta, double tol) {
  if (!(tol > 0.0)) throw DomainError("example2_lambda: tol must be positive");
  if (c1 == 0.0) return 0.0;
  auto residual = [&](double lam) { return example2_lhs(lam, eta, alpha, t0, theta) - c1; };
  double bound = 2.0 * std::abs(c1) + 1.0;
  int doublings = 0;
  while (residual(-bound) > 0.0 || residual(bound) < 0.0) {
    if (++doublings > 60) throw SolverError("open_loop", 0, "example2_lambda: bracket failure");
    bound *= 2.0;
  }
  double lo = -bound;
  double hi = bound;
  for (int it = 0; it < 400 && hi - lo > tol * std::max(1.0, std::abs(0.5 * (lo + hi))); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double example2_control(double t, double lambda, FracOrder alpha, double theta) {
  const double b2 = example2_b2(t, alpha, theta);
  return b2 * lambda / example2_S(b2 * std::abs(lambda));
}

double ZGrid::point(std::size_t i) const {
  const double s = static_cast<double>(i) / static_cast<double>(m - 1);
  return z_min * (1.0 - s) + z_max * s;
}

ZGrid ZGrid::around(double M_z, std::size_t m) {
  if (!(M_z >= 0.0)) throw DomainError("ZGrid: radius must be nonnegative");
  return ZGrid{-(M_z + 1.0), M_z + 1.0, m};
}

ValueTable::ValueTable(std::vector<double> layers, ZGrid zgrid, Interpolation interp)
    : layers_(std::move(layers)), zgrid_(zgrid), interp_(interp) {
  if (layers_.size() < 2) throw DomainError("ValueTable: need at least two layers");
  if (zgrid_.m < 4 || !(zgrid_.z_min < zgrid_.z_max)) throw DomainError("ValueTable: invalid z-grid");
  values_.assign(layers_.size(), std::vector<double>(zgrid_.m, 0.0));
  argmin_.assign(layers_.size(), std::vector<std::size_t>(zgrid_.m, 0));
}

double ValueTable::lookup(std::size_t j, double z) const {
  const std::vector<double>& V = values_[j];
  const std::size_t m = zgrid_.m;
  double x = (z - zgrid_.z_min) / zgrid_.step();
  const double xmax = static_cast<double>(m - 1);
  if (x < 0.0 || x > xmax) {
    ++clamped_;
    x = std::clamp(x, 0.0, xmax);
  }
  std::size_t i = static_cast<std::size_t>(x);
  if (i > m - 2) i = m - 2;
  const double f = x - static_cast<double>(i);
  if (interp_ == Interpolation::Linear) return V[i] * (1.0 - f) + V[i + 1] * f;
  const double p1 = V[i];
  const double p2 = V[i + 1];
  const double p0 = i == 0 ? 2.0 * p1 - p2 : V[i - 1];
  const double p3 = i + 2 < m ? V[i + 2] : 2.0 * p2 - p1;
  return p1 + 0.5 * f * (p2 - p0 + f * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + f * (3.0 * (p1 - p2) + p3 - p0)));
}

std::size_t ValueTable::layer_of(double t) const {
  double spacing = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < layers_.size(); ++j) spacing = std::min(spacing, layers_[j + 1] - layers_[j]);
  const auto it = std::lower_bound(layers_.begin(), layers_.end(), t - 1e-9 * spacing);
  if (it == layers_.end() || std::abs(*it - t) > 1e-9 * spacing) throw DomainError("ValueTable: time is not a layer");
  return static_cast<std::size_t>(it - layers_.begin());
}

double ValueTable::value(double t, double z) const {
  const double first = layers_.front();
  const double last = layers_.back();
  const double tol = 1e-9 * (last - first);
  if (t < first - tol || t > last + tol) throw DomainError("ValueTable: time outside the table");
  const auto it = std::upper_bound(layers_.begin(), layers_.end(), t);
  std::size_t j = it == layers_.begin() ? 0 : static_cast<std::size_t>(it - layers_.begin()) - 1;
  if (j >= layers_.size() - 1) return lookup(layers_.size() - 1, z);
  const double s = (t - layers_[j]) / (layers_[j + 1] - layers_[j]);
  if (s <= 1e-12) return lookup(j, z);
  return (1.0 - s) * lookup(j, z) + s * lookup(j + 1, z);
}

ValueTable value_iteration_1d(const AuxiliaryProblem& aux, const ZGrid& zgrid, const ValueIterationOptions& options) {
  if (aux.dim() != 1) throw DomainError("value_iteration_1d: the auxiliary state must be scalar");
  ValueTable table(aux.layers(), zgrid, options.interp);
  const std::vector<double>& layers = table.layers();
  const std::size_t L = layers.size();
  const std::size_t m = zgrid.m;
  const ControlSet& U = aux.controls();
  const std::size_t nu = U.size();

  std::vector<double> zs(m);
  for (std::size_t i = 0; i < m; ++i) zs[i] = zgrid.point(i);
  Vec zi(1);
  for (std::size_t i = 0; i < m; ++i) {
    zi(0) = zs[i];
    table.layer_values(L - 1)[i] = aux.sigma_aux(zi);
  }

  std::vector<double> inc(nu);
  std::vector<double> run(nu);
  for (std::size_t j = L - 1; j-- > 0;) {
    const double a = layers[j];
    const double b = layers[j + 1];
    for (std::size_t c = 0; c < nu; ++c) {
      inc[c] = aux.increment(a, b, U[c])(0);
      run[c] = running_cost_panel(aux.original().chi, a, b, U[c]);
    }
    std::vector<double>& V = table.layer_values(j);
    std::vector<std::size_t>& arg = table.layer_argmin(j);
    for (std::size_t i = 0; i < m; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_c = 0;
      for (std::size_t c = 0; c < nu; ++c) {
        const double v = run[c] + table.lookup(j + 1, zs[i] + inc[c]);
        if (v < best) {
          best = v;
          best_c = c;
        }
      }
      V[i] = best;
      arg[i] = best_c;
    }
  }
  return table;
}

}  // namespace foc
