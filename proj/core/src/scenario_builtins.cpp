#include "foc/builtins.hpp"

#include <cmath>
#include <numbers>

#include "foc/errors.hpp"

namespace foc {

namespace {

ControlSet scalar_box(double lo, double hi, std::size_t samples) {
  return ControlSet::box(Vec::Constant(1, lo), Vec::Constant(1, hi), {samples});
}

OriginalProblem double_integrator_problem(FracOrder alpha, double t0, double theta, std::size_t N,
                                          std::size_t control_samples) {
  OriginalProblem p;
  p.alpha = alpha;
  p.grid = TimeGrid(t0, theta, N);
  p.A = SystemMatrixFunction::constant(double_integrator());
  p.f = [](double, const Vec& u) {
    Vec v(2);
    v << 0.0, u(0);
    return v;
  };
  p.chi = [](double, const Vec&) { return 0.0; };
  p.controls = scalar_box(-1.0, 1.0, control_samples);
  p.R_x = 1.0;
  return p;
}

TerminalReduction first_coordinate(double c1, std::function<double(const Vec&)> mu) {
  TerminalReduction r;
  r.K = Mat::Zero(1, 2);
  r.K(0, 0) = 1.0;
  r.c = Vec::Zero(2);
  r.c(0) = c1;
  r.mu = std::move(mu);
  return r;
}

}  // namespace

Mat double_integrator() {
  Mat A(2, 2);
  A << 0.0, 1.0, 0.0, 0.0;
  return A;
}

OriginalProblem example1_problem(FracOrder alpha, double t0, double theta, std::size_t N, std::size_t control_samples) {
  OriginalProblem p = double_integrator_problem(alpha, t0, theta, N, control_samples);
  p.f = [](double, const Vec& u) {
    Vec v(2);
    v << std::cos(u(0)), std::sin(u(0));
    return v;
  };
  p.sigma = [](const Vec& x) { return -x(0); };
  p.controls = scalar_box(-std::numbers::pi / 2.0, std::numbers::pi / 2.0, control_samples);
  p.reduction = first_coordinate(0.0, [](const Vec& z) { return -z(0); });
  p.sigma_lipschitz = 1.0;
  return p;
}

OriginalProblem example2_problem(FracOrder alpha, double t0, double theta, std::size_t N, double c1,
                                 std::size_t control_samples) {
  OriginalProblem p = example3_problem(alpha, t0, theta, N, c1, control_samples);
  p.chi = [](double, const Vec& u) { return u.squaredNorm(); };
  return p;
}

OriginalProblem example3_problem(FracOrder alpha, double t0, double theta, std::size_t N, double c1,
                                 std::size_t control_samples) {
  OriginalProblem p = double_integrator_problem(alpha, t0, theta, N, control_samples);
  p.sigma = [c1](const Vec& x) { return (x(0) - c1) * (x(0) - c1); };
  p.reduction = first_coordinate(c1, [](const Vec& z) { return z(0) * z(0); });
  return p;
}

OriginalProblem example4_problem(FracOrder alpha, double t0, double theta, std::size_t N, const Mat& K, const Vec& c,
                                 double q, std::size_t control_samples) {
  if (K.cols() != 2 || c.size() != 2) throw DomainError("example4: K must have two columns and c two entries");
  OriginalProblem p = double_integrator_problem(alpha, t0, theta, N, control_samples);
  p.sigma = [K, c](const Vec& x) { return (K * (x - c)).norm(); };
  p.chi = [q](double, const Vec& u) { return q * u.squaredNorm(); };
  p.reduction = TerminalReduction{K, c, [](const Vec& z) { return z.norm(); }};
  p.sigma_lipschitz = 1.0;
  return p;
}

OriginalProblem custom_problem(FracOrder alpha, double t0, double theta, std::size_t N, const CustomSpec& spec) {
  const Eigen::Index n = spec.A.rows();
  if (spec.A.cols() != n) throw DomainError("custom: A must be square");
  if (spec.B.rows() != n) throw DomainError("custom: B must have as many rows as A");
  const Eigen::Index m = spec.B.cols();
  if (spec.lower.size() != m || spec.upper.size() != m) throw DomainError("custom: control bounds do not match B");
  const Vec d = spec.d.size() == 0 ? Vec::Zero(n) : spec.d;
  if (d.size() != n) throw DomainError("custom: d must have as many entries as A has rows");

  OriginalProblem p;
  p.alpha = alpha;
  p.grid = TimeGrid(t0, theta, N);
  p.A = SystemMatrixFunction::constant(spec.A);
  p.f = [B = spec.B, d](double, const Vec& u) -> Vec { return B * u + d; };
  p.chi = [q = spec.chi_q](double, const Vec& u) { return q * u.squaredNorm(); };
  std::vector<std::size_t> samples = spec.samples;
  if (samples.empty()) samples.assign(static_cast<std::size_t>(m), 21);
  p.controls = ControlSet::box(spec.lower, spec.upper, samples);
  p.R_x = spec.R_x;

  const SigmaSpec& s = spec.sigma;
  const Mat K = s.K.size() == 0 ? Mat(Mat::Identity(n, n)) : s.K;
  const Vec c = s.c.size() == 0 ? Vec(Vec::Zero(n)) : s.c;
  if (K.cols() != n || c.size() != n) throw DomainError("custom: sigma K or c has the wrong shape");
  const double w = s.weight;
  std::function<double(const Vec&)> mu;
  if (s.type == "quadratic") {
    mu = [w](const Vec& z) { return w * z.squaredNorm(); };
  } else if (s.type == "norm") {
    mu = [w](const Vec& z) { return w * z.norm(); };
    p.sigma_lipschitz = std::abs(w);
  } else if (s.type == "linear") {
    if (K.rows() != 1) throw DomainError("custom: linear sigma needs a single-row K");
    mu = [w](const Vec& z) { return w * z(0); };
    p.sigma_lipschitz = std::abs(w);
  } else if (s.type == "zero") {
    mu = [](const Vec&) { return 0.0; };
    p.sigma_lipschitz = 0.0;
  } else {
    throw DomainError("custom: unknown sigma type '" + s.type + "'");
  }
  p.sigma = [K, c, mu](const Vec& x) { return mu(K * (x - c)); };
  p.reduction = TerminalReduction{K, c, mu};
  return p;
}

}  // namespace foc
