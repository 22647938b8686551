#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "foc/fde_motion.hpp"
#include "foc/linalg.hpp"

namespace foc {

/// A = [[0, 1], [0, 0]].
Mat double_integrator();

/// D x1 = x2 + cos u, D x2 = sin u, u in [-pi/2, pi/2], J = -x1(theta), x0 = 0.
OriginalProblem example1_problem(FracOrder alpha, double t0, double theta, std::size_t N,
                                 std::size_t control_samples = 181);

/// D x1 = x2, D x2 = u, u in [-1, 1], J = (x1(theta) - c1)^2 + int u^2.
OriginalProblem example2_problem(FracOrder alpha, double t0, double theta, std::size_t N, double c1,
                                 std::size_t control_samples = 201);

/// Example 2's system with J = (x1(theta) - c1)^2.
OriginalProblem example3_problem(FracOrder alpha, double t0, double theta, std::size_t N, double c1,
                                 std::size_t control_samples = 201);

/// Example 2's system with sigma = ||K (x - c)|| and chi = q u^2.
OriginalProblem example4_problem(FracOrder alpha, double t0, double theta, std::size_t N, const Mat& K,
                                 const Vec& c, double q, std::size_t control_samples = 201);

struct SigmaSpec {
  std::string type = "quadratic";  ///< quadratic | norm | linear | zero
  Mat K;
  Vec c;
  double weight = 1.0;
};

/// D x = A x + B u + d with a box control set.
struct CustomSpec {
  Mat A;
  Mat B;
  Vec d;
  SigmaSpec sigma;
  double chi_q = 0.0;  ///< chi = chi_q |u|^2
  Vec lower;
  Vec upper;
  std::vector<std::size_t> samples;
  double R_x = 1.0;
};

OriginalProblem custom_problem(FracOrder alpha, double t0, double theta, std::size_t N, const CustomSpec& spec);

}  // namespace foc
