#pragma once

#include "foc/fde_motion.hpp"
#include "foc/fundamental_matrix.hpp"
#include "foc/linalg.hpp"

namespace foc {

class AuxiliaryProblem;

struct InfoImage {
  Vec z;
  double source_time = 0.0;
};

/// Terminal value of the homogeneous continuation of the history (L1 route).
InfoImage info_image_ode(const Position& pos, const OriginalProblem& problem);

/// Same quantity from the explicit formula with the history term integrated by parts per panel.
InfoImage info_image_explicit(const Position& pos, const FundamentalMatrixField& F,
                              const OriginalProblem& problem);

/// z_prev + int_{t_from}^{t_to} f*(tau, u(tau)) dtau, in the auxiliary problem's coordinates.
InfoImage info_image_increment(const InfoImage& z_prev, const AuxiliaryProblem& aux,
                               const ControlSignal& u, double t_from, double t_to);

}  // namespace foc
