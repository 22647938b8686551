#pragma once

#include "foc/errors.hpp"
#include "foc/special_functions.hpp"
#include "foc/quadrature.hpp"
#include "foc/fractional_core.hpp"
#include "foc/fundamental_matrix.hpp"
#include "foc/fde_motion.hpp"
#include "foc/informational_image.hpp"
#include "foc/auxiliary_problem.hpp"
#include "foc/open_loop.hpp"
#include "foc/feedback.hpp"
#include "foc/builtins.hpp"
#include "foc/scenario.hpp"
