#include <cmath>

#include "doctest.h"
#include "foc/errors.hpp"
#include "foc/special_functions.hpp"

using foc::beta_fn;
using foc::gamma_fn;
using foc::log_gamma_fn;

TEST_CASE("gamma matches the standard library on a sweep") {
  for (double x = 0.05; x <= 50.0; x += 0.0371) {
    CHECK(gamma_fn(x) == doctest::Approx(std::tgamma(x)).epsilon(1e-13));
  }
}

TEST_CASE("gamma recurrence at half-integers") {
  const double root_pi = std::sqrt(std::acos(-1.0));
  CHECK(gamma_fn(0.5) == doctest::Approx(root_pi).epsilon(1e-14));
  CHECK(gamma_fn(2.5) == doctest::Approx(1.5 * 0.5 * root_pi).epsilon(1e-14));
  CHECK(gamma_fn(2.5) == doctest::Approx(1.3293403881791355).epsilon(1e-14));
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gamma_fn(6.0) == doctest::Approx(120.0).epsilon(1e-14));
}

TEST_CASE("gamma rejects non-positive arguments") {
  CHECK_THROWS_AS(gamma_fn(0.0), foc::DomainError);
  CHECK_THROWS_AS(gamma_fn(-0.5), foc::DomainError);
  CHECK_THROWS_AS(gamma_fn(NAN), foc::DomainError);
  CHECK_THROWS_AS(log_gamma_fn(-1.0), foc::DomainError);
}

TEST_CASE("log gamma beyond the overflow range") {
  for (double x : {0.3, 1.7, 10.0, 171.5, 500.0, 1e4}) {
    CHECK(log_gamma_fn(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
  }
}

TEST_CASE("beta function") {
  CHECK(beta_fn(0.5, 0.5) == doctest::Approx(std::acos(-1.0)).epsilon(1e-14));
  CHECK(beta_fn(2.0, 3.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  CHECK(beta_fn(0.3, 0.7) == doctest::Approx(std::tgamma(0.3) * std::tgamma(0.7)).epsilon(1e-13));
  CHECK_THROWS_AS(beta_fn(0.0, 1.0), foc::DomainError);
}
