#include <doctest.h>

#include <cmath>

#include "abridge/errors.hpp"
#include "abridge/quadrature.hpp"

using namespace abridge;

TEST_CASE("polynomial and transcendental integrals") {
    CHECK(quad::integrate_or_throw([](double x) { return x * x; }, 0.0, 1.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(quad::integrate_or_throw([](double x) { return std::exp(-x); }, 0.0, 20.0) ==
          doctest::Approx(1.0 - std::exp(-20.0)).epsilon(1e-10));
    CHECK(quad::integrate_or_throw([](double x) { return std::log(x); }, 0.0, 1.0,
                                   1e-9, 1e-12) ==
          doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("integrable endpoint singularity") {
    const double v =
        quad::integrate_or_throw([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                                 1e-9, 1e-12);
    CHECK(v == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("log substitution flattens the (T-x)^{-1} blowup") {
    const double T = 1.0;
    const double t = 1.0 - std::exp(-6.0);
    const double v = quad::integrate_log_sub([T](double x) { return 1.0 / (T - x); }, T,
                                             0.0, t);
    CHECK(v == doctest::Approx(6.0).epsilon(1e-10));
}

TEST_CASE("panel budget exhaustion raises NumericalFailure with achieved tolerance") {
    CHECK_THROWS_AS(quad::integrate_or_throw([](double x) { return 1.0 / std::sqrt(x); },
                                             0.0, 1.0, 1e-9, 0.0, /*max_panels=*/4),
                    NumericalFailure);
    try {
        quad::integrate_or_throw([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                                 1e-9, 0.0, 4);
    } catch (const NumericalFailure& e) {
        CHECK(e.achieved_tolerance > 1e-9);
    }
}
