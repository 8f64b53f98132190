#include <doctest.h>

#include <cmath>
#include <vector>

#include "abridge/bridge.hpp"

using namespace abridge;

TEST_CASE("uniform grid endpoints") {
    const TimeGrid g = build_grid(1.0, 0.5, 2, GridScheme::uniform);
    REQUIRE(g.size() == 2);
    CHECK(g.times[0] == 0.0);
    CHECK(g.times[1] == 0.5);
}

TEST_CASE("geometric grid is log-equidistant in T - t") {
    const TimeGrid g = build_grid(1.0, 1.0 - std::exp(-4.0), 5, GridScheme::geometric);
    REQUIRE(g.size() == 5);
    for (int k = 0; k < 5; ++k)
        CHECK(g.ttm[k] == doctest::Approx(std::exp(-static_cast<double>(k))).epsilon(1e-12));
}

TEST_CASE("grid window and size errors") {
    CHECK_THROWS_AS(build_grid(1.0, 1.5, 10, GridScheme::uniform), InvalidWindow);
    CHECK_THROWS_AS(build_grid(1.0, 1.0, 10, GridScheme::uniform), InvalidWindow);
    CHECK_THROWS_AS(build_grid(1.0, -0.1, 10, GridScheme::uniform), InvalidWindow);
    CHECK_THROWS_AS(build_grid(1.0, 0.5, 1, GridScheme::uniform), InvalidGrid);
}

TEST_CASE("step covariance closed forms") {
    const BridgeParams p1(1.0, 1.0);
    const StepCov c1 = step_covariance(p1, 0.0, 0.5);
    CHECK(c1.var_dw == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(c1.var_dy == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c1.cov == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    const StepCov zero = step_covariance(p1, 0.3, 0.3);
    CHECK(zero.var_dw == 0.0);
    CHECK(zero.var_dy == 0.0);
    CHECK(zero.cov == 0.0);

    const BridgeParams ph(0.5, 1.0);
    const StepCov ch = step_covariance(ph, 0.0, 0.5);
    CHECK(ch.var_dy == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(ch.cov == doctest::Approx(2.0 * (1.0 - std::sqrt(0.5))).epsilon(1e-12));

    CHECK_THROWS_AS(step_covariance(p1, 0.0, 1.0), InvalidWindow);
    CHECK_THROWS_AS(step_covariance(p1, 0.5, 0.25), InvalidGrid);
}

TEST_CASE("special-case branches agree with the generic formula near removable points") {
    for (const double base : {0.5, 1.0}) {
        for (const double eps : {1e-6, -1e-6}) {
            const BridgeParams generic(base + eps, 1.0);
            const BridgeParams special(base, 1.0);
            const StepCov a = step_covariance(generic, 0.1, 0.6);
            const StepCov b = step_covariance(special, 0.1, 0.6);
            CHECK(a.var_dy == doctest::Approx(b.var_dy).epsilon(1e-4));
            CHECK(a.cov == doctest::Approx(b.cov).epsilon(1e-4));
        }
    }
}

TEST_CASE("Cauchy-Schwarz holds on randomly drawn steps") {
    auto g = rng::substream(2024, 0);
    for (int rep = 0; rep < 2000; ++rep) {
        const double alpha = 0.05 + 3.0 * g.uniform();
        const double T = 0.1 + 5.0 * g.uniform();
        double s = T * g.uniform() * 0.999;
        double u = s + (T * 0.9999 - s) * g.uniform();
        const BridgeParams p(alpha, T);
        const StepCov c = step_covariance(p, s, u);
        CHECK(c.cov * c.cov <= c.var_dw * c.var_dy * (1.0 + 1e-9) + 1e-300);
    }
}

TEST_CASE("marginal variance closed forms") {
    const BridgeParams p1(1.0, 1.0);
    CHECK(marginal_variance(p1, 0.5) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(marginal_variance(p1, 0.0) == 0.0);
    const BridgeParams ph(0.5, 1.0);
    CHECK(marginal_variance(ph, 1.0 - std::exp(-1.0)) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(marginal_variance(p1, 1.0), InvalidWindow);
}

TEST_CASE("grid refinement preserves the law at shared points") {
    const BridgeParams p(0.8, 1.0);
    const TimeGrid coarse = build_grid_ttm(1.0, std::exp(-4.0), 5, GridScheme::geometric);
    const TimeGrid fine = build_grid_ttm(1.0, std::exp(-4.0), 9, GridScheme::geometric);
    // cumulative Var Y over steps = Var Y_t; shared points are 0,2,4,6,8 in `fine`
    std::vector<double> var_coarse(1, 0.0), var_fine(1, 0.0);
    for (std::size_t k = 0; k + 1 < coarse.size(); ++k)
        var_coarse.push_back(var_coarse.back() +
                             detail::step_cov_ttm(p.alpha, coarse.ttm[k], coarse.ttm[k + 1]).var_dy);
    for (std::size_t k = 0; k + 1 < fine.size(); ++k)
        var_fine.push_back(var_fine.back() +
                           detail::step_cov_ttm(p.alpha, fine.ttm[k], fine.ttm[k + 1]).var_dy);
    for (std::size_t k = 0; k < coarse.size(); ++k)
        CHECK(var_coarse[k] == doctest::Approx(var_fine[2 * k]).epsilon(1e-12));
}

TEST_CASE("simulated paths satisfy the construction invariants") {
    const BridgeParams p(1.0, 1.0);
    const TimeGrid g = build_grid(1.0, 0.9, 101, GridScheme::geometric);
    auto s1 = rng::substream(7, 0);
    const PathSample a = simulate_path(p, g, s1);
    CHECK(a.w[0] == 0.0);
    CHECK(a.y[0] == 0.0);
    CHECK(a.x[0] == 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double expect = detail::pow_pos(g.ttm[k], p.alpha) * a.y[k];
        CHECK(a.x[k] == doctest::Approx(expect).epsilon(1e-15));
    }

    auto s2 = rng::substream(7, 0);
    const PathSample b = simulate_path(p, g, s2);
    bool identical = true;
    for (std::size_t k = 0; k < g.size(); ++k)
        identical = identical && a.w[k] == b.w[k] && a.y[k] == b.y[k] && a.x[k] == b.x[k];
    CHECK(identical);  // bit-for-bit determinism
}

TEST_CASE("Monte Carlo marginal mean and variance at t = 1/2") {
    const BridgeParams p(1.0, 1.0);
    const TimeGrid g = build_grid(1.0, 0.5, 65, GridScheme::geometric);
    const int n = 10000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        auto s = rng::substream(5150, static_cast<std::uint64_t>(i));
        const PathSample path = simulate_path(p, g, s);
        const double x = path.x.back();
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    const double truth = marginal_variance(p, 0.5);  // 0.25
    const double se_mean = std::sqrt(truth / n);
    const double se_var = truth * std::sqrt(2.0 / n);
    CHECK(std::abs(mean) < 4.0 * se_mean);
    CHECK(std::abs(var - truth) < 4.0 * se_var);
}
