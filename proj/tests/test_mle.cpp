#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "abridge/mle.hpp"

using namespace abridge;

namespace {

PathSample manual_path(std::vector<double> times, std::vector<double> x, double T) {
    PathSample p;
    p.grid.times = times;
    for (double t : times) p.grid.ttm.push_back(T - t);
    p.x = std::move(x);
    p.w.assign(p.x.size(), 0.0);
    p.y.assign(p.x.size(), 0.0);
    return p;
}

}  // namespace

TEST_CASE("hand-computed left-endpoint sums") {
    const PathSample p = manual_path({0.0, 0.5, 0.75}, {0.0, 0.1, 0.05}, 1.0);
    const MleEstimate est = mle_estimate(p, 1.0);
    CHECK(est.numerator == doctest::Approx(-0.01).epsilon(1e-14));
    CHECK(est.denominator == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(est.alpha_hat == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("all-zero path is degenerate") {
    const PathSample p = manual_path({0.0, 0.5, 0.75}, {0.0, 0.0, 0.0}, 1.0);
    CHECK_THROWS_AS(mle_estimate(p, 1.0), DegeneratePath);
}

TEST_CASE("scale equivariance of the Ito sums") {
    const PathSample p = manual_path({0.0, 0.3, 0.5, 0.8}, {0.0, 0.2, -0.1, 0.15}, 1.0);
    PathSample q = p;
    for (double& v : q.x) v *= 3.0;
    const MleEstimate ep = mle_estimate(p, 1.0);
    const MleEstimate eq = mle_estimate(q, 1.0);
    CHECK(eq.numerator == 9.0 * ep.numerator);
    CHECK(eq.denominator == 9.0 * ep.denominator);
    CHECK(eq.alpha_hat == ep.alpha_hat);
}

TEST_CASE("standardized statistic examples") {
    MleEstimate est;
    est.alpha_hat = 1.0;
    est.numerator = est.denominator = 1.0;
    est.t_end = 1.0 - std::exp(-4.0);
    est.ttm_end = std::exp(-4.0);
    const BridgeParams p(1.0, 1.0);
    CHECK(standardized_statistic(est, p) == 0.0);

    est.alpha_hat = 0.5;  // lambda = 4 => sqrt(lambda)(alpha - alpha_hat) = 1
    CHECK(standardized_statistic(est, p) == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(standardized_statistic(est, BridgeParams(0.4, 1.0)), RegimeError);
    est.ttm_end = 1.5;
    CHECK_THROWS_AS(standardized_statistic(est, p), InvalidWindow);
}

TEST_CASE("error decomposition of the all-zero path") {
    const PathSample p = manual_path({0.0, 0.5, 1.0 - std::exp(-2.0)}, {0.0, 0.0, 0.0}, 1.0);
    const ErrorDecomposition d = decompose_error(p, BridgeParams(1.0, 1.0));
    CHECK(d.chaos_numerator == 0.0);
    CHECK(d.chaos_denominator == 0.0);
}

TEST_CASE("ratio consistency between the chaos fraction and the statistic") {
    // geometric grid n = 4000, t = 1 - e^{-4}: the two discretizations of
    // sqrt(lambda)(alpha - alpha_hat) agree to ~1e-2 in the median.
    const BridgeParams params(1.0, 1.0);
    const TimeGrid grid = build_grid_ttm(1.0, std::exp(-4.0), 4000, GridScheme::geometric);
    const int n = 1000;
    std::vector<double> gap(n);
    for (int i = 0; i < n; ++i) {
        auto s = rng::substream(99, static_cast<std::uint64_t>(i));
        const PathSample path = simulate_path(params, grid, s);
        const MleEstimate est = mle_estimate(path, 1.0);
        const ErrorDecomposition dec = decompose_error(path, params);
        gap[i] = std::abs(dec.chaos_numerator / dec.chaos_denominator -
                          standardized_statistic(est, params));
    }
    std::nth_element(gap.begin(), gap.begin() + n / 2, gap.end());
    CHECK(gap[n / 2] <= 1e-2);
}

TEST_CASE("strong consistency along k = 4, 7, 10") {
    const BridgeParams params(1.0, 1.0);
    const int n = 200;
    double prev = 1e300;
    for (const double k : {4.0, 7.0, 10.0}) {
        const TimeGrid grid = build_grid_ttm(1.0, std::exp(-k), 2000, GridScheme::geometric);
        double mean_err = 0.0;
        for (int i = 0; i < n; ++i) {
            auto s = rng::substream(4242, static_cast<std::uint64_t>(i));  // common draws
            const PathSample path = simulate_path(params, grid, s);
            mean_err += std::abs(mle_estimate(path, 1.0).alpha_hat - 1.0);
        }
        mean_err /= n;
        CHECK(mean_err < prev);
        prev = mean_err;
    }
}

TEST_CASE("five-sigma coverage of the standardized error at k = 10") {
    const BridgeParams params(1.0, 1.0);
    const TimeGrid grid = build_grid_ttm(1.0, std::exp(-10.0), 4000, GridScheme::geometric);
    const int n = 2000;
    const double bound = 5.0 / std::sqrt(10.0);  // 5/sqrt(lambda) ~ 1.58
    int exceed = 0;
    for (int i = 0; i < n; ++i) {
        auto s = rng::substream(31337, static_cast<std::uint64_t>(i));
        const PathSample path = simulate_path(params, grid, s);
        if (std::abs(mle_estimate(path, 1.0).alpha_hat - 1.0) > bound) ++exceed;
    }
    CHECK(exceed <= 2);  // >= 99.9% of replicas inside
}
