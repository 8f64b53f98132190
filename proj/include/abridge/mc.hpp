#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "abridge/bridge.hpp"
#include "abridge/stats.hpp"

namespace abridge::mc {

struct GridSpec {
    std::size_t n = 2000;
    GridScheme scheme = GridScheme::geometric;
};

/// One Monte Carlo CLT experiment at a fixed observation horizon.
struct CltReport {
    double t;
    double ttm;     // T - t
    double lambda;
    std::size_t n_paths;
    std::size_t grid_n;
    double d_hat;           // empirical Kolmogorov distance to N(0,1)
    double dkw_halfwidth;   // at the configured delta
    double rate_product;    // d_hat * sqrt(|log(T-t)|)
    stats::Moments sample_moments;  // of the I_2(f_t) samples
};

enum class Regime { cauchy, half, normal };

struct RegimeReport {
    Regime regime;
    double scaling;  // scale parameter of the limit law (Cauchy case), else 1
    struct {
        double median;
        double q1;
        double q3;
        double ks;  // two-sample KS (half), one-sample d_hat (normal), NaN (cauchy)
    } quantile_diagnostics;
};

/// Simulate n_paths independent paths up to t and compare the standardized
/// statistic against the standard normal.  Replica i draws from the
/// counter-derived stream (seed, i); the result is bit-identical for any
/// worker count.
CltReport clt_experiment(const BridgeParams& params, double t, std::size_t n_paths,
                         const GridSpec& grid, std::uint64_t seed,
                         unsigned workers = 0, double delta = 0.01);

/// Same experiment with the horizon given as time-to-maturity (t = T - ttm).
CltReport clt_experiment_ttm(const BridgeParams& params, double ttm, std::size_t n_paths,
                             const GridSpec& grid, std::uint64_t seed,
                             unsigned workers = 0, double delta = 0.01);

struct MomentCheck {
    stats::Moments sample;
    double target_variance;  // b_t   (= 2 ||f_t||^2)
    double target_m3;        // 8 <f (x)1 f, f>
    double target_k4;        // 48 ||f (x)1 f||^2
    double se_variance, se_m3, se_k4;  // batch-estimated standard errors
    double z_variance, z_m3, z_k4;     // standardized discrepancies
};

MomentCheck moment_check(const BridgeParams& params, double t, std::size_t n_paths,
                         std::uint64_t seed, const GridSpec& grid = {},
                         unsigned workers = 0);

std::vector<CltReport> rate_scan(const BridgeParams& params,
                                 const std::vector<double>& k_list, std::size_t n_paths,
                                 const GridSpec& grid, std::uint64_t seed,
                                 unsigned workers = 0, double delta = 0.01);

RegimeReport regime_check(const BridgeParams& params, double t, std::size_t n_paths,
                          const GridSpec& grid, std::uint64_t seed,
                          unsigned workers = 0, double delta = 0.01);

RegimeReport regime_check_ttm(const BridgeParams& params, double ttm, std::size_t n_paths,
                              const GridSpec& grid, std::uint64_t seed,
                              unsigned workers = 0, double delta = 0.01);

namespace detail {
/// Per-replica accumulators of the three discretized integrals.
struct PathSums {
    double num_x;  // sum X/(T-t) dX
    double num_w;  // sum X/(T-t) dW
    double den;    // sum X^2/(T-t)^2 dt
};
/// Simulate replica `index` of (seed) on the prepared coefficients.
PathSums run_replica(const StepCoeffs& coeffs, std::uint64_t seed, std::uint64_t index,
                     std::uint64_t domain = 0);
/// Deterministic parallel map: results land in replica order.
void parallel_replicas(std::size_t n, unsigned workers,
                       const std::function<void(std::size_t)>& body);
}  // namespace detail

}  // namespace abridge::mc
