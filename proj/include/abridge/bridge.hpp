#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "abridge/errors.hpp"
#include "abridge/rng.hpp"

namespace abridge {

/// Model parameters of dX = -alpha X/(T-t) dt + dW on [0, T).
struct BridgeParams {
    double alpha;
    double T;

    BridgeParams(double alpha_, double T_);
};

enum class GridScheme { uniform, geometric };

/// Strictly increasing observation times in [0, t_end], t_end < T.
/// `ttm` caches T - times computed without cancellation; all near-singular
/// arithmetic goes through it.
struct TimeGrid {
    std::vector<double> times;
    std::vector<double> ttm;

    std::size_t size() const { return times.size(); }
    double t_end() const { return times.back(); }
    double ttm_end() const { return ttm.back(); }
};

/// Covariance of the joint Gaussian increment (dW, dY) over one step, where
/// Y_t = int_0^t (T-s)^{-alpha} dW_s.
struct StepCov {
    double var_dw;
    double var_dy;
    double cov;
};

/// Joint exact samples of (W, Y, X) on a grid; X[k] = (T - t_k)^alpha Y[k].
struct PathSample {
    TimeGrid grid;
    std::vector<double> w;
    std::vector<double> y;
    std::vector<double> x;
};

/// Per-step simulation coefficients, path-independent; built once per grid.
/// Cauchy-Schwarz (cov^2 <= var_dw * var_dy) is checked for every step here.
struct StepCoeffs {
    std::vector<double> sd_w;        // sqrt(var_dw)
    std::vector<double> c_yw;        // cov / sd_w
    std::vector<double> sd_y_perp;   // sqrt(var_dy - cov^2/var_dw)
    std::vector<double> inv_ttm;     // 1/(T - t_k), left endpoints
    std::vector<double> pow_alpha;   // (T - t_k)^alpha, all grid points
    std::vector<double> dt;

    static StepCoeffs build(const BridgeParams& params, const TimeGrid& grid);
    std::size_t steps() const { return sd_w.size(); }
};

TimeGrid build_grid(double T, double t_end, std::size_t n, GridScheme scheme);

/// Grid given directly in time-to-maturity; preferred when T - t_end is tiny
/// (t_end = T - e^{-k} loses the window to rounding).
TimeGrid build_grid_ttm(double T, double ttm_end, std::size_t n, GridScheme scheme);

StepCov step_covariance(const BridgeParams& params, double s, double u);

PathSample simulate_path(const BridgeParams& params, const TimeGrid& grid,
                         rng::Xoshiro256pp& stream);

inline PathSample simulate_path(const BridgeParams& params, const TimeGrid& grid,
                                std::uint64_t seed) {
    auto stream = rng::substream(seed, 0);
    return simulate_path(params, grid, stream);
}

/// E[X_t^2] = (T-t)^{2 alpha} Var Y_t, in closed form.
double marginal_variance(const BridgeParams& params, double t);

namespace detail {
/// exp(p * log(x)) for x > 0; powers of small T - t stay accurate in log space.
double pow_pos(double x, double p);
/// Step covariance from time-to-maturity endpoints tau_s = T-s >= tau_u = T-u.
StepCov step_cov_ttm(double alpha, double tau_s, double tau_u);
}  // namespace detail

}  // namespace abridge
