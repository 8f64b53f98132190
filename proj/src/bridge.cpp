#include "abridge/bridge.hpp"

#include <cmath>

namespace abridge {

namespace detail {

double pow_pos(double x, double p) {
    if (p == 0.0) return 1.0;
    return std::exp(p * std::log(x));
}

StepCov step_cov_ttm(double alpha, double tau_s, double tau_u) {
    if (tau_s == tau_u) return {0.0, 0.0, 0.0};
    StepCov c;
    c.var_dw = tau_s - tau_u;
    // dlr = log(tau_u / tau_s) <= 0, formed without cancellation.
    const double dlr = std::log1p((tau_u - tau_s) / tau_s);
    const double nu = 1.0 - 2.0 * alpha;
    if (std::abs(nu) < 1e-8) {
        c.var_dy = -dlr;  // log((T-s)/(T-u))
    } else {
        // (tau_u^nu - tau_s^nu)/(2a-1) = -tau_s^nu expm1(nu dlr)/nu
        c.var_dy = -pow_pos(tau_s, nu) * std::expm1(nu * dlr) / nu;
    }
    const double mu = 1.0 - alpha;
    if (std::abs(mu) < 1e-8) {
        c.cov = -dlr;
    } else {
        c.cov = -pow_pos(tau_s, mu) * std::expm1(mu * dlr) / mu;
    }
    return c;
}

}  // namespace detail

BridgeParams::BridgeParams(double alpha_, double T_) : alpha(alpha_), T(T_) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw InvalidWindow("BridgeParams: alpha must be positive and finite");
    if (!(T > 0.0) || !std::isfinite(T))
        throw InvalidWindow("BridgeParams: T must be positive and finite");
}

TimeGrid build_grid_ttm(double T, double ttm_end, std::size_t n, GridScheme scheme) {
    if (!(T > 0.0) || !std::isfinite(T)) throw InvalidWindow("build_grid: T must be positive");
    if (!(ttm_end > 0.0)) throw InvalidWindow("build_grid: t_end must be below T");
    if (!(ttm_end < T)) throw InvalidWindow("build_grid: t_end must be positive");
    if (n < 2) throw InvalidGrid("build_grid: need at least 2 grid points");

    TimeGrid g;
    g.times.resize(n);
    g.ttm.resize(n);
    const double nm1 = static_cast<double>(n - 1);
    if (scheme == GridScheme::geometric) {
        const double log_T = std::log(T);
        const double log_end = std::log(ttm_end);
        for (std::size_t k = 0; k < n; ++k) {
            const double frac = static_cast<double>(k) / nm1;
            g.ttm[k] = std::exp(log_T + frac * (log_end - log_T));
            g.times[k] = T - g.ttm[k];
        }
    } else {
        const double t_end = T - ttm_end;
        for (std::size_t k = 0; k < n; ++k) {
            const double frac = static_cast<double>(k) / nm1;
            g.times[k] = t_end * frac;
            g.ttm[k] = T - g.times[k];
        }
    }
    g.times.front() = 0.0;
    g.ttm.front() = T;
    g.ttm.back() = ttm_end;
    g.times.back() = T - ttm_end;
    for (std::size_t k = 0; k + 1 < n; ++k)
        if (!(g.ttm[k] > g.ttm[k + 1]))
            throw InvalidGrid("build_grid: grid collapsed (steps below double resolution)");
    return g;
}

TimeGrid build_grid(double T, double t_end, std::size_t n, GridScheme scheme) {
    if (!(T > 0.0) || !std::isfinite(T)) throw InvalidWindow("build_grid: T must be positive");
    if (!(t_end < T)) throw InvalidWindow("build_grid: t_end must be below T");
    if (!(t_end > 0.0)) throw InvalidWindow("build_grid: t_end must be positive");
    return build_grid_ttm(T, T - t_end, n, scheme);
}

StepCov step_covariance(const BridgeParams& params, double s, double u) {
    if (!(u < params.T)) throw InvalidWindow("step_covariance: u must be below T");
    if (!(s >= 0.0)) throw InvalidGrid("step_covariance: s must be >= 0");
    if (u < s) throw InvalidGrid("step_covariance: u must be >= s");
    return detail::step_cov_ttm(params.alpha, params.T - s, params.T - u);
}

StepCoeffs StepCoeffs::build(const BridgeParams& params, const TimeGrid& grid) {
    const std::size_t n = grid.size();
    if (n < 2) throw InvalidGrid("StepCoeffs: grid too short");
    if (!(grid.ttm.back() > 0.0) || !(grid.ttm.front() <= params.T))
        throw InvalidWindow("StepCoeffs: grid not contained in [0, T)");

    StepCoeffs c;
    c.sd_w.resize(n - 1);
    c.c_yw.resize(n - 1);
    c.sd_y_perp.resize(n - 1);
    c.inv_ttm.resize(n - 1);
    c.dt.resize(n - 1);
    c.pow_alpha.resize(n);
    for (std::size_t k = 0; k < n; ++k)
        c.pow_alpha[k] = detail::pow_pos(grid.ttm[k], params.alpha);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const StepCov sc = detail::step_cov_ttm(params.alpha, grid.ttm[k], grid.ttm[k + 1]);
        if (sc.cov * sc.cov > sc.var_dw * sc.var_dy * (1.0 + 1e-9) + 1e-300)
            throw NumericalFailure("StepCoeffs: step covariance violates Cauchy-Schwarz");
        c.sd_w[k] = std::sqrt(sc.var_dw);
        c.c_yw[k] = sc.cov / c.sd_w[k];
        const double resid = sc.var_dy - sc.cov * sc.cov / sc.var_dw;
        c.sd_y_perp[k] = std::sqrt(resid > 0.0 ? resid : 0.0);
        c.inv_ttm[k] = 1.0 / grid.ttm[k];
        c.dt[k] = sc.var_dw;
    }
    return c;
}

PathSample simulate_path(const BridgeParams& params, const TimeGrid& grid,
                         rng::Xoshiro256pp& stream) {
    const StepCoeffs c = StepCoeffs::build(params, grid);
    const std::size_t n = grid.size();
    PathSample p;
    p.grid = grid;
    p.w.assign(n, 0.0);
    p.y.assign(n, 0.0);
    p.x.assign(n, 0.0);
    double w = 0.0, y = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const rng::NormalPair z = rng::normal_pair(stream);
        w += c.sd_w[k] * z.z1;
        y += c.c_yw[k] * z.z1 + c.sd_y_perp[k] * z.z2;
        p.w[k + 1] = w;
        p.y[k + 1] = y;
        p.x[k + 1] = c.pow_alpha[k + 1] * y;
    }
    if (!std::isfinite(w) || !std::isfinite(y))
        throw NumericalFailure("simulate_path: non-finite sample");
    return p;
}

double marginal_variance(const BridgeParams& params, double t) {
    if (!(t < params.T)) throw InvalidWindow("marginal_variance: t must be below T");
    if (t == 0.0) return 0.0;
    const double tau = params.T - t;
    const double m = 2.0 * params.alpha - 1.0;
    const double lr = std::log(tau / params.T);
    if (std::abs(m) < 1e-8) return tau * (-lr);  // (T-t) log(T/(T-t))
    // (T-t)^{2a} Var Y_t = -tau expm1(m log(tau/T)) / m
    return -tau * std::expm1(m * lr) / m;
}

}  // namespace abridge
