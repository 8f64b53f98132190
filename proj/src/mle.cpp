#include "abridge/mle.hpp"

#include <cmath>

namespace abridge {

namespace {

struct ItoSums {
    double num_x = 0.0;  // sum X/(T-t) dX
    double num_w = 0.0;  // sum X/(T-t) dW
    double den = 0.0;    // sum X^2/(T-t)^2 dt
};

ItoSums accumulate(const PathSample& path) {
    ItoSums s;
    const std::size_t n = path.grid.size();
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double w = path.x[k] / path.grid.ttm[k];
        const double dt = path.grid.ttm[k] - path.grid.ttm[k + 1];
        s.num_x += w * (path.x[k + 1] - path.x[k]);
        s.num_w += w * (path.w[k + 1] - path.w[k]);
        s.den += w * w * dt;
    }
    return s;
}

double lambda_of(const BridgeParams& params, double ttm_end) {
    if (params.alpha <= 0.5)
        throw RegimeError("standardized statistic requires alpha > 1/2");
    if (!(ttm_end < 1.0) || !(ttm_end > 0.0))
        throw InvalidWindow("standardized statistic requires 0 < T - t < 1");
    return -std::log(ttm_end) / (2.0 * params.alpha - 1.0);
}

}  // namespace

MleEstimate mle_estimate(const PathSample& path, double T) {
    if (path.grid.size() < 2) throw InvalidGrid("mle_estimate: path too short");
    if (!(path.grid.t_end() < T)) throw InvalidWindow("mle_estimate: last grid time must be below T");
    const ItoSums s = accumulate(path);
    if (s.den == 0.0) throw DegeneratePath("mle_estimate: zero observed information");
    MleEstimate est;
    est.numerator = s.num_x;
    est.denominator = s.den;
    est.alpha_hat = -s.num_x / s.den;
    est.t_end = path.grid.t_end();
    est.ttm_end = path.grid.ttm_end();
    return est;
}

double standardized_statistic(const MleEstimate& est, const BridgeParams& params) {
    const double lambda = lambda_of(params, est.ttm_end);
    return std::sqrt(lambda) * (params.alpha - est.alpha_hat);
}

ErrorDecomposition decompose_error(const PathSample& path, const BridgeParams& params) {
    const double lambda = lambda_of(params, path.grid.ttm_end());
    const ItoSums s = accumulate(path);
    return {s.num_w / std::sqrt(lambda), s.den / lambda};
}

}  // namespace abridge
