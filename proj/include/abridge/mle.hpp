#pragma once

#include "abridge/bridge.hpp"

namespace abridge {

/// MLE of the drift exponent from a discretized path: left-endpoint Ito sum
/// over Lebesgue quadrature sum, alpha_hat = -numerator/denominator.
struct MleEstimate {
    double alpha_hat;
    double numerator;    // sum X_k/(T-t_k) (X_{k+1} - X_k)
    double denominator;  // sum X_k^2/(T-t_k)^2 dt_k
    double t_end;
    double ttm_end;      // T - t_end carried alongside to keep log(T-t) exact
};

/// The sampled second-chaos pair of the error representation:
/// chaos_numerator ~ I_2(f_t), chaos_denominator ~ I_2(g_t) + b_t.
struct ErrorDecomposition {
    double chaos_numerator;    // (1/sqrt(lambda)) sum X_k/(T-t_k) dW_k
    double chaos_denominator;  // (1/lambda) sum X_k^2/(T-t_k)^2 dt_k
};

MleEstimate mle_estimate(const PathSample& path, double T);

/// sqrt(lambda_t) (alpha - alpha_hat) with lambda_t = |log(T-t)|/(2 alpha - 1).
double standardized_statistic(const MleEstimate& est, const BridgeParams& params);

ErrorDecomposition decompose_error(const PathSample& path, const BridgeParams& params);

}  // namespace abridge
