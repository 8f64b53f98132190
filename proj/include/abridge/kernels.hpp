#pragma once

#include <utility>

#include "abridge/bridge.hpp"
#include "abridge/errors.hpp"

namespace abridge::kernels {

/// Evaluation point for the deterministic kernel quantities.  Requires
/// alpha > 1/2 and 0 < T - t < 1 so that lambda = |log(T-t)|/(2 alpha - 1) > 0.
/// Constructed from t or from k (T - t = e^{-k}); the latter keeps log(T-t)
/// exact at extreme k, where t itself would round to T.
struct EvalPoint {
    BridgeParams params;
    double ttm;      // T - t
    double log_ttm;  // log(T - t), carried exactly

    static EvalPoint from_t(const BridgeParams& params, double t);
    static EvalPoint from_k(const BridgeParams& params, double k);
    static EvalPoint from_ttm(const BridgeParams& params, double ttm);

    double t() const { return params.T - ttm; }
    double big_l() const { return -log_ttm; }  // |log(T-t)|
    double lambda() const { return big_l() / (2.0 * params.alpha - 1.0); }
};

enum class KernelKind { f, g, h };

struct KernelFn {
    KernelKind kind;
    EvalPoint point;
};

/// Pointwise kernel value at times (u, v); 0 outside [0, t]^2.
double kernel_eval(const KernelFn& kernel, double u, double v);

/// Same, parameterized by time-to-maturity (tau = T - time); used where u, v
/// near T cannot be represented accurately as times.
double kernel_eval_ttm(const KernelFn& kernel, double tau_u, double tau_v);

/// (lambda_t, b_t) with b from the explicit formula.
std::pair<double, double> lambda_b(const EvalPoint& point);

/// ||f_t||^2 in closed form; equals b_t/2 identically.
double f_norm_sq(const EvalPoint& point);

/// <f_t (x)_1 f_t, f_t> in closed form.
double f_triple_inner(const EvalPoint& point);

/// The two ordered-simplex pieces of ||f (x)_1 f||^2: inner integrals in
/// closed form, final 1-D integral by adaptive quadrature under T - x = e^{-s}.
std::pair<double, double> a1_a2(const EvalPoint& point);

/// ||f_t (x)_1 f_t||^2 = A1 + A2.
double f_contract_norm_sq(const EvalPoint& point);

/// Quadrature-backed quantities of the g kernel; requires T - t < 1/e.
struct GCross {
    double g_norm_sq;         // ||g||^2
    double g_contract_norm;   // ||g (x)_1 g||
    double fg_inner;          // <f, g>
    double fg_contract_norm;  // ||f (x)_1 g||
};
GCross g_cross_quantities(const EvalPoint& point);

/// Cyclic 4-fold integral of the dominating kernel h over [0,t]^4.  By the
/// proof-chain reduction it equals 16/((2 alpha - 1)^4 lambda^2) (A1 + A2),
/// which makes it a cross-check between the two contraction routes; it also
/// dominates ||g (x)_1 g||^2.
double h_cycle_integral(const EvalPoint& point);

enum class PsiVariant { printed, squared };

struct Psi {
    double psi1, psi2, psi3;
};
/// The three Kolmogorov-bound functionals.  `printed` uses the unsquared
/// ||f (x)_1 g|| inside psi2; `squared` uses ||f (x)_1 g||^2.
Psi psi(const EvalPoint& point, PsiVariant variant = PsiVariant::printed);

/// The three lower-bound conditions, with their theoretical limits.
struct LowerBoundConditions {
    double f_contract_norm;      // ||f (x)_1 f||            -> 0
    double norm_gap_ratio;       // (2||f||^2 - 1)/<fxf, f>  -> 0
    double contract_ratio;       // ||fxf|| / <fxf, f>       -> 2 sqrt(5)/3
    double limit_f_contract_norm;
    double limit_norm_gap_ratio;
    double limit_contract_ratio;
};
LowerBoundConditions lower_bound_conditions(const EvalPoint& point);

/// Scaled remainders of the four large-lambda expansions; each tends to 0.
struct AsymptoticResiduals {
    double f1;  // lambda   * |2||f||^2 - 1 - expansion|
    double f2;  // lambda   * |b^2 - 1  - expansion|
    double f3;  // sqrt(l)  * |<fxf,f>  - expansion|
    double f4;  // lambda   * |.        - expansion|
};

struct KernelReport {
    double lambda;
    double b;
    double f_norm_sq;
    double f_triple_inner;
    double f_contract_norm_sq;
    double a1;
    double a2;
    double g_norm_sq;
    double g_contract_norm;
    double fg_inner;
    double fg_contract_norm;
    double psi1;
    double psi2;
    double psi3;
    AsymptoticResiduals asymptotic_residuals;
};

/// Assemble every kernel quantity at one point.  g-backed fields (and psi)
/// need T - t < 1/e and moderate |log(T-t)|; when `include_g` is false or the
/// point lies outside that domain they are reported as NaN.
KernelReport asymptotic_report(const EvalPoint& point,
                               PsiVariant variant = PsiVariant::printed,
                               bool include_g = true);

}  // namespace abridge::kernels
