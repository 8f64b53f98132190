#include "abridge/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "abridge/quadrature.hpp"

namespace abridge::kernels {

namespace {

constexpr double kInvE = 0.36787944117144233;  // 1/e
constexpr double kMaxLogWindowForG = 50.0;     // quadrature overflow guard for g

double sq(double x) { return x * x; }

/// Shared scalars of one evaluation point.
struct Ctx {
    double alpha, T, m, L, lambda, ttm, log_ttm, log_T, log_rho, rho_m, Tm;

    explicit Ctx(const EvalPoint& p)
        : alpha(p.params.alpha),
          T(p.params.T),
          m(2.0 * p.params.alpha - 1.0),
          L(p.big_l()),
          lambda(p.lambda()),
          ttm(p.ttm),
          log_ttm(p.log_ttm),
          log_T(std::log(p.params.T)),
          log_rho(p.log_ttm - std::log(p.params.T)),
          rho_m(std::exp((2.0 * p.params.alpha - 1.0) * (p.log_ttm - std::log(p.params.T)))),
          Tm(std::exp(-(2.0 * p.params.alpha - 1.0) * std::log(p.params.T))) {}
};

}  // namespace

EvalPoint EvalPoint::from_t(const BridgeParams& params, double t) {
    if (!std::isfinite(t)) throw InvalidWindow("EvalPoint: t must be finite");
    const double tau = params.T - t;
    if (!(tau > 0.0) || !(tau < 1.0))
        throw InvalidWindow("EvalPoint: requires 0 < T - t < 1");
    if (!(tau < params.T)) throw InvalidWindow("EvalPoint: requires t > 0");
    if (!(params.alpha > 0.5)) throw RegimeError("EvalPoint: requires alpha > 1/2");
    return EvalPoint{params, tau, std::log(tau)};
}

EvalPoint EvalPoint::from_k(const BridgeParams& params, double k) {
    if (!std::isfinite(k)) throw InvalidWindow("EvalPoint: k must be finite");
    const double tau = std::exp(-k);
    if (!(tau > 0.0) || !(tau < 1.0))
        throw InvalidWindow("EvalPoint: requires 0 < T - t < 1 (k > 0)");
    if (!(tau < params.T)) throw InvalidWindow("EvalPoint: requires t > 0");
    if (!(params.alpha > 0.5)) throw RegimeError("EvalPoint: requires alpha > 1/2");
    return EvalPoint{params, tau, -k};
}

EvalPoint EvalPoint::from_ttm(const BridgeParams& params, double ttm) {
    if (!(ttm > 0.0) || !(ttm < 1.0))
        throw InvalidWindow("EvalPoint: requires 0 < T - t < 1");
    if (!(ttm < params.T)) throw InvalidWindow("EvalPoint: requires t > 0");
    if (!(params.alpha > 0.5)) throw RegimeError("EvalPoint: requires alpha > 1/2");
    return EvalPoint{params, ttm, std::log(ttm)};
}

double kernel_eval_ttm(const KernelFn& kernel, double tau_u, double tau_v) {
    const Ctx c(kernel.point);
    if (!(tau_u >= c.ttm) || !(tau_u <= c.T) || !(tau_v >= c.ttm) || !(tau_v <= c.T))
        return 0.0;  // indicator of [0, t]^2
    const double tau_lo = std::min(tau_u, tau_v);  // later time
    const double tau_hi = std::max(tau_u, tau_v);  // earlier time
    switch (kernel.kind) {
        case KernelKind::f:
            return 0.5 / std::sqrt(c.lambda) * detail::pow_pos(tau_lo, c.alpha - 1.0) *
                   detail::pow_pos(tau_hi, -c.alpha);
        case KernelKind::g:
            return detail::pow_pos(tau_u, -c.alpha) * detail::pow_pos(tau_v, -c.alpha) *
                   (detail::pow_pos(tau_lo, c.m) - detail::pow_pos(c.ttm, c.m)) / c.L;
        case KernelKind::h:
            return detail::pow_pos(tau_u, -c.alpha) * detail::pow_pos(tau_v, -c.alpha) *
                   detail::pow_pos(tau_lo, c.m) / c.L;
    }
    return 0.0;
}

double kernel_eval(const KernelFn& kernel, double u, double v) {
    const double T = kernel.point.params.T;
    if (u < 0.0 || v < 0.0) return 0.0;
    return kernel_eval_ttm(kernel, T - u, T - v);
}

std::pair<double, double> lambda_b(const EvalPoint& point) {
    const Ctx c(point);
    const double b = 1.0 + c.log_T / c.L - (1.0 - c.rho_m) / (c.m * c.L);
    return {c.lambda, b};
}

double f_norm_sq(const EvalPoint& point) {
    const Ctx c(point);
    // proof-chain form: (log T - log(T-t) + rho^m/m - 1/m) / (2 |log(T-t)|)
    return (c.log_T + c.L + c.rho_m / c.m - 1.0 / c.m) / (2.0 * c.L);
}

double f_triple_inner(const EvalPoint& point) {
    const Ctx c(point);
    const double bracket = (c.log_T + c.L) + (c.rho_m - 1.0) / c.m - c.rho_m * c.log_rho +
                           (c.rho_m - 1.0);
    return 3.0 * bracket / (4.0 * c.m * c.m * std::pow(c.lambda, 1.5));
}

std::pair<double, double> a1_a2(const EvalPoint& point) {
    const Ctx c(point);
    const double s0 = -c.log_T;
    const double s1 = c.L;
    const double m = c.m, Tm = c.Tm, log_T = c.log_T;
    // Inner integrals already reduced in closed form; only the x4 integral is
    // numeric, under T - x4 = e^{-s}.
    auto a1_integrand = [m, Tm, log_T](double s) {
        const double l = -s - log_T;  // log((T-x)/T)
        const double e = std::exp(-m * s);
        return (1.0 - Tm * e) / (m * m) + (Tm / m) * l * e - 0.5 * Tm * l * l * e;
    };
    const double T2m = Tm * Tm;
    auto a2_integrand = [m, Tm, T2m, log_T](double s) {
        const double l = -s - log_T;
        return (1.0 - T2m * std::exp(-2.0 * m * s)) / m + 2.0 * Tm * l * std::exp(-m * s);
    };
    const double lam2 = c.lambda * c.lambda;
    const double a1 = quad::integrate_or_throw(a1_integrand, s0, s1) / (m * lam2);
    const double a2 = quad::integrate_or_throw(a2_integrand, s0, s1) / (4.0 * m * m * lam2);
    return {a1, a2};
}

double f_contract_norm_sq(const EvalPoint& point) {
    const auto [a1, a2] = a1_a2(point);
    return a1 + a2;
}

// ---------------------------------------------------------------------------
// Cyclic contraction integrals.  f, g, h all factor as k(u,v) =
// p(min tau) q_k(max time) with the shared p(x) = (T-x)^{-alpha} and a
// kernel-specific q that is a short sum of powers of (T-x).  The 4-D cyclic
// integral over [0,t]^4 splits over the 24 orderings into ordered-simplex
// integrals whose per-slot factors are again short power sums; the innermost
// level integrates in closed form and the remaining levels run as one
// cumulative pass (step-doubled RK4 on the iterated-integral system).
// ---------------------------------------------------------------------------

namespace {

struct PowTerm {
    double c, beta;
};

struct PowSum {
    std::array<PowTerm, 4> t{};
    int n = 0;

    static PowSum one() {
        PowSum s;
        s.t[0] = {1.0, 0.0};
        s.n = 1;
        return s;
    }
    void shift(double dbeta) {
        for (int i = 0; i < n; ++i) t[i].beta += dbeta;
    }
    void mul(const PowSum& q) {
        std::array<PowTerm, 4> out{};
        int k = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < q.n; ++j)
                out[k++] = {t[i].c * q.t[j].c, t[i].beta + q.t[j].beta};
        t = out;
        n = k;
        normalize();
    }
    void normalize() {
        std::sort(t.begin(), t.begin() + n,
                  [](const PowTerm& a, const PowTerm& b) { return a.beta < b.beta; });
        int k = 0;
        for (int i = 0; i < n; ++i) {
            if (k > 0 && std::abs(t[i].beta - t[k - 1].beta) <= 1e-12) {
                t[k - 1].c += t[i].c;
            } else {
                t[k++] = t[i];
            }
        }
        n = k;
    }
    bool same_as(const PowSum& o) const {
        if (n != o.n) return false;
        for (int i = 0; i < n; ++i) {
            if (std::abs(t[i].beta - o.t[i].beta) > 1e-12) return false;
            const double scale = std::max(std::abs(t[i].c), std::abs(o.t[i].c));
            if (std::abs(t[i].c - o.t[i].c) > 1e-12 * std::max(scale, 1.0)) return false;
        }
        return true;
    }
    // Value of sum c (T-x)^{beta} at T - x = e^{-s} (betas already hold the
    // Jacobian fold, see below).
    double eval_s(double s) const {
        double v = 0.0;
        for (int i = 0; i < n; ++i) v += t[i].c * std::exp(-t[i].beta * s);
        return v;
    }
};

struct SimplexClass {
    std::array<PowSum, 4> slot;  // Jacobian-folded factors F0..F3
    int multiplicity = 0;
};

/// Iterated integral  int_{s0 < s(0) < ... < s(3) < s1} prod F_i(s(i)) ds.
struct SimplexIntegrator {
    const SimplexClass& cls;
    double s0, s1;

    double u1(double s) const {  // innermost level, closed form
        double v = 0.0;
        const PowSum& F0 = cls.slot[0];
        for (int i = 0; i < F0.n; ++i) {
            const double g = F0.t[i].beta;
            const double d = s - s0;
            if (g == 0.0) {
                v += F0.t[i].c * d;
            } else {
                v += -F0.t[i].c * std::exp(-g * s0) * std::expm1(-g * d) / g;
            }
        }
        return v;
    }

    double sweep(std::size_t steps) const {
        const double h = (s1 - s0) / static_cast<double>(steps);
        double u2 = 0.0, u3 = 0.0, u4 = 0.0;
        const PowSum& F1 = cls.slot[1];
        const PowSum& F2 = cls.slot[2];
        const PowSum& F3 = cls.slot[3];
        auto deriv = [&](double s, double v2, double v3, double& d2, double& d3,
                         double& d4) {
            d2 = F1.eval_s(s) * u1(s);
            d3 = F2.eval_s(s) * v2;
            d4 = F3.eval_s(s) * v3;
        };
        for (std::size_t i = 0; i < steps; ++i) {
            const double s = s0 + static_cast<double>(i) * h;
            double k1_2, k1_3, k1_4, k2_2, k2_3, k2_4, k3_2, k3_3, k3_4, k4_2, k4_3, k4_4;
            deriv(s, u2, u3, k1_2, k1_3, k1_4);
            deriv(s + 0.5 * h, u2 + 0.5 * h * k1_2, u3 + 0.5 * h * k1_3, k2_2, k2_3, k2_4);
            deriv(s + 0.5 * h, u2 + 0.5 * h * k2_2, u3 + 0.5 * h * k2_3, k3_2, k3_3, k3_4);
            deriv(s + h, u2 + h * k3_2, u3 + h * k3_3, k4_2, k4_3, k4_4);
            u2 += h / 6.0 * (k1_2 + 2.0 * k2_2 + 2.0 * k3_2 + k4_2);
            u3 += h / 6.0 * (k1_3 + 2.0 * k2_3 + 2.0 * k3_3 + k4_3);
            u4 += h / 6.0 * (k1_4 + 2.0 * k2_4 + 2.0 * k3_4 + k4_4);
        }
        return u4;
    }

    double integrate(double rel_tol) const {
        double prev = 0.0;
        bool have_prev = false;
        for (std::size_t steps = 1024; steps <= 65536; steps *= 2) {
            const double v = sweep(steps);
            if (have_prev && std::abs(v - prev) <= rel_tol * std::max(std::abs(v), 1e-300))
                return v;
            prev = v;
            have_prev = true;
        }
        throw NumericalFailure("cyclic contraction integral did not converge", 0.0);
    }
};

/// Integral of k1(x0,x1) k2(x1,x2) k3(x2,x3) k4(x3,x0) over [0,t]^4 for
/// max-form kernels sharing p(x) = (T-x)^{-alpha}.
double cyclic4(const std::array<PowSum, 4>& q, const Ctx& c, double rel_tol) {
    static constexpr int kEdge[4][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    std::vector<SimplexClass> classes;
    std::array<int, 4> rank{0, 1, 2, 3};
    do {
        std::array<PowSum, 4> slot{PowSum::one(), PowSum::one(), PowSum::one(),
                                   PowSum::one()};
        for (int e = 0; e < 4; ++e) {
            const int ra = rank[kEdge[e][0]];
            const int rb = rank[kEdge[e][1]];
            slot[std::min(ra, rb)].shift(-c.alpha);
            slot[std::max(ra, rb)].mul(q[e]);
        }
        for (auto& s : slot) {
            s.shift(1.0);  // dx = e^{-s} ds
            s.normalize();
        }
        bool merged = false;
        for (auto& cl : classes) {
            bool same = true;
            for (int i = 0; i < 4 && same; ++i) same = cl.slot[i].same_as(slot[i]);
            if (same) {
                ++cl.multiplicity;
                merged = true;
                break;
            }
        }
        if (!merged) classes.push_back({slot, 1});
    } while (std::next_permutation(rank.begin(), rank.end()));

    const double s0 = -c.log_T;
    const double s1 = c.L;
    double total = 0.0;
    for (const auto& cl : classes) {
        const SimplexIntegrator si{cl, s0, s1};
        total += static_cast<double>(cl.multiplicity) * si.integrate(rel_tol);
    }
    if (!std::isfinite(total))
        throw NumericalFailure("cyclic contraction integral is non-finite");
    return total;
}

PowSum q_of(KernelKind kind, const Ctx& c) {
    PowSum s;
    switch (kind) {
        case KernelKind::f:
            s.t[0] = {0.5 / std::sqrt(c.lambda), c.alpha - 1.0};
            s.n = 1;
            break;
        case KernelKind::g:
            s.t[0] = {1.0 / c.L, c.alpha - 1.0};
            s.t[1] = {-std::exp(c.m * c.log_ttm) / c.L, -c.alpha};
            s.n = 2;
            break;
        case KernelKind::h:
            s.t[0] = {1.0 / c.L, c.alpha - 1.0};
            s.n = 1;
            break;
    }
    return s;
}

/// 2 int_{u < v} w(u, v) du dv for a symmetric pointwise integrand, iterated
/// adaptive quadrature in log-substituted coordinates (tau = e^{-s}).
template <class W>
double symmetric_double_integral(const Ctx& c, W&& w, double rel_tol) {
    const double s0 = -c.log_T;
    const double s1 = c.L;
    auto outer = [&](double sv) {
        const double tau_v = std::exp(-sv);
        auto inner = [&](double su) {
            const double tau_u = std::exp(-su);
            return w(tau_u, tau_v) * tau_u;
        };
        return quad::integrate_or_throw(inner, s0, sv, rel_tol * 0.1, 1e-300) * tau_v;
    };
    return 2.0 * quad::integrate_or_throw(outer, s0, s1, rel_tol, 1e-300);
}

}  // namespace

GCross g_cross_quantities(const EvalPoint& point) {
    const Ctx c(point);
    if (!(c.ttm < kInvE))
        throw DomainError("g_cross_quantities: requires T - t < 1/e");
    if (c.L > kMaxLogWindowForG)
        throw NumericalFailure("g_cross_quantities: |log(T-t)| too large for quadrature");

    const KernelFn fk{KernelKind::f, point};
    const KernelFn gk{KernelKind::g, point};

    GCross out;
    out.g_norm_sq = symmetric_double_integral(
        c, [&](double tu, double tv) { return sq(kernel_eval_ttm(gk, tu, tv)); }, 1e-9);
    out.fg_inner = symmetric_double_integral(
        c,
        [&](double tu, double tv) {
            return kernel_eval_ttm(fk, tu, tv) * kernel_eval_ttm(gk, tu, tv);
        },
        1e-9);

    const PowSum qf = q_of(KernelKind::f, c);
    const PowSum qg = q_of(KernelKind::g, c);
    const double gg = cyclic4({qg, qg, qg, qg}, c, 1e-9);
    const double fg = cyclic4({qf, qg, qg, qf}, c, 1e-9);
    out.g_contract_norm = std::sqrt(std::max(gg, 0.0));
    out.fg_contract_norm = std::sqrt(std::max(fg, 0.0));
    return out;
}

double h_cycle_integral(const EvalPoint& point) {
    const Ctx c(point);
    if (c.L > kMaxLogWindowForG)
        throw NumericalFailure("h_cycle_integral: |log(T-t)| too large for quadrature");
    const PowSum qh = q_of(KernelKind::h, c);
    return cyclic4({qh, qh, qh, qh}, c, 1e-9);
}

Psi psi(const EvalPoint& point, PsiVariant variant) {
    const auto [lambda, b] = lambda_b(point);
    const double f2 = f_norm_sq(point);
    const double ffc = f_contract_norm_sq(point);
    const GCross g = g_cross_quantities(point);
    const double b2 = b * b;
    Psi out;
    out.psi1 = std::sqrt(sq(b2 - 2.0 * f2) + 8.0 * ffc) / b2;
    const double fg_term = variant == PsiVariant::printed ? 2.0 * g.fg_contract_norm
                                                          : 2.0 * sq(g.fg_contract_norm);
    out.psi2 = 2.0 / b2 * std::sqrt(fg_term + sq(g.fg_inner));
    out.psi3 = 2.0 / b2 * std::sqrt(sq(g.g_norm_sq) + 2.0 * sq(g.g_contract_norm));
    return out;
}

LowerBoundConditions lower_bound_conditions(const EvalPoint& point) {
    const double f3 = f_triple_inner(point);
    const double fcn = std::sqrt(std::max(f_contract_norm_sq(point), 0.0));
    LowerBoundConditions out;
    out.f_contract_norm = fcn;
    out.norm_gap_ratio = (2.0 * f_norm_sq(point) - 1.0) / f3;
    out.contract_ratio = fcn / f3;
    out.limit_f_contract_norm = 0.0;
    out.limit_norm_gap_ratio = 0.0;
    out.limit_contract_ratio = 2.0 * std::sqrt(5.0) / 3.0;
    return out;
}

KernelReport asymptotic_report(const EvalPoint& point, PsiVariant variant, bool include_g) {
    const Ctx c(point);
    KernelReport r;
    const auto [lambda, b] = lambda_b(point);
    r.lambda = lambda;
    r.b = b;
    r.f_norm_sq = f_norm_sq(point);
    r.f_triple_inner = f_triple_inner(point);
    const auto [a1, a2] = a1_a2(point);
    r.a1 = a1;
    r.a2 = a2;
    r.f_contract_norm_sq = a1 + a2;

    const double nan = std::nan("");
    r.g_norm_sq = r.g_contract_norm = r.fg_inner = r.fg_contract_norm = nan;
    r.psi1 = r.psi2 = r.psi3 = nan;
    if (include_g && c.ttm < kInvE && c.L <= kMaxLogWindowForG) {
        const GCross g = g_cross_quantities(point);
        r.g_norm_sq = g.g_norm_sq;
        r.g_contract_norm = g.g_contract_norm;
        r.fg_inner = g.fg_inner;
        r.fg_contract_norm = g.fg_contract_norm;
        const Psi p = psi(point, variant);
        r.psi1 = p.psi1;
        r.psi2 = p.psi2;
        r.psi3 = p.psi3;
    }

    const double expansion = c.log_T / (c.m * lambda) - 1.0 / (c.m * c.m * lambda);
    r.asymptotic_residuals.f1 = lambda * std::abs(2.0 * r.f_norm_sq - 1.0 - expansion);
    r.asymptotic_residuals.f2 = lambda * std::abs(b * b - 1.0 - 2.0 * expansion);
    r.asymptotic_residuals.f3 =
        std::sqrt(lambda) *
        std::abs(r.f_triple_inner - 3.0 / (4.0 * c.m * std::sqrt(lambda)));
    r.asymptotic_residuals.f4 =
        lambda * std::abs(r.f_contract_norm_sq - 5.0 / (4.0 * c.m * c.m * lambda));
    return r;
}

}  // namespace abridge::kernels
