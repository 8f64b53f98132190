// Test-only integration oracles, kept independent of the closed-form chains
// they certify: plain nested quadrature of pointwise kernel values and a
// cumulative-Simpson iterated integrator for the 4-D ordered-simplex pieces.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "abridge/kernels.hpp"
#include "abridge/quadrature.hpp"
#include "abridge/rng.hpp"

namespace oracles {

using abridge::kernels::EvalPoint;
using abridge::kernels::KernelFn;
using abridge::kernels::KernelKind;

// --- nested Gauss-Kronrod on pointwise kernel values (s-space) --------------

/// 2 int_{u<v} w(tau_u, tau_v) du dv with tau = e^{-s}.
inline double nested2(const EvalPoint& pt,
                      const std::function<double(double, double)>& w) {
    const double s0 = -std::log(pt.params.T);
    const double s1 = pt.big_l();
    auto outer = [&](double sv) {
        const double tv = std::exp(-sv);
        auto inner = [&](double su) {
            const double tu = std::exp(-su);
            return w(tu, tv) * tu;
        };
        return abridge::quad::integrate_or_throw(inner, s0, sv, 1e-11, 1e-300) * tv;
    };
    return 2.0 * abridge::quad::integrate_or_throw(outer, s0, s1, 1e-10, 1e-300);
}

inline double f_norm_sq_oracle(const EvalPoint& pt) {
    const KernelFn f{KernelKind::f, pt};
    return nested2(pt, [&](double tu, double tv) {
        const double v = abridge::kernels::kernel_eval_ttm(f, tu, tv);
        return v * v;
    });
}

/// 6 int_{y1<y2<y3} f(y1,y2) f(y2,y3) f(y3,y1) dy.
inline double f_triple_oracle(const EvalPoint& pt) {
    const KernelFn f{KernelKind::f, pt};
    const double s0 = -std::log(pt.params.T);
    const double s1 = pt.big_l();
    auto lvl3 = [&](double s3) {
        const double t3 = std::exp(-s3);
        auto lvl2 = [&](double s2) {
            const double t2 = std::exp(-s2);
            auto lvl1 = [&](double s1v) {
                const double t1 = std::exp(-s1v);
                return abridge::kernels::kernel_eval_ttm(f, t1, t2) *
                       abridge::kernels::kernel_eval_ttm(f, t3, t1) * t1;
            };
            return abridge::quad::integrate_or_throw(lvl1, s0, s2, 1e-10, 1e-300) *
                   abridge::kernels::kernel_eval_ttm(f, t2, t3) * t2;
        };
        return abridge::quad::integrate_or_throw(lvl2, s0, s3, 1e-9, 1e-300) * t3;
    };
    return 6.0 * abridge::quad::integrate_or_throw(lvl3, s0, s1, 1e-8, 1e-300);
}

// --- cumulative Simpson iterated integrals (4-D simplex pieces) -------------

/// Cumulative integral of samples g on a uniform grid of step h (4th order).
inline std::vector<double> cumulative_simpson(const std::vector<double>& g, double h) {
    const std::size_t m = g.size() - 1;  // must be even
    std::vector<double> c(g.size(), 0.0);
    for (std::size_t i = 0; i + 2 <= m; i += 2) {
        c[i + 1] = c[i] + h / 12.0 * (5.0 * g[i] + 8.0 * g[i + 1] - g[i + 2]);
        c[i + 2] = c[i] + h / 3.0 * (g[i] + 4.0 * g[i + 1] + g[i + 2]);
    }
    return c;
}

/// Iterated ordered-simplex integral of product exps[0..3], exps[j] applied to
/// the j-th smallest coordinate, integrand e^{rate * s} per level in s-space.
inline double simplex4_exp(const std::vector<double>& rates, double s0, double s1,
                           std::size_t m) {
    const double h = (s1 - s0) / static_cast<double>(m);
    std::vector<double> level(m + 1);
    for (std::size_t j = 0; j <= m; ++j)
        level[j] = std::exp(rates[0] * (s0 + static_cast<double>(j) * h));
    std::vector<double> acc = cumulative_simpson(level, h);
    for (int lvl = 1; lvl < 4; ++lvl) {
        for (std::size_t j = 0; j <= m; ++j)
            acc[j] *= std::exp(rates[lvl] * (s0 + static_cast<double>(j) * h));
        acc = cumulative_simpson(acc, h);
    }
    return acc.back();
}

inline double simplex4_exp_converged(const std::vector<double>& rates, double s0,
                                     double s1, double rel_tol = 1e-7) {
    double prev = 0.0;
    bool have = false;
    for (std::size_t m = 2048; m <= 32768; m *= 2) {
        const double v = simplex4_exp(rates, s0, s1, m);
        if (have && std::abs(v - prev) <= rel_tol * std::max(std::abs(v), 1e-300))
            return v;
        prev = v;
        have = true;
    }
    throw std::runtime_error("simplex4_exp did not converge");
}

/// A1 from the raw ordered-simplex integrand, no closed-form inner chains:
/// (T-x1)^{-2a} (T-x2)^{-1} (T-x3)^{-1} (T-x4)^{2a-2} over x1<x2<x3<x4.
inline double a1_oracle(const EvalPoint& pt) {
    const double a = pt.params.alpha;
    const double m = 2.0 * a - 1.0;
    const double s0 = -std::log(pt.params.T);
    const double lam = pt.lambda();
    return simplex4_exp_converged({m, 0.0, 0.0, -m}, s0, pt.big_l()) / (lam * lam);
}

/// A2 raw integrand over x1<x3<x2<x4 (sorted exponents m, m, -m, -m), with the
/// 1/2 class weight.
inline double a2_oracle(const EvalPoint& pt) {
    const double a = pt.params.alpha;
    const double m = 2.0 * a - 1.0;
    const double s0 = -std::log(pt.params.T);
    const double lam = pt.lambda();
    return 0.5 * simplex4_exp_converged({m, m, -m, -m}, s0, pt.big_l()) / (lam * lam);
}

// --- Monte Carlo oracles in s-space ------------------------------------------

struct McEstimate {
    double value;
    double se;
};

/// MC of int_{[0,t]^2} w dv du by uniform sampling of (s_u, s_v).
inline McEstimate mc2(const EvalPoint& pt, const std::function<double(double, double)>& w,
                      std::size_t n, std::uint64_t seed) {
    const double s0 = -std::log(pt.params.T);
    const double s1 = pt.big_l();
    const double range = s1 - s0;
    auto g = abridge::rng::substream(seed, 0);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double su = s0 + range * g.uniform();
        const double sv = s0 + range * g.uniform();
        const double v = w(std::exp(-su), std::exp(-sv)) * std::exp(-su - sv);
        sum += v;
        sum2 += v * v;
    }
    const double nn = static_cast<double>(n);
    const double mean = sum / nn;
    const double var = sum2 / nn - mean * mean;
    const double vol = range * range;
    return {mean * vol, std::sqrt(var / nn) * vol};
}

/// MC of the cyclic integral k1(x1,x2) k2(x2,x3) k3(x3,x4) k4(x4,x1).
inline McEstimate mc_cyclic4(const EvalPoint& pt, KernelKind k1, KernelKind k2,
                             KernelKind k3, KernelKind k4, std::size_t n,
                             std::uint64_t seed) {
    const KernelFn f1{k1, pt}, f2{k2, pt}, f3{k3, pt}, f4{k4, pt};
    const double s0 = -std::log(pt.params.T);
    const double s1 = pt.big_l();
    const double range = s1 - s0;
    auto g = abridge::rng::substream(seed, 1);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s[4], tau[4];
        double jac = 1.0;
        for (int j = 0; j < 4; ++j) {
            s[j] = s0 + range * g.uniform();
            tau[j] = std::exp(-s[j]);
            jac *= tau[j];
        }
        using abridge::kernels::kernel_eval_ttm;
        const double v = kernel_eval_ttm(f1, tau[0], tau[1]) *
                         kernel_eval_ttm(f2, tau[1], tau[2]) *
                         kernel_eval_ttm(f3, tau[2], tau[3]) *
                         kernel_eval_ttm(f4, tau[3], tau[0]) * jac;
        sum += v;
        sum2 += v * v;
    }
    const double nn = static_cast<double>(n);
    const double mean = sum / nn;
    const double var = sum2 / nn - mean * mean;
    const double vol = range * range * range * range;
    return {mean * vol, std::sqrt(var / nn) * vol};
}

}  // namespace oracles
