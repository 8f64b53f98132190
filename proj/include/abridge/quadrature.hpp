#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "abridge/errors.hpp"

namespace abridge::quad {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t panels = 0;
    bool converged = false;
};

namespace detail {

// 15-point Kronrod extension of 7-point Gauss on [-1, 1].
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
inline void gk15(F&& f, double a, double b, double& value, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double k15 = kWgk[7] * fc;
    double g7 = kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        const double fs = f(c - dx) + f(c + dx);
        k15 += kWgk[i] * fs;
        if (i % 2 == 1) g7 += kWg[i / 2] * fs;
    }
    value = k15 * h;
    const double diff = std::abs(k15 - g7) * std::abs(h);
    err = diff * std::sqrt(diff) * 200.0;  // quadpack-style sharpened estimate
    if (!(err < std::abs(value))) err = std::max(err, diff);
}

struct Panel {
    double a, b, value, err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

}  // namespace detail

/// Adaptive Gauss-Kronrod 7/15 over [a, b].  Splits the worst panel until the
/// accumulated error estimate meets rel_tol (or abs_tol).
template <class F>
QuadResult integrate(F&& f, double a, double b, double rel_tol = 1e-9,
                     double abs_tol = 0.0, std::size_t max_panels = 4000) {
    QuadResult res;
    if (a == b) {
        res.converged = true;
        return res;
    }
    std::vector<detail::Panel> heap;
    heap.reserve(256);
    detail::Panel p0{a, b, 0.0, 0.0};
    detail::gk15(f, a, b, p0.value, p0.err);
    heap.push_back(p0);
    double total = p0.value;
    double total_err = p0.err;
    while (heap.size() < max_panels) {
        if (total_err <= std::max(rel_tol * std::abs(total), abs_tol)) break;
        std::pop_heap(heap.begin(), heap.end());
        const detail::Panel worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {  // interval exhausted at double resolution
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end());
            break;
        }
        detail::Panel left{worst.a, mid, 0.0, 0.0};
        detail::Panel right{mid, worst.b, 0.0, 0.0};
        detail::gk15(f, left.a, left.b, left.value, left.err);
        detail::gk15(f, right.a, right.b, right.value, right.err);
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end());
    }
    // Re-accumulate to shed the incremental-update drift.
    total = 0.0;
    total_err = 0.0;
    for (const auto& p : heap) {
        total += p.value;
        total_err += p.err;
    }
    res.value = total;
    res.abs_error = total_err;
    res.panels = heap.size();
    res.converged = total_err <= std::max(rel_tol * std::abs(total), abs_tol) &&
                    std::isfinite(total);
    return res;
}

template <class F>
double integrate_or_throw(F&& f, double a, double b, double rel_tol = 1e-9,
                          double abs_tol = 0.0, std::size_t max_panels = 4000) {
    const QuadResult r = integrate(std::forward<F>(f), a, b, rel_tol, abs_tol, max_panels);
    if (!r.converged) {
        const double achieved = std::abs(r.value) > 0 ? r.abs_error / std::abs(r.value)
                                                      : r.abs_error;
        throw NumericalFailure("quadrature did not converge (achieved relative tolerance " +
                                   std::to_string(achieved) + ")",
                               achieved);
    }
    return r.value;
}

/// Integrate g over x in [x_lo, x_hi] under the substitution T - x = e^{-s},
/// which flattens (T-x)^{-1}-type growth near x = T.  The caller supplies the
/// integrand as a function of s; ds carries the Jacobian e^{-s} implicitly via
/// x(s) = T - e^{-s}, dx = e^{-s} ds.
template <class F>
double integrate_log_sub(F&& g_of_x, double T, double x_lo, double x_hi,
                         double rel_tol = 1e-9) {
    const double s_lo = -std::log(T - x_lo);
    const double s_hi = -std::log(T - x_hi);
    auto h = [&](double s) { return g_of_x(T - std::exp(-s)) * std::exp(-s); };
    return integrate_or_throw(h, s_lo, s_hi, rel_tol);
}

}  // namespace abridge::quad
