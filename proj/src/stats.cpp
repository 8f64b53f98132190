#include "abridge/stats.hpp"

#include <algorithm>
#include <cmath>

#include "abridge/errors.hpp"

namespace abridge::stats {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double kolmogorov_distance(std::span<const double> samples, double (*cdf)(double)) {
    if (samples.empty()) throw InvalidInput("kolmogorov_distance: empty sample");
    std::vector<double> x(samples.begin(), samples.end());
    for (double v : x)
        if (!std::isfinite(v)) throw InvalidInput("kolmogorov_distance: non-finite sample");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double F = cdf(x[i]);
        const double hi = static_cast<double>(i + 1) / n - F;
        const double lo = F - static_cast<double>(i) / n;
        d = std::max({d, std::abs(hi), std::abs(lo)});
    }
    return d;
}

double dkw_halfwidth(std::size_t n, double delta) {
    return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

double two_sample_ks(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InvalidInput("two_sample_ks: empty sample");
    std::vector<double> xa(a.begin(), a.end()), xb(b.begin(), b.end());
    std::sort(xa.begin(), xa.end());
    std::sort(xb.begin(), xb.end());
    const double na = static_cast<double>(xa.size());
    const double nb = static_cast<double>(xb.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < xa.size() && j < xb.size()) {
        if (xa[i] <= xb[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double quantile(std::span<const double> samples, double p) {
    if (samples.empty()) throw InvalidInput("quantile: empty sample");
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    if (x.size() == 1) return x[0];
    const double h = p * static_cast<double>(x.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, x.size() - 1);
    const double frac = h - std::floor(h);
    return x[lo] + frac * (x[hi] - x[lo]);
}

Moments sample_moments(std::span<const double> samples) {
    const double n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= n;
    double s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (double v : samples) {
        const double d = v - mean;
        const double d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }
    Moments m;
    m.mean = mean;
    m.variance = s2 / n;
    m.m3 = s3 / n;
    m.k4 = s4 / n - 3.0 * m.variance * m.variance;
    return m;
}

}  // namespace abridge::stats
