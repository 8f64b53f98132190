#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace abridge::stats {

/// Standard normal CDF via erfc; absolute error well below 1e-10.
double normal_cdf(double x);

/// Exact sup distance between the empirical CDF of `samples` and a reference
/// CDF, evaluated over the sorted sample: max_i max(|i/N - F(x_i)|,
/// |(i-1)/N - F(x_i)|).  Throws InvalidInput on empty or non-finite samples.
double kolmogorov_distance(std::span<const double> samples, double (*cdf)(double));

/// DKW half-width sqrt(log(2/delta) / (2 n)).
double dkw_halfwidth(std::size_t n, double delta);

/// Two-sample Kolmogorov-Smirnov sup distance.
double two_sample_ks(std::span<const double> a, std::span<const double> b);

/// Linear-interpolation quantile (the numpy default) of an unsorted sample.
double quantile(std::span<const double> samples, double p);

struct Moments {
    double mean;
    double variance;  // central, 1/N normalization
    double m3;        // third central moment
    double k4;        // fourth cumulant m4 - 3 variance^2
};
Moments sample_moments(std::span<const double> samples);

}  // namespace abridge::stats
