#include <doctest.h>

#include <cmath>
#include <vector>

#include "abridge/rng.hpp"
#include "abridge/stats.hpp"

using namespace abridge;

namespace {

double normal_quantile(double p) {  // bisection on the CDF; test-only oracle
    double lo = -10.0, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (stats::normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("normal cdf values") {
    CHECK(stats::normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(stats::normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
    CHECK(stats::normal_cdf(-1.0) + stats::normal_cdf(1.0) ==
          doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("three-point Kolmogorov distance against the normal") {
    const std::vector<double> samples = {-1.0, 0.0, 1.0};
    const double d = stats::kolmogorov_distance(samples, &stats::normal_cdf);
    CHECK(d == doctest::Approx(0.17467808273520627).epsilon(1e-9));
}

TEST_CASE("stratified quantile placement is near-optimal") {
    const int n = 100;
    std::vector<double> samples(n);
    for (int i = 0; i < n; ++i)
        samples[i] = normal_quantile((i + 0.5) / n);
    const double d = stats::kolmogorov_distance(samples, &stats::normal_cdf);
    CHECK(d <= 0.5 / n + 1e-9);
}

TEST_CASE("empirical distance of true normal draws sits inside the DKW band") {
    const std::size_t n = 100000;
    std::vector<double> samples(n);
    auto g = rng::substream(17, 0);
    for (std::size_t i = 0; i < n; i += 2) {
        const auto z = rng::normal_pair(g);
        samples[i] = z.z1;
        if (i + 1 < n) samples[i + 1] = z.z2;
    }
    const double d = stats::kolmogorov_distance(samples, &stats::normal_cdf);
    CHECK(d <= stats::dkw_halfwidth(n, 0.01));  // ~0.00515
}

TEST_CASE("invalid samples are rejected") {
    CHECK_THROWS_AS(stats::kolmogorov_distance({}, &stats::normal_cdf), InvalidInput);
    const std::vector<double> bad = {0.0, std::nan("")};
    CHECK_THROWS_AS(stats::kolmogorov_distance(bad, &stats::normal_cdf), InvalidInput);
}

TEST_CASE("two-sample KS distance") {
    const std::vector<double> a = {1.0, 2.0, 3.0};
    CHECK(stats::two_sample_ks(a, a) == doctest::Approx(0.0));
    const std::vector<double> b = {11.0, 12.0, 13.0};
    CHECK(stats::two_sample_ks(a, b) == doctest::Approx(1.0));
    const std::vector<double> c = {1.5, 2.5, 3.5};
    CHECK(stats::two_sample_ks(a, c) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("interpolated quantiles") {
    const std::vector<double> x = {4.0, 1.0, 3.0, 2.0};
    CHECK(stats::quantile(x, 0.0) == doctest::Approx(1.0));
    CHECK(stats::quantile(x, 1.0) == doctest::Approx(4.0));
    CHECK(stats::quantile(x, 0.5) == doctest::Approx(2.5));
    CHECK(stats::quantile(x, 0.25) == doctest::Approx(1.75));
}

TEST_CASE("sample moments of a known triple") {
    const std::vector<double> x = {-1.0, 0.0, 1.0};
    const auto m = stats::sample_moments(x);
    CHECK(m.mean == doctest::Approx(0.0));
    CHECK(m.variance == doctest::Approx(2.0 / 3.0));
    CHECK(m.m3 == doctest::Approx(0.0));
    CHECK(m.k4 == doctest::Approx(2.0 / 3.0 - 3.0 * 4.0 / 9.0));
}
