#include "abridge/mc.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "abridge/kernels.hpp"
#include "abridge/mle.hpp"

namespace abridge::mc {

namespace detail {

PathSums run_replica(const StepCoeffs& coeffs, std::uint64_t seed, std::uint64_t index,
                     std::uint64_t domain) {
    auto stream = rng::substream(seed, index, domain);
    double y = 0.0, x_prev = 0.0;
    PathSums s{0.0, 0.0, 0.0};
    const std::size_t steps = coeffs.steps();
    for (std::size_t k = 0; k < steps; ++k) {
        const rng::NormalPair z = rng::normal_pair(stream);
        const double dw = coeffs.sd_w[k] * z.z1;
        y += coeffs.c_yw[k] * z.z1 + coeffs.sd_y_perp[k] * z.z2;
        const double x = coeffs.pow_alpha[k + 1] * y;
        const double w = x_prev * coeffs.inv_ttm[k];
        s.num_x += w * (x - x_prev);
        s.num_w += w * dw;
        s.den += w * x_prev * coeffs.inv_ttm[k] * coeffs.dt[k];
        x_prev = x;
    }
    return s;
}

void parallel_replicas(std::size_t n, unsigned workers,
                       const std::function<void(std::size_t)>& body) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = n * w / workers;
        const std::size_t hi = n * (w + 1) / workers;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail

namespace {

struct CltSamples {
    CltReport report;
    std::vector<double> stat;   // sqrt(lambda) (alpha - alpha_hat)
    std::vector<double> chaos;  // (1/sqrt(lambda)) sum X/(T-t) dW  ~ I_2(f_t)
};

CltSamples run_clt(const BridgeParams& params, double ttm, std::size_t n_paths,
                   const GridSpec& grid_spec, std::uint64_t seed, unsigned workers,
                   double delta) {
    if (!(params.alpha > 0.5)) throw RegimeError("clt_experiment: requires alpha > 1/2");
    if (n_paths == 0) throw InvalidInput("clt_experiment: need at least one path");
    const TimeGrid grid = build_grid_ttm(params.T, ttm, grid_spec.n, grid_spec.scheme);
    const StepCoeffs coeffs = StepCoeffs::build(params, grid);
    const double big_l = -std::log(ttm);
    if (!(big_l > 0.0)) throw InvalidWindow("clt_experiment: requires T - t < 1");
    const double lambda = big_l / (2.0 * params.alpha - 1.0);
    const double sqrt_lambda = std::sqrt(lambda);

    CltSamples out;
    out.stat.resize(n_paths);
    out.chaos.resize(n_paths);
    std::atomic<bool> bad{false};
    detail::parallel_replicas(n_paths, workers, [&](std::size_t i) {
        const detail::PathSums s = detail::run_replica(coeffs, seed, i);
        if (s.den == 0.0 || !std::isfinite(s.num_x) || !std::isfinite(s.num_w) ||
            !std::isfinite(s.den)) {
            bad.store(true, std::memory_order_relaxed);
            return;
        }
        out.stat[i] = sqrt_lambda * (params.alpha + s.num_x / s.den);  // alpha - alpha_hat
        out.chaos[i] = s.num_w / sqrt_lambda;
    });
    if (bad.load()) throw NumericalFailure("clt_experiment: non-finite replica");

    CltReport& r = out.report;
    r.ttm = ttm;
    r.t = params.T - ttm;
    r.lambda = lambda;
    r.n_paths = n_paths;
    r.grid_n = grid_spec.n;
    r.d_hat = stats::kolmogorov_distance(out.stat, &stats::normal_cdf);
    r.dkw_halfwidth = stats::dkw_halfwidth(n_paths, delta);
    r.rate_product = r.d_hat * std::sqrt(big_l);
    r.sample_moments = stats::sample_moments(out.chaos);
    return out;
}

}  // namespace

CltReport clt_experiment_ttm(const BridgeParams& params, double ttm, std::size_t n_paths,
                             const GridSpec& grid, std::uint64_t seed, unsigned workers,
                             double delta) {
    return run_clt(params, ttm, n_paths, grid, seed, workers, delta).report;
}

CltReport clt_experiment(const BridgeParams& params, double t, std::size_t n_paths,
                         const GridSpec& grid, std::uint64_t seed, unsigned workers,
                         double delta) {
    if (!(t < params.T)) throw InvalidWindow("clt_experiment: t must be below T");
    return clt_experiment_ttm(params, params.T - t, n_paths, grid, seed, workers, delta);
}

MomentCheck moment_check(const BridgeParams& params, double t, std::size_t n_paths,
                         std::uint64_t seed, const GridSpec& grid, unsigned workers) {
    if (!(t < params.T)) throw InvalidWindow("moment_check: t must be below T");
    const double ttm = params.T - t;
    const CltSamples s = run_clt(params, ttm, n_paths, grid, seed, workers, 0.01);

    const auto point = kernels::EvalPoint::from_ttm(params, ttm);
    const auto [lambda, b] = kernels::lambda_b(point);
    MomentCheck mc;
    mc.sample = s.report.sample_moments;
    mc.target_variance = b;  // E I_2(f)^2 = 2 ||f||^2 = b
    mc.target_m3 = 8.0 * kernels::f_triple_inner(point);
    mc.target_k4 = 48.0 * kernels::f_contract_norm_sq(point);

    // Batch standard errors of the moment estimators.
    const std::size_t n_batches = n_paths >= 1000 ? 100 : std::max<std::size_t>(2, n_paths / 10);
    std::vector<double> bv, bm3, bk4;
    bv.reserve(n_batches);
    bm3.reserve(n_batches);
    bk4.reserve(n_batches);
    for (std::size_t j = 0; j < n_batches; ++j) {
        const std::size_t lo = n_paths * j / n_batches;
        const std::size_t hi = n_paths * (j + 1) / n_batches;
        const auto m = stats::sample_moments(
            std::span<const double>(s.chaos.data() + lo, hi - lo));
        bv.push_back(m.variance);
        bm3.push_back(m.m3);
        bk4.push_back(m.k4);
    }
    auto batch_se = [n_batches](const std::vector<double>& xs) {
        double mean = 0.0;
        for (double v : xs) mean += v;
        mean /= static_cast<double>(xs.size());
        double var = 0.0;
        for (double v : xs) var += (v - mean) * (v - mean);
        var /= static_cast<double>(xs.size() - 1);
        return std::sqrt(var / static_cast<double>(n_batches));
    };
    mc.se_variance = batch_se(bv);
    mc.se_m3 = batch_se(bm3);
    mc.se_k4 = batch_se(bk4);
    mc.z_variance = (mc.sample.variance - mc.target_variance) / mc.se_variance;
    mc.z_m3 = (mc.sample.m3 - mc.target_m3) / mc.se_m3;
    mc.z_k4 = (mc.sample.k4 - mc.target_k4) / mc.se_k4;
    return mc;
}

std::vector<CltReport> rate_scan(const BridgeParams& params, const std::vector<double>& k_list,
                                 std::size_t n_paths, const GridSpec& grid,
                                 std::uint64_t seed, unsigned workers, double delta) {
    std::vector<CltReport> out;
    out.reserve(k_list.size());
    for (double k : k_list)
        out.push_back(
            clt_experiment_ttm(params, std::exp(-k), n_paths, grid, seed, workers, delta));
    return out;
}

RegimeReport regime_check_ttm(const BridgeParams& params, double ttm, std::size_t n_paths,
                              const GridSpec& grid_spec, std::uint64_t seed,
                              unsigned workers, double delta) {
    if (!(params.alpha > 0.0)) throw RegimeError("regime_check: requires alpha > 0");
    RegimeReport rep;
    rep.quantile_diagnostics.ks = std::nan("");

    if (params.alpha > 0.5) {
        rep.regime = Regime::normal;
        rep.scaling = 1.0;
        const CltSamples s = run_clt(params, ttm, n_paths, grid_spec, seed, workers, delta);
        rep.quantile_diagnostics.median = stats::quantile(s.stat, 0.5);
        rep.quantile_diagnostics.q1 = stats::quantile(s.stat, 0.25);
        rep.quantile_diagnostics.q3 = stats::quantile(s.stat, 0.75);
        rep.quantile_diagnostics.ks = s.report.d_hat;
        return rep;
    }

    const TimeGrid grid = build_grid_ttm(params.T, ttm, grid_spec.n, grid_spec.scheme);
    const StepCoeffs coeffs = StepCoeffs::build(params, grid);
    const double big_l = -std::log(ttm);
    std::vector<double> stat(n_paths);
    std::atomic<bool> bad{false};

    const bool is_half = std::abs(params.alpha - 0.5) < 1e-12;
    const double scale_exp = params.alpha - 0.5;
    const double prefactor =
        is_half ? big_l : std::exp(scale_exp * std::log(ttm));  // (T-t)^{alpha - 1/2}
    detail::parallel_replicas(n_paths, workers, [&](std::size_t i) {
        const detail::PathSums s = detail::run_replica(coeffs, seed, i);
        if (s.den == 0.0 || !std::isfinite(s.num_x) || !std::isfinite(s.den)) {
            bad.store(true, std::memory_order_relaxed);
            return;
        }
        stat[i] = prefactor * (params.alpha + s.num_x / s.den);
    });
    if (bad.load()) throw NumericalFailure("regime_check: non-finite replica");

    rep.quantile_diagnostics.median = stats::quantile(stat, 0.5);
    rep.quantile_diagnostics.q1 = stats::quantile(stat, 0.25);
    rep.quantile_diagnostics.q3 = stats::quantile(stat, 0.75);

    if (is_half) {
        rep.regime = Regime::half;
        rep.scaling = 1.0;
        // The limit law int_0^T W dW / int_0^T W^2 ds has no closed-form CDF;
        // simulate it by Euler sums on a fine uniform grid and compare two-sample.
        const std::size_t euler_n = 10000;
        const double dt = params.T / static_cast<double>(euler_n);
        const double sq_dt = std::sqrt(dt);
        std::vector<double> ref(n_paths);
        detail::parallel_replicas(n_paths, workers, [&](std::size_t i) {
            auto stream = rng::substream(seed, i, /*domain=*/1);
            double w = 0.0, num = 0.0, den = 0.0;
            for (std::size_t k = 0; k < euler_n; k += 2) {
                const rng::NormalPair z = rng::normal_pair(stream);
                double dw = sq_dt * z.z1;
                num += w * dw;
                den += w * w * dt;
                w += dw;
                dw = sq_dt * z.z2;
                num += w * dw;
                den += w * w * dt;
                w += dw;
            }
            ref[i] = num / den;
        });
        rep.quantile_diagnostics.ks = stats::two_sample_ks(stat, ref);
    } else {
        rep.regime = Regime::cauchy;
        // limit scale T^{alpha - 1/2} (1 - 2 alpha)
        rep.scaling = std::exp((params.alpha - 0.5) * std::log(params.T)) *
                      (1.0 - 2.0 * params.alpha);
    }
    return rep;
}

RegimeReport regime_check(const BridgeParams& params, double t, std::size_t n_paths,
                          const GridSpec& grid, std::uint64_t seed, unsigned workers,
                          double delta) {
    if (!(t < params.T)) throw InvalidWindow("regime_check: t must be below T");
    return regime_check_ttm(params, params.T - t, n_paths, grid, seed, workers, delta);
}

}  // namespace abridge::mc
