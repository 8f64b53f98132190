#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "abridge/bridge.hpp"
#include "abridge/kernels.hpp"
#include "abridge/mc.hpp"
#include "abridge/mle.hpp"
#include "abridge/stats.hpp"
#include "abridge/version.hpp"

namespace py = pybind11;
using namespace abridge;

namespace {

GridScheme scheme_from_string(const std::string& s) {
    if (s == "uniform") return GridScheme::uniform;
    if (s == "geometric") return GridScheme::geometric;
    throw ConfigError("grid scheme must be 'uniform' or 'geometric'");
}

kernels::PsiVariant variant_from_string(const std::string& s) {
    if (s == "printed") return kernels::PsiVariant::printed;
    if (s == "squared") return kernels::PsiVariant::squared;
    throw ConfigError("psi variant must be 'printed' or 'squared'");
}

py::dict report_to_dict(const kernels::KernelReport& r) {
    py::dict d;
    d["lambda"] = r.lambda;
    d["b"] = r.b;
    d["f_norm_sq"] = r.f_norm_sq;
    d["f_triple_inner"] = r.f_triple_inner;
    d["f_contract_norm_sq"] = r.f_contract_norm_sq;
    d["a1"] = r.a1;
    d["a2"] = r.a2;
    d["g_norm_sq"] = r.g_norm_sq;
    d["g_contract_norm"] = r.g_contract_norm;
    d["fg_inner"] = r.fg_inner;
    d["fg_contract_norm"] = r.fg_contract_norm;
    d["psi1"] = r.psi1;
    d["psi2"] = r.psi2;
    d["psi3"] = r.psi3;
    py::dict res;
    res["f1"] = r.asymptotic_residuals.f1;
    res["f2"] = r.asymptotic_residuals.f2;
    res["f3"] = r.asymptotic_residuals.f3;
    res["f4"] = r.asymptotic_residuals.f4;
    d["asymptotic_residuals"] = res;
    return d;
}

py::dict clt_to_dict(const mc::CltReport& r) {
    py::dict d;
    d["t"] = r.t;
    d["ttm"] = r.ttm;
    d["lambda"] = r.lambda;
    d["n_paths"] = r.n_paths;
    d["grid_n"] = r.grid_n;
    d["d_hat"] = r.d_hat;
    d["dkw_halfwidth"] = r.dkw_halfwidth;
    d["rate_product"] = r.rate_product;
    py::dict m;
    m["mean"] = r.sample_moments.mean;
    m["variance"] = r.sample_moments.variance;
    m["m3"] = r.sample_moments.m3;
    m["k4"] = r.sample_moments.k4;
    d["sample_moments"] = m;
    return d;
}

}  // namespace

PYBIND11_MODULE(_abridge, m) {
    m.doc() = "Exact alpha-Brownian bridge simulation, drift MLE, and the "
              "second-chaos kernel quantities behind its CLT rate";
    m.attr("__version__") = kVersion;

    py::register_exception<Error>(m, "AbridgeError");

    py::class_<BridgeParams>(m, "BridgeParams")
        .def(py::init<double, double>(), py::arg("alpha"), py::arg("T"))
        .def_readonly("alpha", &BridgeParams::alpha)
        .def_readonly("T", &BridgeParams::T);

    py::class_<TimeGrid>(m, "TimeGrid")
        .def_readonly("times", &TimeGrid::times)
        .def_readonly("ttm", &TimeGrid::ttm)
        .def("__len__", &TimeGrid::size);

    py::class_<PathSample>(m, "PathSample")
        .def_readonly("grid", &PathSample::grid)
        .def_readonly("w", &PathSample::w)
        .def_readonly("y", &PathSample::y)
        .def_readonly("x", &PathSample::x);

    py::class_<StepCov>(m, "StepCov")
        .def_readonly("var_dw", &StepCov::var_dw)
        .def_readonly("var_dy", &StepCov::var_dy)
        .def_readonly("cov", &StepCov::cov);

    py::class_<MleEstimate>(m, "MleEstimate")
        .def_readonly("alpha_hat", &MleEstimate::alpha_hat)
        .def_readonly("numerator", &MleEstimate::numerator)
        .def_readonly("denominator", &MleEstimate::denominator)
        .def_readonly("t_end", &MleEstimate::t_end);

    py::class_<ErrorDecomposition>(m, "ErrorDecomposition")
        .def_readonly("chaos_numerator", &ErrorDecomposition::chaos_numerator)
        .def_readonly("chaos_denominator", &ErrorDecomposition::chaos_denominator);

    m.def(
        "build_grid",
        [](double T, double t_end, std::size_t n, const std::string& scheme) {
            return build_grid(T, t_end, n, scheme_from_string(scheme));
        },
        py::arg("T"), py::arg("t_end"), py::arg("n"), py::arg("scheme") = "geometric");
    m.def(
        "build_grid_k",
        [](double T, double k, std::size_t n, const std::string& scheme) {
            return build_grid_ttm(T, std::exp(-k), n, scheme_from_string(scheme));
        },
        py::arg("T"), py::arg("k"), py::arg("n"), py::arg("scheme") = "geometric",
        "Grid whose horizon is t = T - e^{-k}");
    m.def(
        "simulate_path",
        [](const BridgeParams& p, const TimeGrid& g, std::uint64_t seed) {
            return simulate_path(p, g, seed);
        },
        py::arg("params"), py::arg("grid"), py::arg("seed"));
    m.def("step_covariance", &step_covariance, py::arg("params"), py::arg("s"),
          py::arg("u"));
    m.def("marginal_variance", &marginal_variance, py::arg("params"), py::arg("t"));

    m.def("mle_estimate", &mle_estimate, py::arg("path"), py::arg("T"));
    m.def("standardized_statistic", &standardized_statistic, py::arg("estimate"),
          py::arg("params"));
    m.def("decompose_error", &decompose_error, py::arg("path"), py::arg("params"));

    m.def(
        "lambda_b",
        [](const BridgeParams& p, double k) {
            return kernels::lambda_b(kernels::EvalPoint::from_k(p, k));
        },
        py::arg("params"), py::arg("k"));
    m.def(
        "kernel_report",
        [](const BridgeParams& p, double k, const std::string& variant, bool include_g) {
            return report_to_dict(kernels::asymptotic_report(
                kernels::EvalPoint::from_k(p, k), variant_from_string(variant), include_g));
        },
        py::arg("params"), py::arg("k"), py::arg("psi_variant") = "printed",
        py::arg("include_g") = true);
    m.def(
        "psi",
        [](const BridgeParams& p, double k, const std::string& variant) {
            const auto v = kernels::psi(kernels::EvalPoint::from_k(p, k),
                                        variant_from_string(variant));
            return py::make_tuple(v.psi1, v.psi2, v.psi3);
        },
        py::arg("params"), py::arg("k"), py::arg("psi_variant") = "printed");

    m.def(
        "kolmogorov_distance",
        [](const std::vector<double>& samples, double delta) {
            return py::make_tuple(stats::kolmogorov_distance(samples, &stats::normal_cdf),
                                  stats::dkw_halfwidth(samples.size(), delta));
        },
        py::arg("samples"), py::arg("delta") = 0.01,
        "Exact sup distance of the empirical CDF to the standard normal, with "
        "the DKW half-width at delta");
    m.def("normal_cdf", &stats::normal_cdf, py::arg("x"));

    m.def(
        "clt_experiment",
        [](const BridgeParams& p, double k, std::size_t n_paths, std::size_t grid_n,
           const std::string& scheme, std::uint64_t seed, unsigned workers, double delta) {
            const mc::GridSpec gs{grid_n, scheme_from_string(scheme)};
            return clt_to_dict(
                mc::clt_experiment_ttm(p, std::exp(-k), n_paths, gs, seed, workers, delta));
        },
        py::arg("params"), py::arg("k"), py::arg("n_paths") = 10000,
        py::arg("grid_n") = 2000, py::arg("grid_scheme") = "geometric", py::arg("seed") = 1,
        py::arg("workers") = 0, py::arg("delta") = 0.01);
    m.def(
        "rate_scan",
        [](const BridgeParams& p, const std::vector<double>& ks, std::size_t n_paths,
           std::size_t grid_n, const std::string& scheme, std::uint64_t seed,
           unsigned workers, double delta) {
            const mc::GridSpec gs{grid_n, scheme_from_string(scheme)};
            py::list out;
            for (const auto& r : mc::rate_scan(p, ks, n_paths, gs, seed, workers, delta))
                out.append(clt_to_dict(r));
            return out;
        },
        py::arg("params"), py::arg("k_list"), py::arg("n_paths") = 10000,
        py::arg("grid_n") = 2000, py::arg("grid_scheme") = "geometric", py::arg("seed") = 1,
        py::arg("workers") = 0, py::arg("delta") = 0.01);
    m.def(
        "moment_check",
        [](const BridgeParams& p, double k, std::size_t n_paths, std::size_t grid_n,
           std::uint64_t seed, unsigned workers) {
            const mc::GridSpec gs{grid_n, GridScheme::geometric};
            const auto r =
                mc::moment_check(p, p.T - std::exp(-k), n_paths, seed, gs, workers);
            py::dict d;
            d["variance"] = r.sample.variance;
            d["m3"] = r.sample.m3;
            d["k4"] = r.sample.k4;
            d["target_variance"] = r.target_variance;
            d["target_m3"] = r.target_m3;
            d["target_k4"] = r.target_k4;
            d["z_variance"] = r.z_variance;
            d["z_m3"] = r.z_m3;
            d["z_k4"] = r.z_k4;
            return d;
        },
        py::arg("params"), py::arg("k"), py::arg("n_paths") = 10000,
        py::arg("grid_n") = 2000, py::arg("seed") = 1, py::arg("workers") = 0);
    m.def(
        "regime_check",
        [](const BridgeParams& p, double k, std::size_t n_paths, std::size_t grid_n,
           std::uint64_t seed, unsigned workers) {
            const mc::GridSpec gs{grid_n, GridScheme::geometric};
            const auto r =
                mc::regime_check_ttm(p, std::exp(-k), n_paths, gs, seed, workers);
            py::dict d;
            d["regime"] = r.regime == mc::Regime::cauchy ? "cauchy"
                          : r.regime == mc::Regime::half ? "half"
                                                         : "normal";
            d["scaling"] = r.scaling;
            d["median"] = r.quantile_diagnostics.median;
            d["q1"] = r.quantile_diagnostics.q1;
            d["q3"] = r.quantile_diagnostics.q3;
            d["ks"] = r.quantile_diagnostics.ks;
            return d;
        },
        py::arg("params"), py::arg("k"), py::arg("n_paths") = 10000,
        py::arg("grid_n") = 2000, py::arg("seed") = 1, py::arg("workers") = 0);
}
