#include "abridge/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "abridge/mc.hpp"
#include "abridge/mle.hpp"
#include "abridge/version.hpp"

namespace abridge::runner {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// One output row as ordered (key, value) pairs; doubles already formatted.
struct Row {
    std::vector<std::pair<std::string, json>> cells;
    void add(const std::string& key, double v) { cells.emplace_back(key, v); }
    void add(const std::string& key, std::uint64_t v) { cells.emplace_back(key, v); }
    void add(const std::string& key, const std::string& v) { cells.emplace_back(key, v); }
};

std::string to_csv(const std::vector<Row>& rows) {
    std::string out;
    if (rows.empty()) return out;
    for (std::size_t i = 0; i < rows[0].cells.size(); ++i) {
        if (i) out += ',';
        out += rows[0].cells[i].first;
    }
    out += '\n';
    for (const Row& r : rows) {
        for (std::size_t i = 0; i < r.cells.size(); ++i) {
            if (i) out += ',';
            const json& v = r.cells[i].second;
            if (v.is_number_float())
                out += fmt(v.get<double>());
            else if (v.is_string())
                out += v.get<std::string>();
            else
                out += v.dump();
        }
        out += '\n';
    }
    return out;
}

std::string to_json_doc(const std::vector<Row>& rows) {
    json arr = json::array();
    for (const Row& r : rows) {
        json obj = json::object();
        for (const auto& [k, v] : r.cells) obj[k] = v;
        arr.push_back(obj);
    }
    return arr.dump(2) + "\n";
}

double psi_max_at(const RunConfig& cfg, double k) {
    const BridgeParams params(cfg.alpha, cfg.T);
    try {
        const auto point = kernels::EvalPoint::from_k(params, k);
        const kernels::Psi p = kernels::psi(point, cfg.psi_variant);
        return std::max({p.psi1, p.psi2, p.psi3});
    } catch (const Error&) {
        return std::nan("");  // outside the Lemma-2 domain
    }
}

Row clt_row(const RunConfig& cfg, double k, const mc::CltReport& r) {
    Row row;
    row.add("alpha", cfg.alpha);
    row.add("T", cfg.T);
    row.add("k", k);
    row.add("t", r.t);
    row.add("lambda", r.lambda);
    row.add("n_paths", static_cast<std::uint64_t>(r.n_paths));
    row.add("grid_n", static_cast<std::uint64_t>(r.grid_n));
    row.add("d_hat", r.d_hat);
    row.add("dkw", r.dkw_halfwidth);
    row.add("rate_product", r.rate_product);
    row.add("mean", r.sample_moments.mean);
    row.add("var", r.sample_moments.variance);
    row.add("m3", r.sample_moments.m3);
    row.add("k4", r.sample_moments.k4);
    row.add("psi_max", psi_max_at(cfg, k));
    return row;
}

std::vector<Row> run_kernels(const RunConfig& cfg) {
    std::vector<Row> rows;
    const BridgeParams params(cfg.alpha, cfg.T);
    for (double k : cfg.k_list) {
        const auto point = kernels::EvalPoint::from_k(params, k);
        const auto rep = kernels::asymptotic_report(point, cfg.psi_variant, true);
        Row row;
        row.add("alpha", cfg.alpha);
        row.add("T", cfg.T);
        row.add("k", k);
        row.add("t", point.t());
        row.add("lambda", rep.lambda);
        row.add("b", rep.b);
        row.add("f_norm_sq", rep.f_norm_sq);
        row.add("f_triple_inner", rep.f_triple_inner);
        row.add("f_contract_norm_sq", rep.f_contract_norm_sq);
        row.add("a1", rep.a1);
        row.add("a2", rep.a2);
        row.add("g_norm_sq", rep.g_norm_sq);
        row.add("g_contract_norm", rep.g_contract_norm);
        row.add("fg_inner", rep.fg_inner);
        row.add("fg_contract_norm", rep.fg_contract_norm);
        row.add("psi1", rep.psi1);
        row.add("psi2", rep.psi2);
        row.add("psi3", rep.psi3);
        row.add("residual_f1", rep.asymptotic_residuals.f1);
        row.add("residual_f2", rep.asymptotic_residuals.f2);
        row.add("residual_f3", rep.asymptotic_residuals.f3);
        row.add("residual_f4", rep.asymptotic_residuals.f4);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<Row> run_simulate(const RunConfig& cfg) {
    const BridgeParams params(cfg.alpha, cfg.T);
    const TimeGrid grid =
        build_grid_ttm(cfg.T, std::exp(-cfg.k_list.front()), cfg.grid_n, cfg.grid_scheme);
    auto stream = rng::substream(cfg.seed, 0);
    const PathSample path = simulate_path(params, grid, stream);
    std::vector<Row> rows;
    rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Row row;
        row.add("index", static_cast<std::uint64_t>(i));
        row.add("t", path.grid.times[i]);
        row.add("ttm", path.grid.ttm[i]);
        row.add("w", path.w[i]);
        row.add("y", path.y[i]);
        row.add("x", path.x[i]);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<Row> run_estimate(const RunConfig& cfg) {
    const BridgeParams params(cfg.alpha, cfg.T);
    std::vector<Row> rows;
    std::size_t replica = 0;
    for (double k : cfg.k_list) {
        const TimeGrid grid =
            build_grid_ttm(cfg.T, std::exp(-k), cfg.grid_n, cfg.grid_scheme);
        auto stream = rng::substream(cfg.seed, replica++);
        const PathSample path = simulate_path(params, grid, stream);
        const MleEstimate est = mle_estimate(path, cfg.T);
        double std_stat = std::nan("");
        if (params.alpha > 0.5 && est.ttm_end < 1.0)
            std_stat = standardized_statistic(est, params);
        Row row;
        row.add("alpha", cfg.alpha);
        row.add("T", cfg.T);
        row.add("k", k);
        row.add("t", est.t_end);
        row.add("alpha_hat", est.alpha_hat);
        row.add("numerator", est.numerator);
        row.add("denominator", est.denominator);
        row.add("std_stat", std_stat);
        row.add("grid_n", static_cast<std::uint64_t>(cfg.grid_n));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<Row> run_clt_mode(const RunConfig& cfg) {
    const BridgeParams params(cfg.alpha, cfg.T);
    const mc::GridSpec gs{cfg.grid_n, cfg.grid_scheme};
    const double k = cfg.k_list.front();
    const auto rep = mc::clt_experiment_ttm(params, std::exp(-k), cfg.n_paths, gs,
                                            cfg.seed, cfg.workers, cfg.delta);
    return {clt_row(cfg, k, rep)};
}

std::vector<Row> run_rate(const RunConfig& cfg) {
    const BridgeParams params(cfg.alpha, cfg.T);
    const mc::GridSpec gs{cfg.grid_n, cfg.grid_scheme};
    const auto reps =
        mc::rate_scan(params, cfg.k_list, cfg.n_paths, gs, cfg.seed, cfg.workers, cfg.delta);
    std::vector<Row> rows;
    for (std::size_t i = 0; i < reps.size(); ++i)
        rows.push_back(clt_row(cfg, cfg.k_list[i], reps[i]));
    return rows;
}

std::vector<Row> run_regime(const RunConfig& cfg) {
    const BridgeParams params(cfg.alpha, cfg.T);
    const mc::GridSpec gs{cfg.grid_n, cfg.grid_scheme};
    const double k = cfg.k_list.front();
    const auto rep = mc::regime_check_ttm(params, std::exp(-k), cfg.n_paths, gs, cfg.seed,
                                          cfg.workers, cfg.delta);
    const char* name = rep.regime == mc::Regime::cauchy  ? "cauchy"
                       : rep.regime == mc::Regime::half  ? "half"
                                                         : "normal";
    Row row;
    row.add("alpha", cfg.alpha);
    row.add("T", cfg.T);
    row.add("k", k);
    row.add("t", cfg.T - std::exp(-k));
    row.add("regime", std::string(name));
    row.add("scaling", rep.scaling);
    row.add("median", rep.quantile_diagnostics.median);
    row.add("q1", rep.quantile_diagnostics.q1);
    row.add("q3", rep.quantile_diagnostics.q3);
    row.add("ks", rep.quantile_diagnostics.ks);
    row.add("n_paths", static_cast<std::uint64_t>(cfg.n_paths));
    row.add("grid_n", static_cast<std::uint64_t>(cfg.grid_n));
    return {row};
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    return static_cast<bool>(out);
}

}  // namespace

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::simulate: return "simulate";
        case Mode::estimate: return "estimate";
        case Mode::kernels: return "kernels";
        case Mode::clt: return "clt";
        case Mode::rate: return "rate";
        case Mode::regime: return "regime";
    }
    return "kernels";
}

Mode mode_from_string(const std::string& s) {
    static const std::map<std::string, Mode> table = {
        {"simulate", Mode::simulate}, {"estimate", Mode::estimate},
        {"kernels", Mode::kernels},   {"clt", Mode::clt},
        {"rate", Mode::rate},         {"regime", Mode::regime}};
    const auto it = table.find(s);
    if (it == table.end()) throw ConfigError("unknown mode: " + s);
    return it->second;
}

std::string RunConfig::resolved_out_path() const {
    if (!out_path.empty()) return out_path;
    return "abridge_" + to_string(mode) + "." + format;
}

void validate_config(const RunConfig& config) {
    if (!(config.alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (!(config.T > 0.0)) throw ConfigError("T must be positive");
    if (config.k_list.empty()) throw ConfigError("need at least one k value");
    for (double k : config.k_list)
        if (!(k > 0.0)) throw ConfigError("k values must be positive");
    if (config.n_paths < 1) throw ConfigError("paths must be >= 1");
    if (config.grid_n < 2) throw ConfigError("grid size must be >= 2");
    if (!(config.delta > 0.0 && config.delta < 1.0))
        throw ConfigError("delta must lie in (0, 1)");
    if (config.format != "csv" && config.format != "json")
        throw ConfigError("format must be csv or json");
    if ((config.mode == Mode::clt || config.mode == Mode::rate) && !(config.alpha > 0.5))
        throw ConfigError("modes clt and rate require alpha > 1/2");
}

std::string serialize_config(const RunConfig& c) {
    json j;
    j["mode"] = to_string(c.mode);
    j["alpha"] = c.alpha;
    j["T"] = c.T;
    j["k_list"] = c.k_list;
    j["n_paths"] = c.n_paths;
    j["grid_n"] = c.grid_n;
    j["grid_scheme"] = c.grid_scheme == GridScheme::geometric ? "geometric" : "uniform";
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["out_path"] = c.out_path;
    j["format"] = c.format;
    j["delta"] = c.delta;
    j["psi_variant"] =
        c.psi_variant == kernels::PsiVariant::printed ? "printed" : "squared";
    return j.dump(2) + "\n";
}

namespace {

RunConfig config_from_json_obj(const json& j, RunConfig base = {}) {
    RunConfig c = base;
    try {
        if (j.contains("mode")) c.mode = mode_from_string(j.at("mode").get<std::string>());
        if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
        if (j.contains("T")) c.T = j.at("T").get<double>();
        if (j.contains("k_list")) c.k_list = j.at("k_list").get<std::vector<double>>();
        if (j.contains("n_paths")) c.n_paths = j.at("n_paths").get<std::size_t>();
        if (j.contains("grid_n")) c.grid_n = j.at("grid_n").get<std::size_t>();
        if (j.contains("grid_scheme")) {
            const auto s = j.at("grid_scheme").get<std::string>();
            if (s == "geometric")
                c.grid_scheme = GridScheme::geometric;
            else if (s == "uniform")
                c.grid_scheme = GridScheme::uniform;
            else
                throw ConfigError("grid_scheme must be uniform or geometric");
        }
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("workers")) c.workers = j.at("workers").get<unsigned>();
        if (j.contains("out_path")) c.out_path = j.at("out_path").get<std::string>();
        if (j.contains("format")) c.format = j.at("format").get<std::string>();
        if (j.contains("delta")) c.delta = j.at("delta").get<double>();
        if (j.contains("psi_variant")) {
            const auto s = j.at("psi_variant").get<std::string>();
            if (s == "printed")
                c.psi_variant = kernels::PsiVariant::printed;
            else if (s == "squared")
                c.psi_variant = kernels::PsiVariant::squared;
            else
                throw ConfigError("psi_variant must be printed or squared");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config value: ") + e.what());
    }
    return c;
}

}  // namespace

RunConfig config_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json_obj(j);
}

RunConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"alpha-Brownian bridge MLE laboratory"};
    app.require_subcommand(0, 1);

    struct Flags {
        std::optional<double> alpha, T, delta;
        std::optional<std::vector<double>> k_list;
        std::optional<std::size_t> n_paths, grid_n;
        std::optional<std::uint64_t> seed;
        std::optional<unsigned> workers;
        std::optional<std::string> out_path, format, grid_scheme, psi_variant, config_path;
    } fl;

    std::vector<CLI::App*> subs;
    for (const char* name : {"simulate", "estimate", "kernels", "clt", "rate", "regime"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--alpha", fl.alpha, "drift exponent alpha");
        sub->add_option("--T", fl.T, "terminal time");
        sub->add_option("--k", fl.k_list, "horizon exponents, t = T - e^{-k}")
            ->delimiter(',');
        sub->add_option("--paths", fl.n_paths, "Monte Carlo replicas");
        sub->add_option("--grid-n", fl.grid_n, "grid points per path");
        sub->add_option("--grid-scheme", fl.grid_scheme, "uniform|geometric");
        sub->add_option("--seed", fl.seed, "RNG seed");
        sub->add_option("--workers", fl.workers, "worker threads (0 = all cores)");
        sub->add_option("--out", fl.out_path, "artifact path");
        sub->add_option("--format", fl.format, "csv|json");
        sub->add_option("--delta", fl.delta, "DKW confidence parameter");
        sub->add_option("--psi-variant", fl.psi_variant, "printed|squared");
        sub->add_option("--config", fl.config_path, "JSON config file");
        subs.push_back(sub);
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }
    if (app.get_subcommands().empty())
        throw ConfigError("no mode given; expected one of simulate|estimate|kernels|clt|rate|regime");

    RunConfig cfg;
    if (fl.config_path) {
        std::ifstream in(*fl.config_path);
        if (!in) throw ConfigError("cannot read config file: " + *fl.config_path);
        std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        cfg = config_from_json(text);
    }
    cfg.mode = mode_from_string(app.get_subcommands().front()->get_name());
    if (fl.alpha) cfg.alpha = *fl.alpha;
    if (fl.T) cfg.T = *fl.T;
    if (fl.k_list) cfg.k_list = *fl.k_list;
    if (fl.n_paths) cfg.n_paths = *fl.n_paths;
    if (fl.grid_n) cfg.grid_n = *fl.grid_n;
    if (fl.grid_scheme) {
        if (*fl.grid_scheme == "uniform")
            cfg.grid_scheme = GridScheme::uniform;
        else if (*fl.grid_scheme == "geometric")
            cfg.grid_scheme = GridScheme::geometric;
        else
            throw ConfigError("grid-scheme must be uniform or geometric");
    }
    if (fl.seed) cfg.seed = *fl.seed;
    if (fl.workers) cfg.workers = *fl.workers;
    if (fl.out_path) cfg.out_path = *fl.out_path;
    if (fl.format) cfg.format = *fl.format;
    if (fl.delta) cfg.delta = *fl.delta;
    if (fl.psi_variant) {
        if (*fl.psi_variant == "printed")
            cfg.psi_variant = kernels::PsiVariant::printed;
        else if (*fl.psi_variant == "squared")
            cfg.psi_variant = kernels::PsiVariant::squared;
        else
            throw ConfigError("psi-variant must be printed or squared");
    }
    validate_config(cfg);
    return cfg;
}

int run(const RunConfig& config) {
    validate_config(config);
    std::vector<Row> rows;
    switch (config.mode) {
        case Mode::simulate: rows = run_simulate(config); break;
        case Mode::estimate: rows = run_estimate(config); break;
        case Mode::kernels: rows = run_kernels(config); break;
        case Mode::clt: rows = run_clt_mode(config); break;
        case Mode::rate: rows = run_rate(config); break;
        case Mode::regime: rows = run_regime(config); break;
    }
    const std::string artifact =
        config.format == "csv" ? to_csv(rows) : to_json_doc(rows);
    const std::string out = config.resolved_out_path();
    if (!write_file(out, artifact)) {
        std::cerr << "abridge: cannot write artifact: " << out << "\n";
        return 1;
    }
    json manifest;
    manifest["config"] = json::parse(serialize_config(config));
    manifest["version"] = kVersion;
    manifest["seed"] = config.seed;
    if (!write_file(out + ".manifest.json", manifest.dump(2) + "\n")) {
        std::cerr << "abridge: cannot write manifest next to " << out << "\n";
        return 1;
    }
    return 0;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) {
        std::cerr << "usage: abridge <simulate|estimate|kernels|clt|rate|regime> [options]\n"
                     "options: --alpha --T --k k1,k2,... --paths --grid-n --grid-scheme\n"
                     "         --seed --workers --out --format --delta --psi-variant --config\n";
        return 2;
    }
    try {
        const RunConfig cfg = parse_config(args);
        return run(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "abridge: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "abridge: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace abridge::runner
