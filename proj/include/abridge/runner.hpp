#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "abridge/bridge.hpp"
#include "abridge/kernels.hpp"

namespace abridge::runner {

enum class Mode { simulate, estimate, kernels, clt, rate, regime };

struct RunConfig {
    Mode mode = Mode::kernels;
    double alpha = 1.0;
    double T = 1.0;
    std::vector<double> k_list = {4.0};  // t = T - e^{-k}
    std::size_t n_paths = 100000;
    std::size_t grid_n = 2000;
    GridScheme grid_scheme = GridScheme::geometric;
    std::uint64_t seed = 1;
    unsigned workers = 0;  // 0 = available parallelism
    std::string out_path;  // empty = abridge_<mode>.<format>
    std::string format = "csv";
    double delta = 0.01;
    kernels::PsiVariant psi_variant = kernels::PsiVariant::printed;

    std::string resolved_out_path() const;
};

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& s);

/// Parse CLI arguments (argv[0] excluded).  A --config JSON file supplies
/// base values; explicit flags override it.  Throws ConfigError on any
/// usage problem, including alpha <= 1/2 in clt/rate modes.
RunConfig parse_config(const std::vector<std::string>& args);

/// Round-trippable JSON form (flat object, same keys as the CLI flags).
std::string serialize_config(const RunConfig& config);
RunConfig config_from_json(const std::string& json_text);

/// Validate invariants shared by CLI and config-file paths.
void validate_config(const RunConfig& config);

/// Execute one run: writes the artifact and its manifest next to it.
/// Returns 0 on success, 1 on I/O failure.
int run(const RunConfig& config);

/// Full CLI entry: parse, run, map exceptions to exit codes (2 usage, 1 failure).
int cli_main(int argc, char** argv);

}  // namespace abridge::runner
