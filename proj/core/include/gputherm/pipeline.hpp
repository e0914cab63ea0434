#ifndef GPUTHERM_PIPELINE_HPP
#define GPUTHERM_PIPELINE_HPP

#include "gputherm/fixture.hpp"
#include "gputherm/render.hpp"
#include "gputherm/stack.hpp"
#include "gputherm/thermal.hpp"

#include <optional>
#include <string>

namespace gputherm {

inline constexpr const char* kVersion = "0.1.0";

struct PipelineConfig {
    int nx = 64;
    int ny = 64;
    double dt_s = 1e-3;
    bool transient = false;
    std::optional<std::string> mapping_file;
    std::optional<std::string> report_file;
    std::optional<double> t_min_K;
    std::optional<double> t_max_K;
    int px_per_cell = 8;
    StackParams stack;
    std::string out_dir = ".";
};

/// Flat `key = value` text (`#` comments). Unknown keys are an error.
PipelineConfig parse_config(const std::string& text, const PipelineConfig& base = {});
PipelineConfig load_config(const std::string& path, const PipelineConfig& base = {});

struct PipelineResult {
    std::vector<std::string> files; // paths written, in order
    std::vector<UnitTemperature> aggregates;
    TemperatureField steady;
};

/// gen-flp -> gen-ptrace -> discretize -> steady_state [-> transient]
/// -> render all layers + per-unit CSV + manifest, all under cfg.out_dir.
PipelineResult run_pipeline(const Scenario& s, const PipelineConfig& cfg);

/// FNV-1a 64-bit, hex encoded; used for manifest content hashes.
std::string fnv1a_hex(const std::string& bytes);

} // namespace gputherm

#endif
