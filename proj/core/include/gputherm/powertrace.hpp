#ifndef GPUTHERM_POWERTRACE_HPP
#define GPUTHERM_POWERTRACE_HPP

#include "gputherm/floorplan.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gputherm {

struct ComponentPower {
    std::string component;
    double min_W = 0.0;
    double avg_W = 0.0;
    double max_W = 0.0;

    bool operator==(const ComponentPower&) const = default;
};

struct PowerReport {
    std::vector<ComponentPower> entries;

    bool operator==(const PowerReport&) const = default;
};

/// `<component> = <min> <avg> <max>` lines, or grouped
/// `gpu_min_<C> = x` / `gpu_avg_<C> = x` / `gpu_max_<C> = x` triples.
PowerReport parse_power_report(const std::string& text);
std::string serialize_power_report(const PowerReport& report);

/// [min, v, avg, v, max] with v = (4*avg - min - max)/2; the 5-sample mean is
/// exactly avg. When v would be negative it is clamped to 0 and
/// mean_preserved is false.
struct ExpandedSamples {
    std::array<double, 5> values;
    bool mean_preserved = true;
};
ExpandedSamples expand_samples(double min_W, double avg_W, double max_W);

/// Where a component's power lands on the floorplans.
struct MappingTarget {
    enum class Kind { Unit, PerSm, Weighted } kind = Kind::Unit;
    std::string unit;                                        // Kind::Unit
    std::string sm_kind;                                     // Kind::PerSm (RF/EXE/...)
    std::vector<std::pair<std::string, double>> weights;     // Kind::Weighted
};

struct ComponentMapping {
    std::map<std::string, MappingTarget> rules;
    // Unmapped components fall through to this target; when absent, mapping
    // an unknown component throws UnknownComponent.
    std::optional<MappingTarget> default_target =
        MappingTarget{MappingTarget::Kind::PerSm, "", "EXE", {}};
};

/// Built-in table for common GPGPU-Sim power-model component keys.
ComponentMapping default_mapping(const Floorplan& fp0);

/// Mapping-file format: `<component> -> <target>` lines, target one of
/// `unit:<name>`, `sm:<KIND>`, `split:<name>=<w>,<name>=<w>,...`.
ComponentMapping parse_mapping(const std::string& text);
std::string serialize_mapping(const ComponentMapping& mapping);

struct PowerTrace {
    std::vector<std::string> unit_names;
    std::vector<std::vector<double>> rows;

    bool operator==(const PowerTrace&) const = default;
};

struct MapResult {
    PowerTrace trace;
    std::vector<std::string> warnings;
};

/// Expands every report entry to 5 samples and distributes them onto the
/// non-void units of fp0 then fp2 per the mapping rules.
MapResult map_to_units(const PowerReport& report, const ComponentMapping& mapping,
                       const Floorplan& fp0, const Floorplan& fp2);

/// First line: tab-separated unit names; then one tab-separated row per sample.
std::string serialize_ptrace(const PowerTrace& trace);
PowerTrace parse_ptrace(const std::string& text);

} // namespace gputherm

#endif
