#ifndef GPUTHERM_STACK_HPP
#define GPUTHERM_STACK_HPP

#include "gputherm/floorplan.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gputherm {

struct MaterialProps {
    double volumetric_heat_capacity; // J/(m^3 K)
    double thermal_resistivity;      // (m K)/W
};

inline constexpr MaterialProps kSilicon{1.75e6, 0.01};
inline constexpr MaterialProps kTim{4.0e6, 0.25};

struct Layer {
    int index = 0; // 0-based from the bottom
    MaterialProps material{};
    double thickness_m = 0.0;
    bool has_power = false;
    bool has_lateral = true;
    Floorplan floorplan;
};

/// Bottom-to-top Si|TIM|Si|TIM stack. The lumped sink hangs off the top layer.
struct LayerStack {
    std::vector<Layer> layers;
    double ambient_K = 318.15;
    double convection_resistance_K_per_W = 0.1;

    double chip_width_m() const { return layers.at(0).floorplan.chip_width_m; }
    double chip_height_m() const { return layers.at(0).floorplan.chip_height_m; }
};

struct StackParams {
    std::optional<double> silicon_thickness_m;
    std::optional<double> tim_thickness_m;
    std::optional<MaterialProps> silicon;
    std::optional<MaterialProps> tim;
    std::optional<double> ambient_K;
    std::optional<double> convection_resistance_K_per_W;
};

/// Canonical 4-layer stack: powered silicon layers 0 and 2 carry the given
/// floorplans; TIM layers 1 and 3 get an auto-generated full-chip unit.
/// Throws MismatchedExtent when fp0 and fp2 chip extents differ.
LayerStack build_fermi_stack(const Floorplan& fp0, const Floorplan& fp2,
                             const StackParams& params = {});

/// One .lcf record: seven fields, one per non-comment line.
struct LayerDescriptor {
    int layer_number = 0;
    bool has_lateral = true;
    bool has_power = false;
    double volumetric_heat_capacity = 0.0;
    double thermal_resistivity = 0.0;
    double thickness_m = 0.0;
    std::string flp_path;

    bool operator==(const LayerDescriptor&) const = default;
};

std::vector<LayerDescriptor> parse_lcf(const std::string& text);
std::string serialize_lcf(const std::vector<LayerDescriptor>& layers);

std::vector<LayerDescriptor> stack_descriptors(const LayerStack& stack,
                                               const std::vector<std::string>& flp_paths);

/// Reads an .lcf file and the floorplans it references (paths resolved
/// relative to the .lcf's directory), then assembles a stack.
LayerStack load_stack(const std::string& lcf_path, const StackParams& params = {});

} // namespace gputherm

#endif
