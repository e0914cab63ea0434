#ifndef GPUTHERM_FLOORPLAN_HPP
#define GPUTHERM_FLOORPLAN_HPP

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace gputherm {

// Geometric tolerances: bounds checks in meters, overlap checks in m^2.
inline constexpr double kBoundsTolM = 1e-12;
inline constexpr double kOverlapTolM2 = 1e-18;
inline constexpr double kCoverageTolM2 = 1e-15;

/// One named rectangle on a die layer. Voids are filler rectangles that
/// never receive power.
struct FloorplanUnit {
    std::string name;
    double width_m = 0.0;
    double height_m = 0.0;
    double left_m = 0.0;
    double bottom_m = 0.0;
    bool is_void = false;

    double right_m() const { return left_m + width_m; }
    double top_m() const { return bottom_m + height_m; }
    double area_m2() const { return width_m * height_m; }

    bool operator==(const FloorplanUnit&) const = default;
};

/// Area of the intersection of two units' rectangles (0 if disjoint).
double intersection_area_m2(const FloorplanUnit& a, const FloorplanUnit& b);

struct Floorplan {
    double chip_width_m = 0.023;
    double chip_height_m = 0.023;
    std::vector<FloorplanUnit> units;

    double chip_area_m2() const { return chip_width_m * chip_height_m; }
    const FloorplanUnit* find(const std::string& name) const;
    std::vector<std::string> nonvoid_names() const;
};

/// Parameters for the generated Fermi floorplans.
struct ChipSpec {
    double chip_width_m = 0.023;
    double chip_height_m = 0.023;
    int sm_count = 16;
    int dram_count = 6;
    bool reduced_l2 = false;
    // RF, EXE, L1SHM, SCHED, LDST fractions of the SM slot height, bottom to top.
    std::array<double, 5> sm_subunit_fractions{0.15, 0.45, 0.20, 0.10, 0.10};
};

/// Throws InvalidSpec on bad counts or fractions.
void check_spec(const ChipSpec& spec);

struct OverlapEntry {
    std::string unit_a;
    std::string unit_b;
    double area_m2;
};

struct ValidationReport {
    std::vector<OverlapEntry> overlaps;
    std::vector<std::string> out_of_bounds;
    std::vector<std::string> duplicate_names;
    double uncovered_area_m2 = 0.0;

    bool empty() const {
        return overlaps.empty() && out_of_bounds.empty() && duplicate_names.empty() &&
               uncovered_area_m2 <= kCoverageTolM2;
    }
};

/// DRAM edge columns plus the (optionally reduced) central L2, voids filled.
Floorplan generate_layer0(const ChipSpec& spec);

/// Two bands of SM slots, five stacked sub-units per slot, voids filled.
Floorplan generate_layer2(const ChipSpec& spec);

/// Reports overlaps, out-of-bounds units, duplicate names and uncovered area.
/// Problems are reported, never thrown.
ValidationReport validate(const Floorplan& fp);

/// Appends VOID<k> rectangles exactly covering the uncovered chip area.
/// Throws OverlapError if the input already has overlapping units.
Floorplan fill_voids(const Floorplan& fp);

/// HotSpot .flp: `<name> <width> <height> <left> <bottom>` per line.
Floorplan parse_flp(std::istream& in);
Floorplan parse_flp(const std::string& text);

/// Tab-separated, shortest round-trip decimals; parse(serialize(fp)) == fp.units.
std::string serialize_flp(const Floorplan& fp);

Floorplan read_flp_file(const std::string& path);
void write_flp_file(const Floorplan& fp, const std::string& path);

} // namespace gputherm

#endif
