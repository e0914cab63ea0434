#ifndef GPUTHERM_FIXTURE_HPP
#define GPUTHERM_FIXTURE_HPP

#include "gputherm/floorplan.hpp"
#include "gputherm/powertrace.hpp"

#include <string>

namespace gputherm {

enum class Kernel { MatmulLinear, MatmulTiled, NeedlemanWunsch };

Kernel kernel_from_string(const std::string& name);
std::string to_string(Kernel k);

struct Scenario {
    Kernel kernel = Kernel::MatmulLinear;
    int size = 100; // matrix is size x size, 4-byte elements
    bool reduced_l2 = false;
};

/// Deterministic synthetic power report. Components are named after the
/// floorplan units they load (SM<i>_EXE, DRAM_*, L2) so the companion
/// fixture_mapping routes them one-to-one.
PowerReport fixture_report(const Scenario& s);

/// Identity mapping for fixture_report components, built from the layer0
/// floorplan the scenario implies.
ComponentMapping fixture_mapping(const Floorplan& fp0, const Floorplan& fp2);

/// Name of the DRAM unit geometrically nearest the L2 unit (ties broken
/// toward larger x, then smaller y).
std::string nearest_dram_to_l2(const Floorplan& fp0);

} // namespace gputherm

#endif
