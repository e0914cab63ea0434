#ifndef GPUTHERM_THERMAL_HPP
#define GPUTHERM_THERMAL_HPP

#include "gputherm/powertrace.hpp"
#include "gputherm/stack.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace gputherm {

/// Discretized conductance/capacitance network for a 4-layer stack.
/// Cell index within a layer: iy * nx + ix; global index: layer * nx * ny + cell.
struct GridModel {
    int nx = 0;
    int ny = 0;
    int n_layers = 4;
    double cell_area_m2 = 0.0;
    double ambient_K = 318.15;

    // Uniform grids: one lateral conductance pair per layer, one vertical
    // conductance per interface, one sink conductance per top-layer cell.
    std::vector<double> lateral_gx_W_per_K; // per layer, x-neighbor link
    std::vector<double> lateral_gy_W_per_K; // per layer, y-neighbor link
    std::vector<double> vertical_g_W_per_K; // per interface (n_layers - 1)
    double sink_g_W_per_K = 0.0;            // per top-layer cell
    std::vector<double> cell_capacity_J_per_K; // per layer

    struct CellFraction {
        int layer;
        int cell;
        double fraction;
    };
    std::map<std::string, std::vector<CellFraction>> power_injection_map;

    int cells_per_layer() const { return nx * ny; }
    int total_cells() const { return n_layers * nx * ny; }
    int global_index(int layer, int ix, int iy) const {
        return layer * nx * ny + iy * nx + ix;
    }
};

struct TemperatureField {
    int nx = 0;
    int ny = 0;
    int n_layers = 4;
    std::vector<double> values_K; // layer-major

    double at(int layer, int ix, int iy) const {
        return values_K[static_cast<std::size_t>(layer) * nx * ny + static_cast<std::size_t>(iy) * nx + ix];
    }
};

/// Cell-centered finite-volume discretization of the stack; nx, ny >= 2.
GridModel discretize(const LayerStack& stack, int nx, int ny);

/// Solves the steady heat balance; relative residual <= 1e-8 guaranteed.
TemperatureField steady_state(const GridModel& model,
                              const std::map<std::string, double>& unit_powers_W);

/// Implicit first-order time stepping, one output field per trace row.
std::vector<TemperatureField> transient(const GridModel& model, const PowerTrace& trace,
                                        double dt_s,
                                        const TemperatureField* initial = nullptr);

struct UnitTemperature {
    std::string unit;
    double mean_K = 0.0;
    double max_K = 0.0;
};

/// Area-weighted mean and max per non-void unit, layer order then unit order.
std::vector<UnitTemperature> aggregate_per_unit(const TemperatureField& field,
                                                const GridModel& model,
                                                const LayerStack& stack);

/// `<layer> <ix> <iy> <kelvin>` per line.
std::string serialize_temperature_field(const TemperatureField& field);
TemperatureField parse_temperature_field(const std::string& text);

/// Matrix access for independent verification: calls fn(row, col, value) for
/// every nonzero of the steady-state conductance matrix (including sink
/// diagonal terms).
void for_each_matrix_entry(const GridModel& model,
                           const std::function<void(int, int, double)>& fn);

/// Power vector b with b[cell] = sum of injected unit power shares.
std::vector<double> power_vector(const GridModel& model,
                                 const std::map<std::string, double>& unit_powers_W);

} // namespace gputherm

#endif
