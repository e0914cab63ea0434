#include "gputherm/thermal.hpp"
#include "gputherm/errors.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace gputherm {

namespace {

constexpr double kResidualTol = 1e-8;

std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

Eigen::SparseMatrix<double> assemble(const GridModel& model) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(model.total_cells()) * 7);
    for_each_matrix_entry(model, [&](int r, int c, double v) { trips.emplace_back(r, c, v); });
    Eigen::SparseMatrix<double> A(model.total_cells(), model.total_cells());
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
}

// Solves A x = b with a sparse Cholesky factorization plus iterative
// refinement until the relative residual contract is met.
Eigen::VectorXd solve_checked(const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>& solver,
                              const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b) {
    const double bnorm = b.norm();
    if (bnorm == 0.0) return Eigen::VectorXd::Zero(b.size());
    Eigen::VectorXd x = solver.solve(b);
    for (int iter = 0; iter < 5; ++iter) {
        const Eigen::VectorXd r = b - A * x;
        if (r.norm() / bnorm <= kResidualTol) return x;
        x += solver.solve(r);
    }
    const double rel = (b - A * x).norm() / bnorm;
    if (rel <= kResidualTol) return x;
    throw SolveFailure("residual contract unmet: relative residual " + fmt_double(rel));
}

} // namespace

GridModel discretize(const LayerStack& stack, int nx, int ny) {
    if (nx < 2 || ny < 2) throw InvalidGrid("nx and ny must be at least 2");
    if (stack.layers.size() != 4) throw InvalidSpec("stack must have 4 layers");

    GridModel model;
    model.nx = nx;
    model.ny = ny;
    model.n_layers = static_cast<int>(stack.layers.size());
    model.ambient_K = stack.ambient_K;

    const double W = stack.chip_width_m(), H = stack.chip_height_m();
    const double dx = W / nx, dy = H / ny;
    model.cell_area_m2 = dx * dy;

    for (const auto& l : stack.layers) {
        const double t = l.thickness_m, rho = l.material.thermal_resistivity;
        model.lateral_gx_W_per_K.push_back(l.has_lateral ? (t / rho) * (dy / dx) : 0.0);
        model.lateral_gy_W_per_K.push_back(l.has_lateral ? (t / rho) * (dx / dy) : 0.0);
        model.cell_capacity_J_per_K.push_back(l.material.volumetric_heat_capacity * t *
                                              model.cell_area_m2);
    }
    for (std::size_t i = 0; i + 1 < stack.layers.size(); ++i) {
        const auto& a = stack.layers[i];
        const auto& b = stack.layers[i + 1];
        const double r = a.material.thermal_resistivity * a.thickness_m / 2.0 +
                         b.material.thermal_resistivity * b.thickness_m / 2.0;
        model.vertical_g_W_per_K.push_back(model.cell_area_m2 / r);
    }
    model.sink_g_W_per_K =
        1.0 / (stack.convection_resistance_K_per_W * static_cast<double>(nx) * ny);

    for (int li = 0; li < model.n_layers; ++li) {
        const Layer& l = stack.layers[li];
        if (!l.has_power) continue;
        for (const auto& u : l.floorplan.units) {
            if (u.is_void) continue;
            auto& cells = model.power_injection_map[u.name];
            const int ix0 = std::clamp(static_cast<int>(std::floor(u.left_m / dx)), 0, nx - 1);
            const int ix1 = std::clamp(static_cast<int>(std::ceil(u.right_m() / dx)), 1, nx);
            const int iy0 = std::clamp(static_cast<int>(std::floor(u.bottom_m / dy)), 0, ny - 1);
            const int iy1 = std::clamp(static_cast<int>(std::ceil(u.top_m() / dy)), 1, ny);
            for (int iy = iy0; iy < iy1; ++iy) {
                for (int ix = ix0; ix < ix1; ++ix) {
                    const double ox = std::min(u.right_m(), (ix + 1) * dx) - std::max(u.left_m, ix * dx);
                    const double oy = std::min(u.top_m(), (iy + 1) * dy) - std::max(u.bottom_m, iy * dy);
                    if (ox <= 0.0 || oy <= 0.0) continue;
                    const double frac = (ox * oy) / u.area_m2();
                    cells.push_back({li, iy * nx + ix, frac});
                }
            }
            if (cells.empty()) throw InvalidGrid("unit " + u.name + " overlaps no cells");
        }
    }
    return model;
}

void for_each_matrix_entry(const GridModel& model,
                           const std::function<void(int, int, double)>& fn) {
    const int nx = model.nx, ny = model.ny, nl = model.n_layers;
    std::vector<double> diag(static_cast<std::size_t>(model.total_cells()), 0.0);
    auto link = [&](int a, int b, double g) {
        if (g <= 0.0) return;
        fn(a, b, -g);
        fn(b, a, -g);
        diag[a] += g;
        diag[b] += g;
    };
    for (int l = 0; l < nl; ++l) {
        for (int iy = 0; iy < ny; ++iy) {
            for (int ix = 0; ix < nx; ++ix) {
                const int me = model.global_index(l, ix, iy);
                if (ix + 1 < nx)
                    link(me, model.global_index(l, ix + 1, iy), model.lateral_gx_W_per_K[l]);
                if (iy + 1 < ny)
                    link(me, model.global_index(l, ix, iy + 1), model.lateral_gy_W_per_K[l]);
                if (l + 1 < nl)
                    link(me, model.global_index(l + 1, ix, iy), model.vertical_g_W_per_K[l]);
                if (l == nl - 1) diag[me] += model.sink_g_W_per_K;
            }
        }
    }
    for (int i = 0; i < model.total_cells(); ++i) fn(i, i, diag[i]);
}

std::vector<double> power_vector(const GridModel& model,
                                 const std::map<std::string, double>& unit_powers_W) {
    std::vector<double> b(static_cast<std::size_t>(model.total_cells()), 0.0);
    for (const auto& [unit, watts] : unit_powers_W) {
        auto it = model.power_injection_map.find(unit);
        if (it == model.power_injection_map.end()) throw UnknownUnit(unit);
        if (watts < 0.0) throw InvalidSpec("negative power for unit " + unit);
        for (const auto& cf : it->second)
            b[static_cast<std::size_t>(cf.layer) * model.nx * model.ny + cf.cell] +=
                watts * cf.fraction;
    }
    return b;
}

TemperatureField steady_state(const GridModel& model,
                              const std::map<std::string, double>& unit_powers_W) {
    const auto bvec = power_vector(model, unit_powers_W);
    const Eigen::SparseMatrix<double> A = assemble(model);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success) throw SolveFailure("factorization failed");

    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(bvec.data(), bvec.size());
    const Eigen::VectorXd dT = solve_checked(solver, A, b);

    TemperatureField field;
    field.nx = model.nx;
    field.ny = model.ny;
    field.n_layers = model.n_layers;
    field.values_K.resize(bvec.size());
    for (std::size_t i = 0; i < bvec.size(); ++i)
        field.values_K[i] = model.ambient_K + dT[static_cast<Eigen::Index>(i)];
    return field;
}

std::vector<TemperatureField> transient(const GridModel& model, const PowerTrace& trace,
                                        double dt_s, const TemperatureField* initial) {
    if (dt_s <= 0.0) throw InvalidSpec("dt must be positive");
    const int n = model.total_cells();
    if (initial && static_cast<int>(initial->values_K.size()) != n)
        throw DimensionMismatch("initial field size does not match model");

    Eigen::SparseMatrix<double> A = assemble(model);
    Eigen::VectorXd cap_over_dt(n);
    for (int l = 0; l < model.n_layers; ++l)
        for (int c = 0; c < model.cells_per_layer(); ++c)
            cap_over_dt[l * model.cells_per_layer() + c] = model.cell_capacity_J_per_K[l] / dt_s;
    Eigen::SparseMatrix<double> M = A;
    for (int i = 0; i < n; ++i) M.coeffRef(i, i) += cap_over_dt[i];
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(M);
    if (solver.info() != Eigen::Success) throw SolveFailure("factorization failed");

    Eigen::VectorXd dT = Eigen::VectorXd::Zero(n);
    if (initial)
        for (int i = 0; i < n; ++i) dT[i] = initial->values_K[i] - model.ambient_K;

    std::vector<TemperatureField> out;
    for (const auto& row : trace.rows) {
        std::map<std::string, double> powers;
        if (row.size() != trace.unit_names.size())
            throw RowLengthMismatch("trace row length does not match header");
        for (std::size_t i = 0; i < row.size(); ++i) powers[trace.unit_names[i]] = row[i];
        const auto bvec = power_vector(model, powers);
        Eigen::VectorXd rhs = cap_over_dt.cwiseProduct(dT) +
                              Eigen::Map<const Eigen::VectorXd>(bvec.data(), bvec.size());
        dT = solve_checked(solver, M, rhs);

        TemperatureField field;
        field.nx = model.nx;
        field.ny = model.ny;
        field.n_layers = model.n_layers;
        field.values_K.resize(n);
        for (int i = 0; i < n; ++i) field.values_K[i] = model.ambient_K + dT[i];
        out.push_back(std::move(field));
    }
    return out;
}

std::vector<UnitTemperature> aggregate_per_unit(const TemperatureField& field,
                                                const GridModel& model,
                                                const LayerStack& stack) {
    if (field.nx != model.nx || field.ny != model.ny || field.n_layers != model.n_layers)
        throw DimensionMismatch("field dimensions do not match model");

    const double W = stack.chip_width_m(), H = stack.chip_height_m();
    const double dx = W / model.nx, dy = H / model.ny;

    std::vector<UnitTemperature> out;
    for (int li = 0; li < model.n_layers; ++li) {
        for (const auto& u : stack.layers[li].floorplan.units) {
            if (u.is_void) continue;
            double wsum = 0.0, tsum = 0.0, tmax = -1.0;
            const int ix0 = std::clamp(static_cast<int>(std::floor(u.left_m / dx)), 0, model.nx - 1);
            const int ix1 = std::clamp(static_cast<int>(std::ceil(u.right_m() / dx)), 1, model.nx);
            const int iy0 = std::clamp(static_cast<int>(std::floor(u.bottom_m / dy)), 0, model.ny - 1);
            const int iy1 = std::clamp(static_cast<int>(std::ceil(u.top_m() / dy)), 1, model.ny);
            for (int iy = iy0; iy < iy1; ++iy) {
                for (int ix = ix0; ix < ix1; ++ix) {
                    const double ox = std::min(u.right_m(), (ix + 1) * dx) - std::max(u.left_m, ix * dx);
                    const double oy = std::min(u.top_m(), (iy + 1) * dy) - std::max(u.bottom_m, iy * dy);
                    if (ox <= 0.0 || oy <= 0.0) continue;
                    const double a = ox * oy;
                    const double T = field.at(li, ix, iy);
                    wsum += a;
                    tsum += a * T;
                    tmax = std::max(tmax, T);
                }
            }
            if (wsum <= 0.0) throw DimensionMismatch("unit " + u.name + " overlaps no cells");
            out.push_back({u.name, tsum / wsum, tmax});
        }
    }
    return out;
}

std::string serialize_temperature_field(const TemperatureField& field) {
    std::string out;
    for (int l = 0; l < field.n_layers; ++l)
        for (int iy = 0; iy < field.ny; ++iy)
            for (int ix = 0; ix < field.nx; ++ix)
                out += std::to_string(l) + " " + std::to_string(ix) + " " + std::to_string(iy) +
                       " " + fmt_double(field.at(l, ix, iy)) + "\n";
    return out;
}

TemperatureField parse_temperature_field(const std::string& text) {
    struct Entry {
        int l, ix, iy;
        double t;
    };
    std::vector<Entry> entries;
    int max_l = -1, max_ix = -1, max_iy = -1;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        Entry e;
        std::string first;
        if (!(ls >> first) || first[0] == '#') continue;
        try {
            e.l = std::stoi(first);
        } catch (const std::exception&) {
            throw ParseError("bad layer index: " + first, lineno);
        }
        if (!(ls >> e.ix >> e.iy >> e.t)) throw ParseError("expected 4 fields: " + line, lineno);
        if (e.l < 0 || e.ix < 0 || e.iy < 0) throw ParseError("negative index", lineno);
        entries.push_back(e);
        max_l = std::max(max_l, e.l);
        max_ix = std::max(max_ix, e.ix);
        max_iy = std::max(max_iy, e.iy);
    }
    if (entries.empty()) throw ParseError("empty temperature dump");
    TemperatureField field;
    field.n_layers = max_l + 1;
    field.nx = max_ix + 1;
    field.ny = max_iy + 1;
    field.values_K.assign(static_cast<std::size_t>(field.n_layers) * field.nx * field.ny, 0.0);
    if (entries.size() != field.values_K.size())
        throw ParseError("temperature dump is not a full grid");
    for (const auto& e : entries)
        field.values_K[static_cast<std::size_t>(e.l) * field.nx * field.ny +
                       static_cast<std::size_t>(e.iy) * field.nx + e.ix] = e.t;
    return field;
}

} // namespace gputherm
