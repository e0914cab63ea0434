#include "gputherm/stack.hpp"
#include "gputherm/errors.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace gputherm {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

Floorplan full_chip_plan(double w, double h, const std::string& name) {
    Floorplan fp;
    fp.chip_width_m = w;
    fp.chip_height_m = h;
    fp.units.push_back({name, w, h, 0.0, 0.0, false});
    return fp;
}

void check_four_layers(const LayerStack& stack) {
    if (stack.layers.size() != 4) throw InvalidSpec("stack must have exactly 4 layers");
    for (int i = 0; i < 4; ++i) {
        const bool want_power = i % 2 == 0;
        if (stack.layers[i].has_power != want_power)
            throw InvalidSpec("layer " + std::to_string(i) + " power flag must be " +
                              (want_power ? "Y" : "N"));
    }
}

} // namespace

LayerStack build_fermi_stack(const Floorplan& fp0, const Floorplan& fp2,
                             const StackParams& params) {
    if (std::abs(fp0.chip_width_m - fp2.chip_width_m) > kBoundsTolM ||
        std::abs(fp0.chip_height_m - fp2.chip_height_m) > kBoundsTolM)
        throw MismatchedExtent("layer0 and layer2 floorplans have different chip extents");

    const MaterialProps si = params.silicon.value_or(kSilicon);
    const MaterialProps tim = params.tim.value_or(kTim);
    const double t_si = params.silicon_thickness_m.value_or(1.5e-4);
    const double t_tim = params.tim_thickness_m.value_or(2.0e-5);
    if (t_si <= 0.0 || t_tim <= 0.0) throw InvalidSpec("layer thickness must be positive");
    if (si.volumetric_heat_capacity <= 0.0 || si.thermal_resistivity <= 0.0 ||
        tim.volumetric_heat_capacity <= 0.0 || tim.thermal_resistivity <= 0.0)
        throw InvalidSpec("material constants must be positive");

    LayerStack stack;
    stack.ambient_K = params.ambient_K.value_or(318.15);
    stack.convection_resistance_K_per_W = params.convection_resistance_K_per_W.value_or(0.1);
    if (stack.convection_resistance_K_per_W <= 0.0)
        throw InvalidSpec("convection resistance must be positive");

    const double w = fp0.chip_width_m, h = fp0.chip_height_m;
    stack.layers.push_back({0, si, t_si, true, true, fp0});
    stack.layers.push_back({1, tim, t_tim, false, true, full_chip_plan(w, h, "TIM0")});
    stack.layers.push_back({2, si, t_si, true, true, fp2});
    stack.layers.push_back({3, tim, t_tim, false, true, full_chip_plan(w, h, "TIM1")});
    check_four_layers(stack);
    return stack;
}

std::vector<LayerDescriptor> parse_lcf(const std::string& text) {
    std::vector<std::string> fields;
    std::vector<std::size_t> field_lines;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto last = line.find_last_not_of(" \t\r");
        fields.push_back(line.substr(first, last - first + 1));
        field_lines.push_back(lineno);
    }
    if (fields.size() % 7 != 0)
        throw ParseError("lcf field count " + std::to_string(fields.size()) +
                         " is not a multiple of 7");

    auto parse_num = [&](const std::string& s, std::size_t ln, bool positive) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
            if (positive && v <= 0.0) throw ParseError("expected positive value: " + s, ln);
            return v;
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError("bad numeric field: " + s, ln);
        }
    };
    auto parse_flag = [&](const std::string& s, std::size_t ln) {
        if (s == "Y" || s == "y") return true;
        if (s == "N" || s == "n") return false;
        throw ParseError("expected Y or N, got: " + s, ln);
    };

    std::vector<LayerDescriptor> out;
    for (std::size_t i = 0; i + 6 < fields.size(); i += 7) {
        LayerDescriptor d;
        d.layer_number = static_cast<int>(parse_num(fields[i], field_lines[i], false));
        d.has_lateral = parse_flag(fields[i + 1], field_lines[i + 1]);
        d.has_power = parse_flag(fields[i + 2], field_lines[i + 2]);
        d.volumetric_heat_capacity = parse_num(fields[i + 3], field_lines[i + 3], true);
        d.thermal_resistivity = parse_num(fields[i + 4], field_lines[i + 4], true);
        d.thickness_m = parse_num(fields[i + 5], field_lines[i + 5], true);
        d.flp_path = fields[i + 6];
        out.push_back(std::move(d));
    }
    return out;
}

std::string serialize_lcf(const std::vector<LayerDescriptor>& layers) {
    std::string out;
    for (const auto& d : layers) {
        out += "# layer " + std::to_string(d.layer_number) + "\n";
        out += std::to_string(d.layer_number) + "\n";
        out += std::string(d.has_lateral ? "Y" : "N") + "\n";
        out += std::string(d.has_power ? "Y" : "N") + "\n";
        out += fmt_double(d.volumetric_heat_capacity) + "\n";
        out += fmt_double(d.thermal_resistivity) + "\n";
        out += fmt_double(d.thickness_m) + "\n";
        out += d.flp_path + "\n";
    }
    return out;
}

std::vector<LayerDescriptor> stack_descriptors(const LayerStack& stack,
                                               const std::vector<std::string>& flp_paths) {
    if (flp_paths.size() != stack.layers.size())
        throw InvalidSpec("need one floorplan path per layer");
    std::vector<LayerDescriptor> out;
    for (std::size_t i = 0; i < stack.layers.size(); ++i) {
        const Layer& l = stack.layers[i];
        out.push_back({l.index, l.has_lateral, l.has_power, l.material.volumetric_heat_capacity,
                       l.material.thermal_resistivity, l.thickness_m, flp_paths[i]});
    }
    return out;
}

LayerStack load_stack(const std::string& lcf_path, const StackParams& params) {
    std::ifstream in(lcf_path);
    if (!in) throw IoError("cannot open " + lcf_path);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto descriptors = parse_lcf(buf.str());
    if (descriptors.size() != 4)
        throw InvalidSpec("expected 4 lcf records, got " + std::to_string(descriptors.size()));

    const auto base = std::filesystem::path(lcf_path).parent_path();
    LayerStack stack;
    stack.ambient_K = params.ambient_K.value_or(318.15);
    stack.convection_resistance_K_per_W = params.convection_resistance_K_per_W.value_or(0.1);
    for (const auto& d : descriptors) {
        std::filesystem::path p(d.flp_path);
        if (p.is_relative()) p = base / p;
        Layer l;
        l.index = d.layer_number;
        l.material = {d.volumetric_heat_capacity, d.thermal_resistivity};
        l.thickness_m = d.thickness_m;
        l.has_power = d.has_power;
        l.has_lateral = d.has_lateral;
        l.floorplan = read_flp_file(p.string());
        stack.layers.push_back(std::move(l));
    }
    check_four_layers(stack);
    for (const auto& l : stack.layers) {
        if (std::abs(l.floorplan.chip_width_m - stack.chip_width_m()) > kBoundsTolM ||
            std::abs(l.floorplan.chip_height_m - stack.chip_height_m()) > kBoundsTolM)
            throw MismatchedExtent("layer floorplans have differing chip extents");
    }
    return stack;
}

} // namespace gputherm
