#include "gputherm/pipeline.hpp"
#include "gputherm/errors.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace gputherm {

namespace fs = std::filesystem;

namespace {

std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path);
}

double to_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("config key " + key + ": bad numeric value " + s);
    }
}

bool to_bool(const std::string& s, const std::string& key) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ParseError("config key " + key + ": bad boolean value " + s);
}

} // namespace

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

PipelineConfig parse_config(const std::string& text, const PipelineConfig& base) {
    PipelineConfig cfg = base;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw ParseError("expected `key = value`: " + line, lineno);
            continue;
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ParseError("expected `key = value`: " + line, lineno);

        if (key == "nx")
            cfg.nx = static_cast<int>(to_double(value, key));
        else if (key == "ny")
            cfg.ny = static_cast<int>(to_double(value, key));
        else if (key == "grid")
            cfg.nx = cfg.ny = static_cast<int>(to_double(value, key));
        else if (key == "dt")
            cfg.dt_s = to_double(value, key);
        else if (key == "transient")
            cfg.transient = to_bool(value, key);
        else if (key == "mapping")
            cfg.mapping_file = value;
        else if (key == "report")
            cfg.report_file = value;
        else if (key == "tmin")
            cfg.t_min_K = to_double(value, key);
        else if (key == "tmax")
            cfg.t_max_K = to_double(value, key);
        else if (key == "px_per_cell")
            cfg.px_per_cell = static_cast<int>(to_double(value, key));
        else if (key == "ambient")
            cfg.stack.ambient_K = to_double(value, key);
        else if (key == "convection_resistance")
            cfg.stack.convection_resistance_K_per_W = to_double(value, key);
        else if (key == "silicon_thickness")
            cfg.stack.silicon_thickness_m = to_double(value, key);
        else if (key == "tim_thickness")
            cfg.stack.tim_thickness_m = to_double(value, key);
        else if (key == "out_dir")
            cfg.out_dir = value;
        else
            throw ParseError("unknown config key: " + key, lineno);
    }
    return cfg;
}

PipelineConfig load_config(const std::string& path, const PipelineConfig& base) {
    return parse_config(read_file(path), base);
}

PipelineResult run_pipeline(const Scenario& s, const PipelineConfig& cfg) {
    PipelineResult result;
    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);

    auto emit = [&](const std::string& name, const std::string& bytes) {
        const std::string path = (out / name).string();
        write_file(path, bytes);
        result.files.push_back(path);
        return path;
    };

    // floorplans
    ChipSpec spec;
    spec.reduced_l2 = s.reduced_l2;
    const Floorplan fp0 = generate_layer0(spec);
    const Floorplan fp2 = generate_layer2(spec);
    emit("layer0.flp", serialize_flp(fp0));
    emit("layer2.flp", serialize_flp(fp2));

    // stack + lcf
    const LayerStack stack = build_fermi_stack(fp0, fp2, cfg.stack);
    Floorplan tim_plan = stack.layers[1].floorplan;
    emit("tim.flp", serialize_flp(tim_plan));
    emit("stack.lcf",
         serialize_lcf(stack_descriptors(stack, {"layer0.flp", "tim.flp", "layer2.flp", "tim.flp"})));

    // power report -> ptrace
    PowerReport report;
    if (cfg.report_file)
        report = parse_power_report(read_file(*cfg.report_file));
    else
        report = fixture_report(s);

    ComponentMapping mapping;
    if (cfg.mapping_file) {
        if (!fs::exists(*cfg.mapping_file)) throw MappingNotFound(*cfg.mapping_file);
        mapping = parse_mapping(read_file(*cfg.mapping_file));
    } else {
        mapping = fixture_mapping(fp0, fp2);
    }
    const MapResult mapped = map_to_units(report, mapping, fp0, fp2);
    emit("power.ptrace", serialize_ptrace(mapped.trace));

    // solve
    const GridModel model = discretize(stack, cfg.nx, cfg.ny);
    std::map<std::string, double> mean_powers;
    for (std::size_t i = 0; i < mapped.trace.unit_names.size(); ++i) {
        double sum = 0.0;
        for (const auto& row : mapped.trace.rows) sum += row[i];
        mean_powers[mapped.trace.unit_names[i]] =
            mapped.trace.rows.empty() ? 0.0 : sum / static_cast<double>(mapped.trace.rows.size());
    }
    result.steady = steady_state(model, mean_powers);
    emit("temps.txt", serialize_temperature_field(result.steady));

    if (cfg.transient) {
        const auto fields = transient(model, mapped.trace, cfg.dt_s);
        for (std::size_t k = 0; k < fields.size(); ++k)
            emit("temps_step" + std::to_string(k) + ".txt",
                 serialize_temperature_field(fields[k]));
    }

    // render
    ColorScale scale = ColorScale::auto_range(result.steady, 2);
    if (cfg.t_min_K) scale.t_min_K = *cfg.t_min_K;
    if (cfg.t_max_K) scale.t_max_K = *cfg.t_max_K;
    if (!(scale.t_min_K < scale.t_max_K)) throw InvalidSpec("tmin must be below tmax");
    for (int layer = 0; layer < 4; ++layer) {
        const Floorplan* overlay = layer == 0 ? &fp0 : layer == 2 ? &fp2 : nullptr;
        const HeatmapImage img = render_layer(result.steady, layer, scale, cfg.px_per_cell, overlay);
        emit("layer" + std::to_string(layer) + ".ppm", encode_ppm(img));
    }

    result.aggregates = aggregate_per_unit(result.steady, model, stack);
    emit("units.csv", unit_csv(result.aggregates));

    // manifest: parameters, absolute input paths, content hashes of outputs
    std::string manifest;
    manifest += "version = " + std::string(kVersion) + "\n";
    manifest += "kernel = " + to_string(s.kernel) + "\n";
    manifest += "size = " + std::to_string(s.size) + "\n";
    manifest += "reduced_l2 = " + std::string(s.reduced_l2 ? "true" : "false") + "\n";
    manifest += "nx = " + std::to_string(cfg.nx) + "\n";
    manifest += "ny = " + std::to_string(cfg.ny) + "\n";
    manifest += "dt = " + fmt_double(cfg.dt_s) + "\n";
    manifest += "transient = " + std::string(cfg.transient ? "true" : "false") + "\n";
    manifest += "ambient = " + fmt_double(stack.ambient_K) + "\n";
    manifest +=
        "convection_resistance = " + fmt_double(stack.convection_resistance_K_per_W) + "\n";
    if (cfg.report_file)
        manifest += "input.report = " + fs::absolute(*cfg.report_file).string() + "\n";
    if (cfg.mapping_file)
        manifest += "input.mapping = " + fs::absolute(*cfg.mapping_file).string() + "\n";
    for (const auto& w : mapped.warnings) manifest += "warning = " + w + "\n";
    for (const auto& path : result.files)
        manifest += "hash." + fs::path(path).filename().string() + " = " +
                    fnv1a_hex(read_file(path)) + "\n";
    emit("run_manifest", manifest);
    return result;
}

} // namespace gputherm
