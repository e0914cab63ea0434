#include <CLI11.hpp>

#include "gputherm/errors.hpp"
#include "gputherm/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace gputherm;

namespace {

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

struct GenFlpArgs {
    int layer = 0;
    bool reduced_l2 = false;
    std::string out;
};

struct GenPtraceArgs {
    std::string report, mapping, flp0, flp2, out;
};

struct SolveArgs {
    std::string lcf, ptrace, out_dir;
    int grid = 64;
    bool do_transient = false;
    double dt = 1e-3;
    double ambient = 318.15;
    double r_convec = 0.1;
};

struct RenderArgs {
    std::string temps, flp, out;
    int layer = 2;
    int px = 8;
    double tmin = 0.0, tmax = 0.0;
    bool has_tmin = false, has_tmax = false;
};

struct FixtureArgs {
    std::string kernel, out, mapping_out;
    int size = 100;
    bool reduced_l2 = false;
};

struct PipelineArgs {
    std::string kernel, out_dir, config;
    int size = 100;
    bool reduced_l2 = false;
};

void cmd_gen_flp(const GenFlpArgs& a) {
    ChipSpec spec;
    spec.reduced_l2 = a.reduced_l2;
    const Floorplan fp = a.layer == 0 ? generate_layer0(spec) : generate_layer2(spec);
    write_file(a.out, serialize_flp(fp));
}

void cmd_gen_ptrace(const GenPtraceArgs& a) {
    if (!fs::exists(a.mapping)) throw MappingNotFound(a.mapping);
    const auto report = parse_power_report(read_file(a.report));
    const auto mapping = parse_mapping(read_file(a.mapping));
    const auto fp0 = read_flp_file(a.flp0);
    const auto fp2 = read_flp_file(a.flp2);
    const auto mapped = map_to_units(report, mapping, fp0, fp2);
    for (const auto& w : mapped.warnings) std::cerr << "warning: " << w << "\n";
    write_file(a.out, serialize_ptrace(mapped.trace));
}

void cmd_solve(const SolveArgs& a) {
    StackParams params;
    params.ambient_K = a.ambient;
    params.convection_resistance_K_per_W = a.r_convec;
    const LayerStack stack = load_stack(a.lcf, params);
    const PowerTrace trace = parse_ptrace(read_file(a.ptrace));
    const GridModel model = discretize(stack, a.grid, a.grid);

    fs::create_directories(a.out_dir);
    const fs::path out(a.out_dir);

    std::map<std::string, double> mean_powers;
    for (std::size_t i = 0; i < trace.unit_names.size(); ++i) {
        double sum = 0.0;
        for (const auto& row : trace.rows) sum += row[i];
        mean_powers[trace.unit_names[i]] =
            trace.rows.empty() ? 0.0 : sum / static_cast<double>(trace.rows.size());
    }
    const TemperatureField steady = steady_state(model, mean_powers);
    write_file((out / "temps.txt").string(), serialize_temperature_field(steady));
    export_unit_csv(aggregate_per_unit(steady, model, stack), (out / "units.csv").string());

    if (a.do_transient) {
        const auto fields = transient(model, trace, a.dt);
        for (std::size_t k = 0; k < fields.size(); ++k)
            write_file((out / ("temps_step" + std::to_string(k) + ".txt")).string(),
                       serialize_temperature_field(fields[k]));
    }
}

void cmd_render(const RenderArgs& a) {
    const TemperatureField field = parse_temperature_field(read_file(a.temps));
    ColorScale scale = ColorScale::auto_range(field, a.layer);
    if (a.has_tmin) scale.t_min_K = a.tmin;
    if (a.has_tmax) scale.t_max_K = a.tmax;
    if (!(scale.t_min_K < scale.t_max_K)) throw InvalidSpec("tmin must be below tmax");
    const Floorplan overlay = read_flp_file(a.flp);
    const HeatmapImage img = render_layer(field, a.layer, scale, a.px, &overlay);
    write_image(img, a.out);
}

void cmd_fixture(const FixtureArgs& a) {
    Scenario s;
    s.kernel = kernel_from_string(a.kernel);
    s.size = a.size;
    s.reduced_l2 = a.reduced_l2;
    write_file(a.out, serialize_power_report(fixture_report(s)));
    if (!a.mapping_out.empty()) {
        ChipSpec spec;
        spec.reduced_l2 = a.reduced_l2;
        write_file(a.mapping_out,
                   serialize_mapping(fixture_mapping(generate_layer0(spec), generate_layer2(spec))));
    }
}

void cmd_pipeline(const PipelineArgs& a) {
    Scenario s;
    s.kernel = kernel_from_string(a.kernel);
    s.size = a.size;
    s.reduced_l2 = a.reduced_l2;
    PipelineConfig cfg;
    if (!a.config.empty()) cfg = load_config(a.config, cfg);
    cfg.out_dir = a.out_dir;
    run_pipeline(s, cfg);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"GPU thermal-analysis toolchain: floorplan generation, power "
                 "traces, compact thermal solves and heat-map rendering"};
    app.require_subcommand(1);

    GenFlpArgs gf;
    auto* gen_flp = app.add_subcommand("gen-flp", "Generate a Fermi layer floorplan");
    gen_flp->add_option("--layer", gf.layer, "Powered layer index (0 or 2)")
        ->required()
        ->check(CLI::IsMember({0, 2}));
    gen_flp->add_flag("--reduced-l2", gf.reduced_l2, "Quarter-size L2 cache");
    gen_flp->add_option("--out", gf.out, "Output .flp path")->required();

    GenPtraceArgs gp;
    auto* gen_ptrace = app.add_subcommand("gen-ptrace", "Convert a power report to a .ptrace");
    gen_ptrace->add_option("--report", gp.report, "Power report file")->required();
    gen_ptrace->add_option("--mapping", gp.mapping, "Component mapping file")->required();
    gen_ptrace->add_option("--flp0", gp.flp0, "Layer0 floorplan")->required();
    gen_ptrace->add_option("--flp2", gp.flp2, "Layer2 floorplan")->required();
    gen_ptrace->add_option("--out", gp.out, "Output .ptrace path")->required();

    SolveArgs sv;
    auto* solve = app.add_subcommand("solve", "Solve the thermal model");
    solve->add_option("--lcf", sv.lcf, "Layer configuration file")->required();
    solve->add_option("--ptrace", sv.ptrace, "Power trace file")->required();
    solve->add_option("--grid", sv.grid, "Cells per axis")->check(CLI::Range(2, 4096));
    solve->add_flag("--transient", sv.do_transient, "Also run implicit time stepping");
    solve->add_option("--dt", sv.dt, "Transient step seconds")->check(CLI::PositiveNumber);
    solve->add_option("--ambient", sv.ambient, "Ambient Kelvin");
    solve->add_option("--convection-resistance", sv.r_convec, "Sink resistance K/W")
        ->check(CLI::PositiveNumber);
    solve->add_option("--out", sv.out_dir, "Output directory")->required();

    RenderArgs rd;
    auto* render = app.add_subcommand("render", "Render a heat map from a temperature dump");
    render->add_option("--temps", rd.temps, "Temperature dump file")->required();
    render->add_option("--flp", rd.flp, "Overlay floorplan")->required();
    render->add_option("--layer", rd.layer, "Layer to render")->check(CLI::Range(0, 3));
    auto* tmin_opt = render->add_option("--tmin", rd.tmin, "Fixed scale minimum Kelvin");
    auto* tmax_opt = render->add_option("--tmax", rd.tmax, "Fixed scale maximum Kelvin");
    render->add_option("--px", rd.px, "Pixels per cell")->check(CLI::Range(1, 64));
    render->add_option("--out", rd.out, "Output .ppm path")->required();

    FixtureArgs fx;
    auto* fixture = app.add_subcommand("fixture", "Emit a synthetic scenario power report");
    fixture->add_option("--kernel", fx.kernel, "matmul_linear|matmul_tiled|needleman_wunsch")
        ->required()
        ->check(CLI::IsMember({"matmul_linear", "matmul_tiled", "needleman_wunsch"}));
    fixture->add_option("--size", fx.size, "Tensor dimension N")->required()->check(CLI::PositiveNumber);
    fixture->add_flag("--reduced-l2", fx.reduced_l2, "Quarter-size L2 cache");
    fixture->add_option("--out", fx.out, "Output report path")->required();
    fixture->add_option("--mapping-out", fx.mapping_out, "Also write the matching mapping file");

    PipelineArgs pl;
    auto* pipeline = app.add_subcommand("pipeline", "Run the full flow into a bundle directory");
    pipeline->add_option("--kernel", pl.kernel, "matmul_linear|matmul_tiled|needleman_wunsch")
        ->required()
        ->check(CLI::IsMember({"matmul_linear", "matmul_tiled", "needleman_wunsch"}));
    pipeline->add_option("--size", pl.size, "Tensor dimension N")->required()->check(CLI::PositiveNumber);
    pipeline->add_flag("--reduced-l2", pl.reduced_l2, "Quarter-size L2 cache");
    pipeline->add_option("--config", pl.config, "Flat key=value config file");
    pipeline->add_option("--out", pl.out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    std::string stage = "?";
    try {
        if (*gen_flp) {
            stage = "gen-flp";
            cmd_gen_flp(gf);
        } else if (*gen_ptrace) {
            stage = "gen-ptrace";
            cmd_gen_ptrace(gp);
        } else if (*solve) {
            stage = "solve";
            cmd_solve(sv);
        } else if (*render) {
            stage = "render";
            rd.has_tmin = tmin_opt->count() > 0;
            rd.has_tmax = tmax_opt->count() > 0;
            cmd_render(rd);
        } else if (*fixture) {
            stage = "fixture";
            cmd_fixture(fx);
        } else if (*pipeline) {
            stage = "pipeline";
            cmd_pipeline(pl);
        }
    } catch (const Error& e) {
        std::cerr << "error stage=" << stage << " code=" << e.code() << " msg=\"" << e.what()
                  << "\"\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error stage=" << stage << " code=Internal msg=\"" << e.what() << "\"\n";
        return 1;
    }
    return 0;
}
