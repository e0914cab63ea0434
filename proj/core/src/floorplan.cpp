#include "gputherm/floorplan.hpp"
#include "gputherm/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

namespace gputherm {

namespace {

// Shortest decimal that round-trips the double exactly.
std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Coordinate list with near-duplicates (within kBoundsTolM) collapsed.
std::vector<double> snapped_coords(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    std::vector<double> out;
    for (double x : xs) {
        if (out.empty() || x - out.back() > kBoundsTolM) out.push_back(x);
    }
    return out;
}

bool covers_point(const FloorplanUnit& u, double x, double y) {
    return x > u.left_m - kBoundsTolM && x < u.right_m() + kBoundsTolM &&
           y > u.bottom_m - kBoundsTolM && y < u.top_m() + kBoundsTolM;
}

} // namespace

double intersection_area_m2(const FloorplanUnit& a, const FloorplanUnit& b) {
    const double w = std::min(a.right_m(), b.right_m()) - std::max(a.left_m, b.left_m);
    const double h = std::min(a.top_m(), b.top_m()) - std::max(a.bottom_m, b.bottom_m);
    if (w <= 0.0 || h <= 0.0) return 0.0;
    return w * h;
}

const FloorplanUnit* Floorplan::find(const std::string& name) const {
    for (const auto& u : units)
        if (u.name == name) return &u;
    return nullptr;
}

std::vector<std::string> Floorplan::nonvoid_names() const {
    std::vector<std::string> out;
    for (const auto& u : units)
        if (!u.is_void) out.push_back(u.name);
    return out;
}

void check_spec(const ChipSpec& spec) {
    if (spec.chip_width_m <= 0.0 || spec.chip_height_m <= 0.0)
        throw InvalidSpec("chip dimensions must be positive");
    if (spec.sm_count <= 0 || spec.sm_count % 2 != 0)
        throw InvalidSpec("sm_count must be a positive multiple of 2");
    if (spec.dram_count <= 0 || spec.dram_count % 2 != 0)
        throw InvalidSpec("dram_count must be a positive multiple of 2");
    double sum = 0.0;
    for (double f : spec.sm_subunit_fractions) {
        if (f <= 0.0 || !std::isfinite(f))
            throw InvalidSpec("sm_subunit_fractions must be positive");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw InvalidSpec("sm_subunit_fractions must sum to 1");
}

Floorplan generate_layer0(const ChipSpec& spec) {
    check_spec(spec);
    Floorplan fp;
    fp.chip_width_m = spec.chip_width_m;
    fp.chip_height_m = spec.chip_height_m;

    const double col_w = 0.1 * spec.chip_width_m;
    const int per_col = spec.dram_count / 2;
    const double slot_h = spec.chip_height_m / per_col;

    for (int side = 0; side < 2; ++side) {
        const double x = side == 0 ? 0.0 : spec.chip_width_m - col_w;
        const char tag = side == 0 ? 'L' : 'R';
        double bottom = 0.0;
        for (int i = 0; i < per_col; ++i) {
            // last slot closes the column exactly
            const double h = i + 1 == per_col ? spec.chip_height_m - bottom : slot_h;
            fp.units.push_back({std::string("DRAM_") + tag + std::to_string(i), col_w, h, x, bottom, false});
            bottom += h;
        }
    }

    const double l2_w = spec.reduced_l2 ? 0.0046 : 0.0092;
    const double l2_h = spec.reduced_l2 ? 0.0023 : 0.0046;
    fp.units.push_back({"L2", l2_w, l2_h, (spec.chip_width_m - l2_w) / 2.0,
                        (spec.chip_height_m - l2_h) / 2.0, false});

    fp = fill_voids(fp);
    if (!validate(fp).empty()) throw InvalidSpec("generated layer0 failed validation");
    return fp;
}

Floorplan generate_layer2(const ChipSpec& spec) {
    check_spec(spec);
    Floorplan fp;
    fp.chip_width_m = spec.chip_width_m;
    fp.chip_height_m = spec.chip_height_m;

    static const char* kKinds[5] = {"RF", "EXE", "L1SHM", "SCHED", "LDST"};
    const int per_band = spec.sm_count / 2;
    const double margin = 0.1 * spec.chip_width_m;
    const double slot_w = 0.8 * spec.chip_width_m / per_band;
    const double band_h = 0.4 * spec.chip_height_m;
    const double top_band_y = spec.chip_height_m - band_h;

    for (int sm = 0; sm < spec.sm_count; ++sm) {
        const int band = sm / per_band;
        const int col = sm % per_band;
        const double x = margin + slot_w * col;
        const double y0 = band == 0 ? 0.0 : top_band_y;
        double bottom = y0;
        for (int k = 0; k < 5; ++k) {
            const double h = k == 4 ? (y0 + band_h) - bottom
                                    : spec.sm_subunit_fractions[k] * band_h;
            fp.units.push_back({"SM" + std::to_string(sm) + "_" + kKinds[k], slot_w, h, x, bottom, false});
            bottom += h;
        }
    }

    fp = fill_voids(fp);
    if (!validate(fp).empty()) throw InvalidSpec("generated layer2 failed validation");
    return fp;
}

ValidationReport validate(const Floorplan& fp) {
    ValidationReport rep;

    std::unordered_set<std::string> seen;
    for (const auto& u : fp.units) {
        if (!seen.insert(u.name).second) rep.duplicate_names.push_back(u.name);
        if (u.left_m < -kBoundsTolM || u.bottom_m < -kBoundsTolM ||
            u.right_m() > fp.chip_width_m + kBoundsTolM ||
            u.top_m() > fp.chip_height_m + kBoundsTolM)
            rep.out_of_bounds.push_back(u.name);
    }

    for (std::size_t i = 0; i < fp.units.size(); ++i) {
        for (std::size_t j = i + 1; j < fp.units.size(); ++j) {
            const double a = intersection_area_m2(fp.units[i], fp.units[j]);
            if (a > kOverlapTolM2)
                rep.overlaps.push_back({fp.units[i].name, fp.units[j].name, a});
        }
    }

    // Uncovered area via coordinate compression: a grid cell is covered when
    // some unit contains its center.
    std::vector<double> xs{0.0, fp.chip_width_m}, ys{0.0, fp.chip_height_m};
    for (const auto& u : fp.units) {
        xs.push_back(u.left_m);
        xs.push_back(u.right_m());
        ys.push_back(u.bottom_m);
        ys.push_back(u.top_m());
    }
    xs = snapped_coords(std::move(xs));
    ys = snapped_coords(std::move(ys));
    double uncovered = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (xs[i] >= fp.chip_width_m || xs[i + 1] <= 0.0) continue;
        const double cx = (xs[i] + xs[i + 1]) / 2.0;
        for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
            if (ys[j] >= fp.chip_height_m || ys[j + 1] <= 0.0) continue;
            const double cy = (ys[j] + ys[j + 1]) / 2.0;
            bool covered = false;
            for (const auto& u : fp.units) {
                if (covers_point(u, cx, cy)) {
                    covered = true;
                    break;
                }
            }
            if (!covered) uncovered += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
        }
    }
    rep.uncovered_area_m2 = uncovered;
    return rep;
}

Floorplan fill_voids(const Floorplan& fp) {
    for (std::size_t i = 0; i < fp.units.size(); ++i)
        for (std::size_t j = i + 1; j < fp.units.size(); ++j)
            if (intersection_area_m2(fp.units[i], fp.units[j]) > kOverlapTolM2)
                throw OverlapError("units " + fp.units[i].name + " and " + fp.units[j].name +
                                   " overlap");

    std::vector<double> xs{0.0, fp.chip_width_m}, ys{0.0, fp.chip_height_m};
    for (const auto& u : fp.units) {
        xs.push_back(u.left_m);
        xs.push_back(u.right_m());
        ys.push_back(u.bottom_m);
        ys.push_back(u.top_m());
    }
    xs = snapped_coords(std::move(xs));
    ys = snapped_coords(std::move(ys));

    struct Rect {
        double x0, x1, y0, y1;
    };
    // Per x-interval, vertically merged uncovered spans; then merge spans with
    // identical y-extent across adjacent x-intervals into maximal rectangles.
    std::vector<Rect> open, closed;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (xs[i] >= fp.chip_width_m || xs[i + 1] <= 0.0) continue;
        const double cx = (xs[i] + xs[i + 1]) / 2.0;
        std::vector<std::pair<double, double>> spans;
        for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
            if (ys[j] >= fp.chip_height_m || ys[j + 1] <= 0.0) continue;
            const double cy = (ys[j] + ys[j + 1]) / 2.0;
            bool covered = false;
            for (const auto& u : fp.units) {
                if (covers_point(u, cx, cy)) {
                    covered = true;
                    break;
                }
            }
            if (covered) continue;
            if (!spans.empty() && std::abs(spans.back().second - ys[j]) <= kBoundsTolM)
                spans.back().second = ys[j + 1];
            else
                spans.emplace_back(ys[j], ys[j + 1]);
        }
        std::vector<Rect> next;
        for (auto [y0, y1] : spans) {
            bool continued = false;
            for (auto& r : open) {
                if (std::abs(r.y0 - y0) <= kBoundsTolM && std::abs(r.y1 - y1) <= kBoundsTolM &&
                    std::abs(r.x1 - xs[i]) <= kBoundsTolM) {
                    r.x1 = xs[i + 1];
                    next.push_back(r);
                    r.y0 = r.y1 = -1.0; // consumed
                    continued = true;
                    break;
                }
            }
            if (!continued) next.push_back({xs[i], xs[i + 1], y0, y1});
        }
        for (const auto& r : open)
            if (r.y1 > r.y0) closed.push_back(r);
        open = std::move(next);
    }
    for (const auto& r : open)
        if (r.y1 > r.y0) closed.push_back(r);

    std::sort(closed.begin(), closed.end(), [](const Rect& a, const Rect& b) {
        return a.x0 != b.x0 ? a.x0 < b.x0 : a.y0 < b.y0;
    });

    Floorplan out = fp;
    int k = 0;
    for (const auto& r : closed)
        out.units.push_back({"VOID" + std::to_string(k++), r.x1 - r.x0, r.y1 - r.y0, r.x0, r.y0, true});
    return out;
}

Floorplan parse_flp(std::istream& in) {
    Floorplan fp;
    fp.chip_width_m = 0.0;
    fp.chip_height_m = 0.0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string name;
        if (!(ls >> name) || name[0] == '#') continue;
        double f[4];
        for (int i = 0; i < 4; ++i)
            if (!(ls >> f[i])) throw ParseError("expected 5 fields: " + line, lineno);
        std::string extra;
        if (ls >> extra) throw ParseError("trailing fields: " + line, lineno);
        if (f[0] <= 0.0 || f[1] <= 0.0)
            throw ParseError("non-positive dimensions for unit " + name, lineno);
        if (!std::isfinite(f[0]) || !std::isfinite(f[1]) || !std::isfinite(f[2]) ||
            !std::isfinite(f[3]) || f[2] < 0.0 || f[3] < 0.0)
            throw ParseError("bad coordinates for unit " + name, lineno);
        fp.units.push_back({name, f[0], f[1], f[2], f[3], name.rfind("VOID", 0) == 0});
        fp.chip_width_m = std::max(fp.chip_width_m, fp.units.back().right_m());
        fp.chip_height_m = std::max(fp.chip_height_m, fp.units.back().top_m());
    }
    return fp;
}

Floorplan parse_flp(const std::string& text) {
    std::istringstream in(text);
    return parse_flp(in);
}

std::string serialize_flp(const Floorplan& fp) {
    std::string out;
    for (const auto& u : fp.units) {
        out += u.name;
        out += '\t';
        out += fmt_double(u.width_m);
        out += '\t';
        out += fmt_double(u.height_m);
        out += '\t';
        out += fmt_double(u.left_m);
        out += '\t';
        out += fmt_double(u.bottom_m);
        out += '\n';
    }
    return out;
}

Floorplan read_flp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return parse_flp(in);
}

void write_flp_file(const Floorplan& fp, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << serialize_flp(fp);
    if (!out) throw IoError("write failed for " + path);
}

} // namespace gputherm
