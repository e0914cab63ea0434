#include "gputherm/fixture.hpp"
#include "gputherm/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gputherm {

Kernel kernel_from_string(const std::string& name) {
    if (name == "matmul_linear") return Kernel::MatmulLinear;
    if (name == "matmul_tiled") return Kernel::MatmulTiled;
    if (name == "needleman_wunsch") return Kernel::NeedlemanWunsch;
    throw InvalidSpec("unknown kernel: " + name);
}

std::string to_string(Kernel k) {
    switch (k) {
    case Kernel::MatmulLinear:
        return "matmul_linear";
    case Kernel::MatmulTiled:
        return "matmul_tiled";
    case Kernel::NeedlemanWunsch:
        return "needleman_wunsch";
    }
    return "?";
}

std::string nearest_dram_to_l2(const Floorplan& fp0) {
    const FloorplanUnit* l2 = fp0.find("L2");
    if (!l2) throw UnknownUnit("L2");
    const double cx = l2->left_m + l2->width_m / 2.0;
    const double cy = l2->bottom_m + l2->height_m / 2.0;
    std::string best;
    double best_d = 0.0, best_x = 0.0, best_y = 0.0;
    for (const auto& u : fp0.units) {
        if (u.is_void || u.name.rfind("DRAM", 0) != 0) continue;
        const double ux = u.left_m + u.width_m / 2.0;
        const double uy = u.bottom_m + u.height_m / 2.0;
        const double d = std::hypot(ux - cx, uy - cy);
        const bool better = best.empty() || d < best_d - kBoundsTolM ||
                            (std::abs(d - best_d) <= kBoundsTolM &&
                             (ux > best_x + kBoundsTolM ||
                              (std::abs(ux - best_x) <= kBoundsTolM && uy < best_y)));
        if (better) {
            best = u.name;
            best_d = d;
            best_x = ux;
            best_y = uy;
        }
    }
    if (best.empty()) throw UnknownUnit("DRAM*");
    return best;
}

namespace {

// DRAM names ordered by distance to the L2 center, right side preferred on
// ties, bottom before top.
std::vector<std::string> drams_by_distance(const Floorplan& fp0) {
    const FloorplanUnit* l2 = fp0.find("L2");
    const double cx = l2->left_m + l2->width_m / 2.0;
    const double cy = l2->bottom_m + l2->height_m / 2.0;
    struct Item {
        double d, x, y;
        std::string name;
    };
    std::vector<Item> items;
    for (const auto& u : fp0.units) {
        if (u.is_void || u.name.rfind("DRAM", 0) != 0) continue;
        const double ux = u.left_m + u.width_m / 2.0;
        const double uy = u.bottom_m + u.height_m / 2.0;
        items.push_back({std::hypot(ux - cx, uy - cy), ux, uy, u.name});
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (std::abs(a.d - b.d) > kBoundsTolM) return a.d < b.d;
        if (std::abs(a.x - b.x) > kBoundsTolM) return a.x > b.x;
        return a.y < b.y;
    });
    std::vector<std::string> out;
    for (auto& it : items) out.push_back(std::move(it.name));
    return out;
}

ComponentPower entry(const std::string& name, double avg) {
    return {name, 0.8 * avg, avg, 1.3 * avg};
}

} // namespace

PowerReport fixture_report(const Scenario& s) {
    if (s.size <= 0) throw InvalidSpec("scenario size must be positive");

    const double data_bytes = 4.0 * s.size * s.size;
    const double l2_bytes = s.reduced_l2 ? 196608.0 : 786432.0;
    const double p = std::clamp(3.0 * data_bytes / l2_bytes - 1.0, 0.0, 1.0);
    const double occ = data_bytes / (data_bytes + l2_bytes);
    const int blocks = static_cast<int>(std::ceil(s.size / 32.0));
    const int active_sms = std::min(16, blocks * blocks);
    const double activity = active_sms / 16.0;

    double k_kernel = 1.0;
    if (s.kernel == Kernel::MatmulTiled) k_kernel = 0.3;
    if (s.kernel == Kernel::NeedlemanWunsch) k_kernel = 1.5;

    ChipSpec spec;
    spec.reduced_l2 = s.reduced_l2;
    const Floorplan fp0 = generate_layer0(spec);

    PowerReport report;

    // SM execution power: 2 W per SM at full activity, plus a linear ramp
    // whose spread shrinks both with active SM count and with cache occupancy
    // so heating grows more uniform at larger sizes.
    const double spread_W =
        1.0 * (16.0 - active_sms) / 15.0 + 2.0 * (1.0 - occ);
    for (int i = 0; i < spec.sm_count; ++i) {
        const double ramp = static_cast<double>(spec.sm_count - 1 - i) / (spec.sm_count - 1);
        report.entries.push_back(entry("SM" + std::to_string(i) + "_EXE",
                                       2.0 * activity + ramp * spread_W));
    }

    report.entries.push_back(entry("L2", 2.0));

    const double dram_total_W =
        (0.7 + 0.3 * k_kernel) + 12.0 * k_kernel * p * (1.0 + 0.25 * occ);
    const auto drams = drams_by_distance(fp0);
    static const double kSkew[6] = {0.5, 0.2, 0.1, 0.1, 0.05, 0.05};
    for (std::size_t i = 0; i < drams.size(); ++i) {
        const double w = p == 0.0 ? 1.0 / static_cast<double>(drams.size())
                                  : (i < 6 ? kSkew[i] : 0.0);
        report.entries.push_back(entry(drams[i], dram_total_W * w));
    }
    return report;
}

ComponentMapping fixture_mapping(const Floorplan& fp0, const Floorplan& fp2) {
    ComponentMapping m;
    for (const auto& u : fp0.units)
        if (!u.is_void) m.rules[u.name] = MappingTarget{MappingTarget::Kind::Unit, u.name, "", {}};
    for (const auto& u : fp2.units)
        if (!u.is_void) m.rules[u.name] = MappingTarget{MappingTarget::Kind::Unit, u.name, "", {}};
    return m;
}

} // namespace gputherm
