#include <doctest.h>

#include "gputherm/fixture.hpp"

#include <cmath>
#include <map>

using namespace gputherm;

namespace {

double dram_total(const PowerReport& r) {
    double sum = 0.0;
    for (const auto& e : r.entries)
        if (e.component.rfind("DRAM", 0) == 0) sum += e.avg_W;
    return sum;
}

double sm_spread(const PowerReport& r) {
    double lo = 1e300, hi = -1e300;
    for (const auto& e : r.entries) {
        if (e.component.rfind("SM", 0) != 0) continue;
        lo = std::min(lo, e.avg_W);
        hi = std::max(hi, e.avg_W);
    }
    return hi - lo;
}

std::map<std::string, double> dram_avgs(const PowerReport& r) {
    std::map<std::string, double> out;
    for (const auto& e : r.entries)
        if (e.component.rfind("DRAM", 0) == 0) out[e.component] = e.avg_W;
    return out;
}

} // namespace

TEST_CASE("nearest DRAM to L2 is the middle right unit") {
    CHECK(nearest_dram_to_l2(generate_layer0(ChipSpec{})) == "DRAM_R1");
}

TEST_CASE("small size has no cache pressure") {
    const PowerReport r = fixture_report({Kernel::MatmulLinear, 100, false});
    CHECK(dram_total(r) == doctest::Approx(1.0).epsilon(1e-12));
    const auto avgs = dram_avgs(r);
    REQUIRE(avgs.size() == 6);
    for (const auto& [name, avg] : avgs) CHECK(avg == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    for (const auto& e : r.entries) {
        CHECK(e.min_W == doctest::Approx(0.8 * e.avg_W));
        CHECK(e.max_W == doctest::Approx(1.3 * e.avg_W));
    }
}

TEST_CASE("large size saturates and skews toward the L2-adjacent DRAM") {
    const PowerReport r = fixture_report({Kernel::MatmulLinear, 800, false});
    const auto avgs = dram_avgs(r);
    const double total = dram_total(r);
    CHECK(total > 10.0);
    CHECK(avgs.at("DRAM_R1") == doctest::Approx(0.5 * total).epsilon(1e-12));
    CHECK(avgs.at("DRAM_L1") == doctest::Approx(0.2 * total).epsilon(1e-12));
    for (const auto& [name, avg] : avgs) CHECK(avgs.at("DRAM_R1") >= avg);
}

TEST_CASE("kernel factors order the DRAM pressure term") {
    const double lin = dram_total(fixture_report({Kernel::MatmulLinear, 800, false}));
    const double nw = dram_total(fixture_report({Kernel::NeedlemanWunsch, 800, false}));
    const double tiled = dram_total(fixture_report({Kernel::MatmulTiled, 800, false}));
    // pressure terms above the per-kernel base scale exactly with the factor
    CHECK((nw - 1.15) == doctest::Approx(1.5 * (lin - 1.0)).epsilon(1e-12));
    CHECK((tiled - 0.79) == doctest::Approx(0.3 * (lin - 1.0)).epsilon(1e-12));
    CHECK(nw > lin);
    CHECK(tiled < lin);
}

TEST_CASE("DRAM total is non-decreasing in N, tiled below linear") {
    for (const Kernel k : {Kernel::MatmulLinear, Kernel::MatmulTiled, Kernel::NeedlemanWunsch}) {
        for (const bool reduced : {false, true}) {
            double prev = -1.0;
            for (int n : {50, 100, 250, 400, 800, 1200}) {
                const double total = dram_total(fixture_report({k, n, reduced}));
                CHECK(total >= prev);
                prev = total;
            }
        }
    }
    for (int n : {100, 250, 400, 800})
        CHECK(dram_total(fixture_report({Kernel::MatmulTiled, n, true})) <
              dram_total(fixture_report({Kernel::MatmulLinear, n, true})));
}

TEST_CASE("reduced L2 never lowers DRAM power") {
    for (const Kernel k : {Kernel::MatmulLinear, Kernel::MatmulTiled, Kernel::NeedlemanWunsch})
        for (int n : {100, 250, 400, 800})
            CHECK(dram_total(fixture_report({k, n, true})) >=
                  dram_total(fixture_report({k, n, false})));
}

TEST_CASE("SM power spread shrinks as more SMs activate") {
    double prev = 1e300;
    for (int n : {32, 64, 96, 128, 250, 400, 800}) {
        const double spread = sm_spread(fixture_report({Kernel::MatmulLinear, n, false}));
        CHECK(spread < prev);
        prev = spread;
    }
}

TEST_CASE("fixture mapping covers every fixture component") {
    ChipSpec spec;
    const Floorplan fp0 = generate_layer0(spec);
    const Floorplan fp2 = generate_layer2(spec);
    const ComponentMapping m = fixture_mapping(fp0, fp2);
    const PowerReport r = fixture_report({Kernel::MatmulLinear, 400, false});
    for (const auto& e : r.entries) CHECK(m.rules.count(e.component) == 1);
}
