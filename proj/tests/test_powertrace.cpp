#include <doctest.h>

#include "gputherm/errors.hpp"
#include "gputherm/powertrace.hpp"

#include <algorithm>
#include <array>
#include <cmath>

using namespace gputherm;

TEST_CASE("power report parsing, both syntaxes") {
    SUBCASE("inline triple") {
        const PowerReport r = parse_power_report("RFP = 1.0 2.0 3.0\n");
        REQUIRE(r.entries.size() == 1);
        CHECK(r.entries[0] == ComponentPower{"RFP", 1.0, 2.0, 3.0});
    }
    SUBCASE("grouped keys") {
        const PowerReport r = parse_power_report(
            "gpu_min_L2CP = 1\ngpu_avg_L2CP = 2\ngpu_max_L2CP = 3\n"
            "gpu_max_RFP = 6\ngpu_min_RFP = 4\ngpu_avg_RFP = 5\n");
        REQUIRE(r.entries.size() == 2);
        CHECK(r.entries[0] == ComponentPower{"L2CP", 1.0, 2.0, 3.0});
        CHECK(r.entries[1] == ComponentPower{"RFP", 4.0, 5.0, 6.0});
    }
    SUBCASE("comments and whitespace tolerated") {
        const PowerReport r = parse_power_report("  RFP   =  1  2  3  # trailing\n\n# only\n");
        CHECK(r.entries.size() == 1);
    }
    SUBCASE("incomplete triple") {
        CHECK_THROWS_AS(parse_power_report("gpu_avg_L2CP = 5.0\n"), IncompleteTriple);
    }
    SUBCASE("order violation") {
        CHECK_THROWS_AS(parse_power_report("DRAMP = 3.0 2.0 4.0\n"), OrderViolation);
        CHECK_THROWS_AS(parse_power_report("DRAMP = 1.0 5.0 4.0\n"), OrderViolation);
    }
    SUBCASE("malformed lines") {
        CHECK_THROWS_AS(parse_power_report("RFP 1 2 3\n"), ParseError);
        CHECK_THROWS_AS(parse_power_report("RFP = 1 2\n"), ParseError);
        CHECK_THROWS_AS(parse_power_report("RFP = 1 x 3\n"), ParseError);
    }
    SUBCASE("round trip") {
        const PowerReport r = parse_power_report("A = 1 2 3\nB = 0.5 0.75 1\n");
        CHECK(parse_power_report(serialize_power_report(r)) == r);
    }
}

TEST_CASE("expand_samples") {
    SUBCASE("symmetric case") {
        const auto e = expand_samples(10, 20, 30);
        CHECK(e.values == std::array<double, 5>{10, 20, 20, 20, 30});
        CHECK(e.mean_preserved);
    }
    SUBCASE("asymmetric case keeps the mean") {
        const auto e = expand_samples(10, 15, 30);
        CHECK(e.values == std::array<double, 5>{10, 10, 15, 10, 30});
        double sum = 0.0;
        for (double v : e.values) sum += v;
        CHECK(sum / 5.0 == doctest::Approx(15.0).epsilon(1e-12));
    }
    SUBCASE("infeasible mean clamps and warns") {
        const auto e = expand_samples(0, 1, 10);
        CHECK(e.values == std::array<double, 5>{0, 0, 1, 0, 10});
        CHECK_FALSE(e.mean_preserved);
    }
}

TEST_CASE("mean preservation property") {
    // deterministic triple generator
    unsigned long long state = 12345;
    auto next = [&] {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>((state >> 17) % 100000) / 1000.0;
    };
    int feasible = 0;
    for (int i = 0; i < 1000; ++i) {
        double a = next(), b = next(), c = next();
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        const auto e = expand_samples(a, b, c);
        double sum = 0.0;
        for (double v : e.values) sum += v;
        if (e.mean_preserved) {
            ++feasible;
            CHECK(std::abs(sum / 5.0 - b) <= 1e-12 * std::max(1.0, b));
        }
        for (double v : e.values) CHECK(v >= 0.0);
    }
    CHECK(feasible > 500);
}

namespace {

Floorplan two_layer0() { return generate_layer0(ChipSpec{}); }
Floorplan two_layer2() { return generate_layer2(ChipSpec{}); }

} // namespace

TEST_CASE("map_to_units distributes and conserves power") {
    const Floorplan fp0 = two_layer0();
    const Floorplan fp2 = two_layer2();
    const ComponentMapping mapping = default_mapping(fp0);

    SUBCASE("single unit target") {
        const PowerReport r = parse_power_report("L2CP = 0 1 2\n");
        const MapResult res = map_to_units(r, mapping, fp0, fp2);
        const auto names = res.trace.unit_names;
        const auto it = std::find(names.begin(), names.end(), "L2");
        REQUIRE(it != names.end());
        const std::size_t col = static_cast<std::size_t>(it - names.begin());
        // (0,1,2): v = (4*1 - 0 - 2)/2 = 1, keeping the 5-sample mean at 1
        const std::array<double, 5> expect{0, 1, 1, 1, 2};
        for (int k = 0; k < 5; ++k) {
            CHECK(res.trace.rows[k][col] == doctest::Approx(expect[k]).epsilon(1e-12));
            for (std::size_t c = 0; c < names.size(); ++c)
                if (c != col) CHECK(res.trace.rows[k][c] == 0.0);
        }
    }
    SUBCASE("per-SM split") {
        const PowerReport r = parse_power_report("RFP = 16 16 16\n");
        const MapResult res = map_to_units(r, mapping, fp0, fp2);
        for (std::size_t c = 0; c < res.trace.unit_names.size(); ++c) {
            const bool is_rf = res.trace.unit_names[c].find("_RF") != std::string::npos;
            for (int k = 0; k < 5; ++k)
                CHECK(res.trace.rows[k][c] == doctest::Approx(is_rf ? 1.0 : 0.0));
        }
    }
    SUBCASE("empty report gives zero rows") {
        const MapResult res = map_to_units(PowerReport{}, mapping, fp0, fp2);
        REQUIRE(res.trace.rows.size() == 5);
        for (const auto& row : res.trace.rows)
            for (double v : row) CHECK(v == 0.0);
    }
    SUBCASE("power conservation across a mixed report") {
        const PowerReport r = parse_power_report(
            "RFP = 1 2 3\nL2CP = 0.5 1 2\nDRAMP = 2 3 4\nSHRDP = 0 1 2\n");
        const MapResult res = map_to_units(r, mapping, fp0, fp2);
        CHECK(res.warnings.empty());
        for (int k = 0; k < 5; ++k) {
            double row_sum = 0.0;
            for (double v : res.trace.rows[k]) row_sum += v;
            double comp_sum = 0.0;
            for (const auto& e : r.entries)
                comp_sum += expand_samples(e.min_W, e.avg_W, e.max_W).values[k];
            CHECK(row_sum == doctest::Approx(comp_sum).epsilon(1e-12));
        }
    }
    SUBCASE("unmapped component goes to per-SM EXE with a warning") {
        const PowerReport r = parse_power_report("NEWCOUNTER = 16 16 16\n");
        const MapResult res = map_to_units(r, mapping, fp0, fp2);
        REQUIRE(res.warnings.size() == 1);
        double exe_sum = 0.0;
        for (std::size_t c = 0; c < res.trace.unit_names.size(); ++c)
            if (res.trace.unit_names[c].find("_EXE") != std::string::npos)
                exe_sum += res.trace.rows[0][c];
        CHECK(exe_sum == doctest::Approx(16.0));
    }
    SUBCASE("unmapped component with default disabled throws") {
        ComponentMapping strict = mapping;
        strict.default_target.reset();
        const PowerReport r = parse_power_report("NEWCOUNTER = 1 1 1\n");
        CHECK_THROWS_AS(map_to_units(r, strict, fp0, fp2), UnknownComponent);
    }
    SUBCASE("unknown unit in a rule throws") {
        ComponentMapping broken = mapping;
        broken.rules["L2CP"] = MappingTarget{MappingTarget::Kind::Unit, "NOPE", "", {}};
        const PowerReport r = parse_power_report("L2CP = 1 1 1\n");
        CHECK_THROWS_AS(map_to_units(r, broken, fp0, fp2), UnknownUnit);
    }
}

TEST_CASE("mapping file round trip") {
    const std::string text =
        "DRAMP -> split:DRAM_L0=0.5,DRAM_R0=0.5\n"
        "L2CP -> unit:L2\n"
        "RFP -> sm:RF\n";
    const ComponentMapping m = parse_mapping(text);
    CHECK(m.rules.size() == 3);
    CHECK(m.rules.at("L2CP").kind == MappingTarget::Kind::Unit);
    CHECK(m.rules.at("RFP").sm_kind == "RF");
    CHECK(m.rules.at("DRAMP").weights.size() == 2);
    CHECK(serialize_mapping(m) == text);

    CHECK_THROWS_AS(parse_mapping("X -> bogus:Y\n"), ParseError);
    CHECK_THROWS_AS(parse_mapping("X => unit:Y\n"), ParseError);
    CHECK_THROWS_AS(parse_mapping("X -> split:A=0.5,B=0.6\n"), ParseError);
}

TEST_CASE("ptrace format") {
    PowerTrace t;
    t.unit_names = {"A", "B"};
    t.rows = {{1, 2}, {3, 4}};
    const std::string text = serialize_ptrace(t);
    CHECK(text == "A\tB\n1\t2\n3\t4\n");
    CHECK(parse_ptrace(text) == t);

    CHECK_THROWS_AS(parse_ptrace("A\tB\n1\n"), RowLengthMismatch);
    CHECK_THROWS_AS(parse_ptrace(""), ParseError);
    CHECK_THROWS_AS(parse_ptrace("A\nx\n"), ParseError);
}
