#include <doctest.h>

#include "gputherm/errors.hpp"
#include "gputherm/floorplan.hpp"

#include <cmath>

using namespace gputherm;

TEST_CASE("layer0 default geometry") {
    const Floorplan fp = generate_layer0(ChipSpec{});

    int drams = 0;
    for (const auto& u : fp.units) {
        if (u.name.rfind("DRAM", 0) != 0) continue;
        ++drams;
        CHECK(u.width_m == doctest::Approx(0.0023).epsilon(1e-12));
        CHECK(u.height_m == doctest::Approx(0.023 / 3.0).epsilon(1e-12));
        if (u.name[5] == 'L')
            CHECK(u.left_m == 0.0);
        else
            CHECK(u.left_m == doctest::Approx(0.0207).epsilon(1e-12));
    }
    CHECK(drams == 6);

    const FloorplanUnit* l2 = fp.find("L2");
    REQUIRE(l2 != nullptr);
    CHECK(l2->width_m == 0.0092);
    CHECK(l2->height_m == 0.0046);
    CHECK(l2->left_m == doctest::Approx(0.0069).epsilon(1e-12));
    CHECK(l2->bottom_m == doctest::Approx(0.0092).epsilon(1e-12));

    double total = 0.0;
    for (const auto& u : fp.units) total += u.area_m2();
    CHECK(std::abs(total - 529e-6) <= 1e-15);

    CHECK(validate(fp).empty());
}

TEST_CASE("reduced L2 is exactly a quarter of the default area") {
    const Floorplan full = generate_layer0(ChipSpec{});
    ChipSpec spec;
    spec.reduced_l2 = true;
    const Floorplan reduced = generate_layer0(spec);

    const double a_full = full.find("L2")->area_m2();
    const double a_reduced = reduced.find("L2")->area_m2();
    CHECK(std::abs(a_full - 4.0 * a_reduced) <= 1e-15);
    CHECK(a_full == doctest::Approx(42.32e-6).epsilon(1e-12));
    CHECK(a_reduced == doctest::Approx(10.58e-6).epsilon(1e-12));

    // only L2 and voids may differ
    for (const auto& u : full.units) {
        if (u.name.rfind("DRAM", 0) != 0) continue;
        const FloorplanUnit* r = reduced.find(u.name);
        REQUIRE(r != nullptr);
        CHECK(*r == u);
    }
    CHECK(validate(reduced).empty());
}

TEST_CASE("layer2 default geometry") {
    const Floorplan fp = generate_layer2(ChipSpec{});

    int powered = 0, voids = 0;
    for (const auto& u : fp.units) (u.is_void ? voids : powered)++;
    CHECK(powered == 80);
    CHECK(voids == 3);

    const FloorplanUnit* exe = fp.find("SM0_EXE");
    REQUIRE(exe != nullptr);
    CHECK(exe->height_m == doctest::Approx(0.00414).epsilon(1e-12));
    CHECK(exe->width_m == doctest::Approx(0.0023).epsilon(1e-12));

    // SM slots exactly tile x in [2.3, 20.7] mm
    double min_left = 1.0, max_right = 0.0, powered_area = 0.0;
    for (const auto& u : fp.units) {
        if (u.is_void) continue;
        min_left = std::min(min_left, u.left_m);
        max_right = std::max(max_right, u.right_m());
        powered_area += u.area_m2();
    }
    CHECK(min_left == doctest::Approx(0.0023).epsilon(1e-12));
    CHECK(max_right == doctest::Approx(0.0207).epsilon(1e-12));
    CHECK(powered_area == doctest::Approx(16 * 0.0023 * 0.0092).epsilon(1e-12));

    CHECK(validate(fp).empty());
}

TEST_CASE("bad sub-unit fractions are rejected") {
    ChipSpec spec;
    spec.sm_subunit_fractions = {0.2, 0.2, 0.2, 0.2, 0.1};
    CHECK_THROWS_AS(generate_layer2(spec), InvalidSpec);
    spec.sm_subunit_fractions = {0.15, 0.45, 0.20, 0.10, 0.10};
    spec.sm_count = 15;
    CHECK_THROWS_AS(generate_layer2(spec), InvalidSpec);
}

TEST_CASE("validate reports overlaps, bounds and coverage") {
    Floorplan fp;
    fp.units.push_back({"A", 0.001, 0.001, 0.0, 0.0, false});
    fp.units.push_back({"B", 0.001, 0.001, 0.0, 0.0, false});
    const ValidationReport rep = validate(fp);
    REQUIRE(rep.overlaps.size() == 1);
    CHECK(rep.overlaps[0].area_m2 == doctest::Approx(1e-6).epsilon(1e-12));

    Floorplan oob;
    oob.units.push_back({"X", 0.0002, 0.001, 0.0229, 0.0, false});
    const ValidationReport rep2 = validate(oob);
    REQUIRE(rep2.out_of_bounds.size() == 1);
    CHECK(rep2.out_of_bounds[0] == "X");

    Floorplan dup;
    dup.units.push_back({"A", 0.001, 0.001, 0.0, 0.0, false});
    dup.units.push_back({"A", 0.001, 0.001, 0.005, 0.005, false});
    CHECK(validate(dup).duplicate_names.size() == 1);
}

TEST_CASE("fill_voids covers the chip") {
    SUBCASE("empty floorplan gets a single full-chip void") {
        const Floorplan filled = fill_voids(Floorplan{});
        REQUIRE(filled.units.size() == 1);
        CHECK(filled.units[0].is_void);
        CHECK(filled.units[0].area_m2() == doctest::Approx(529e-6).epsilon(1e-12));
    }
    SUBCASE("fully covered floorplan is unchanged") {
        Floorplan fp;
        fp.units.push_back({"ALL", 0.023, 0.023, 0.0, 0.0, false});
        CHECK(fill_voids(fp).units.size() == 1);
    }
    SUBCASE("idempotent on generated plans") {
        const Floorplan fp = generate_layer0(ChipSpec{});
        CHECK(fill_voids(fp).units.size() == fp.units.size());
        const Floorplan fp2 = generate_layer2(ChipSpec{});
        CHECK(fill_voids(fp2).units.size() == fp2.units.size());
    }
    SUBCASE("void area matches the uncovered remainder") {
        const Floorplan fp = generate_layer0(ChipSpec{});
        double void_area = 0.0;
        for (const auto& u : fp.units)
            if (u.is_void) void_area += u.area_m2();
        const double expected = 529e-6 - 6 * (0.0023 * 0.023 / 3.0) - 42.32e-6;
        CHECK(void_area == doctest::Approx(expected).epsilon(1e-9));
    }
    SUBCASE("overlapping input throws") {
        Floorplan fp;
        fp.units.push_back({"A", 0.001, 0.001, 0.0, 0.0, false});
        fp.units.push_back({"B", 0.001, 0.001, 0.0005, 0.0005, false});
        CHECK_THROWS_AS(fill_voids(fp), OverlapError);
    }
}

TEST_CASE("flp parsing") {
    SUBCASE("single unit") {
        const Floorplan fp = parse_flp(std::string("L2\t0.0092\t0.0046\t0.0069\t0.0092\n"));
        REQUIRE(fp.units.size() == 1);
        CHECK(fp.units[0].width_m == 0.0092);
        CHECK(fp.units[0].height_m == 0.0046);
        CHECK(fp.units[0].left_m == 0.0069);
        CHECK(fp.units[0].bottom_m == 0.0092);
        CHECK_FALSE(fp.units[0].is_void);
    }
    SUBCASE("comments and blanks") {
        const Floorplan fp = parse_flp(std::string("# comment\n\n"));
        CHECK(fp.units.empty());
        CHECK(fp.chip_width_m == 0.0);
        CHECK(fp.chip_height_m == 0.0);
    }
    SUBCASE("void naming") {
        const Floorplan fp = parse_flp(std::string("VOID0 0.001 0.001 0 0\n"));
        CHECK(fp.units[0].is_void);
    }
    SUBCASE("errors carry line numbers") {
        try {
            parse_flp(std::string("L2 0.0092 abc 0 0\n"));
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 1);
        }
        CHECK_THROWS_AS(parse_flp(std::string("L2 0.0092 0.0046 0\n")), ParseError);
        CHECK_THROWS_AS(parse_flp(std::string("L2 0 0.0046 0 0\n")), ParseError);
    }
}

TEST_CASE("flp serialization golden and round trip") {
    Floorplan fp;
    fp.units.push_back({"A", 0.001, 0.002, 0.0, 0.0, false});
    CHECK(serialize_flp(fp) == "A\t0.001\t0.002\t0\t0\n");
    CHECK(serialize_flp(Floorplan{}) == "");

    for (const bool reduced : {false, true}) {
        ChipSpec spec;
        spec.reduced_l2 = reduced;
        for (const Floorplan& gen : {generate_layer0(spec), generate_layer2(spec)}) {
            const Floorplan back = parse_flp(serialize_flp(gen));
            REQUIRE(back.units.size() == gen.units.size());
            for (std::size_t i = 0; i < gen.units.size(); ++i)
                CHECK(back.units[i] == gen.units[i]);
        }
    }
}
