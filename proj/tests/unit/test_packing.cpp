#include <doctest.h>

#include "oracles.hpp"
#include "packbench/packing.hpp"

using namespace packbench;

namespace {

ShapeSpec cube(double e, const std::string& id = "cube") { return {id, ShapeKind::Cuboid, {e, e, e}, 0, ""}; }

Chromosome identity_genes(int n) {
    Chromosome c;
    for (int i = 0; i < n; ++i) {
        c.order.push_back(i);
        c.scales.push_back(2);
        c.rotations.push_back(0);
    }
    return c;
}

// Box with a random pile of blobs placed at oracle-checked anchors.
std::pair<BoxOccupancy, oracle::DenseBox> random_box(std::mt19937_64& rng, int shapes) {
    BoxOccupancy box;
    oracle::DenseBox dense;
    std::uniform_int_distribution<int> cell(0, kAnchorGrid - 1);
    for (int i = 0; i < shapes; ++i) {
        const auto g = oracle::random_grid(rng, 40, 0.7);
        for (int attempt = 0; attempt < 20; ++attempt) {
            const Anchor a{cell(rng), cell(rng), cell(rng)};
            if (!dense.fits(g, a)) continue;
            box = place(box, g, {i, ScaleFactor(), 0, a});
            dense.put(g, a);
            break;
        }
    }
    return {box, dense};
}

}  // namespace

TEST_CASE("feasibility on an empty box depends only on bounds") {
    const BoxOccupancy box;
    const auto full = oracle::solid_block(100, 100, 100);
    CHECK(feasible(box, full, {0, 0, 0}));
    CHECK_FALSE(feasible(box, full, {1, 0, 0}));
    const auto c = oracle::solid_block(20, 20, 20);
    CHECK(feasible(box, c, {20, 20, 20}));
    CHECK_FALSE(feasible(box, c, {21, 0, 0}));
}

TEST_CASE("overlapping cubes") {
    const auto c = oracle::solid_block(20, 20, 20);
    const BoxOccupancy one = place(BoxOccupancy(), c, {0, ScaleFactor(), 0, {0, 0, 0}});
    CHECK(feasible(one, c, {5, 0, 0}));
    // Anchor gx = 4 starts at voxel 16, inside the first cube.
    CHECK_FALSE(feasible(one, c, {4, 0, 0}));
    CHECK_FALSE(feasible(one, c, {3, 0, 0}));
    oracle::DenseBox dense;
    dense.put(c, {0, 0, 0});
    CHECK(dense.fits(c, {5, 0, 0}));
    CHECK_FALSE(dense.fits(c, {4, 0, 0}));
}

TEST_CASE("candidate locations") {
    const BoxOccupancy empty;
    const auto c = oracle::solid_block(20, 20, 20);
    const auto cands = candidate_locations(empty, c);
    CHECK(cands.size() == 21u * 21u * 21u);
    CHECK(cands.front() == Anchor{0, 0, 0});
    for (std::size_t i = 1; i < cands.size(); ++i) CHECK(blbf_less(cands[i - 1], cands[i]));

    const auto full = oracle::solid_block(100, 100, 100);
    const BoxOccupancy packed = place(empty, full, {0, ScaleFactor(), 0, {0, 0, 0}});
    CHECK(candidate_locations(packed, c).empty());
    CHECK_FALSE(blbf_location(packed, c));
}

TEST_CASE("a floor slab pushes BLBF up one anchor layer") {
    const auto slab = oracle::solid_block(100, 4, 100);
    const BoxOccupancy box = place(BoxOccupancy(), slab, {0, ScaleFactor(), 0, {0, 0, 0}});
    const auto c = oracle::solid_block(10, 10, 10);
    CHECK(blbf_location(box, c) == Anchor{0, 1, 0});
}

TEST_CASE("BLBF and candidate lists match the brute-force scan") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const auto [box, dense] = random_box(rng, 1 + trial % 12);
        const auto g = oracle::random_grid(rng, 45, 0.8);
        CHECK(blbf_location(box, g) == oracle::brute_blbf(dense, g));
        if (trial % 4 == 0) CHECK(candidate_locations(box, g) == oracle::brute_candidates(dense, g));
    }
}

TEST_CASE("placing records the union of cells") {
    std::mt19937_64 rng(5);
    const auto [box, dense] = random_box(rng, 10);
    CHECK(box.count() == dense.count());
    CHECK(box.dense() == dense.cells);
    const auto c = oracle::solid_block(20, 30, 40);
    const BoxOccupancy one = place(BoxOccupancy(), c, {0, ScaleFactor(), 0, {0, 0, 0}});
    CHECK(one.count() == 24000);
    CHECK_THROWS_AS(place(one, c, {0, ScaleFactor(), 0, {0, 0, 0}}), InfeasiblePlacement);
    // Value semantics: the source is untouched.
    const BoxOccupancy two = place(one, c, {1, ScaleFactor(), 0, {5, 0, 0}});
    CHECK(one.count() == 24000);
    CHECK(two.count() == 48000);
    CHECK(two.placements().size() == 2);
}

TEST_CASE("pack creator on cube pools") {
    SUBCASE("one cube") {
        const Pack p = create_pack(std::vector<ShapeSpec>{cube(0.2)}, identity_genes(1));
        REQUIRE(p.placements.size() == 1);
        CHECK(p.placements[0].anchor == Anchor{0, 0, 0});
        CHECK(p.density == Rational(8000, 1'000'000));
    }
    SUBCASE("oversized cube is left out") {
        Chromosome c = identity_genes(1);
        c.scales[0] = 4;
        const Pack p = create_pack(std::vector<ShapeSpec>{cube(0.9)}, c);
        CHECK(p.placements.empty());
        CHECK(p.density == Rational(0));
    }
    SUBCASE("five cubes fill the first slots in BLBF order") {
        std::vector<ShapeSpec> pool;
        for (int i = 0; i < 5; ++i) pool.push_back(cube(0.2, "cube_" + std::to_string(i)));
        const Pack p = create_pack(pool, identity_genes(5));
        CHECK(p.density == Rational(40000, 1'000'000));
        // Replay oracle: each cube goes to the brute-force BLBF anchor of the box so far.
        oracle::DenseBox dense;
        const auto g = oracle::solid_block(20, 20, 20);
        REQUIRE(p.placements.size() == 5);
        for (const auto& pl : p.placements) {
            const auto want = oracle::brute_blbf(dense, g);
            REQUIRE(want);
            CHECK(pl.anchor == *want);
            dense.put(g, *want);
        }
        CHECK(p.placements[1].anchor == Anchor{0, 0, 5});
        CHECK(p.placements[4].anchor == Anchor{0, 0, 20});
    }
}

TEST_CASE("pack creator is deterministic and replayable") {
    const std::vector<ShapeSpec> pool = {
        {"a", ShapeKind::LPrism, {0.4, 0.3, 0.3, 0.1, 0.1}, 0, ""},
        {"b", ShapeKind::Sphere, {0.15}, 0, ""},
        {"c", ShapeKind::Cylinder, {0.1, 0.4}, 0, ""},
        {"d", ShapeKind::HollowBox, {0.3, 0.3, 0.3, 0.05}, 0, ""},
    };
    const ShapeCatalog catalog(pool);
    Chromosome c{{2, 0, 3, 1}, {3, 2, 1, 4}, {5, 17, 0, 9}};
    const Pack p = create_pack(catalog, c);
    CHECK(create_pack(pool, c) == p);
    CHECK(packed_volume(catalog, c) == p.density.num() * (1'000'000 / p.density.den()));
    const BoxOccupancy box = replay(p, catalog);
    CHECK(Rational(box.count(), kBoxVolume) == p.density);
    CHECK(density(p) == p.density);

    Rational running;
    Pack partial = p;
    partial.placements.clear();
    for (const auto& pl : p.placements) {
        partial.placements.push_back(pl);
        const Rational d = density(partial, catalog);
        CHECK(d >= running);
        running = d;
    }
    CHECK(running <= Rational(1));
}

TEST_CASE("cube fitness ignores rotation genes") {
    const ShapeCatalog catalog(std::vector<ShapeSpec>{cube(0.2)});
    for (int r = 0; r < 24; ++r) {
        Chromosome c = identity_genes(1);
        c.rotations[0] = r;
        CHECK(create_pack(catalog, c).density == Rational(8000, 1'000'000));
    }
}

TEST_CASE("chromosome validation") {
    CHECK_NOTHROW(identity_genes(3).validate(3));
    CHECK_THROWS(identity_genes(3).validate(4));
    Chromosome dup{{0, 0, 1}, {2, 2, 2}, {0, 0, 0}};
    CHECK_THROWS(dup.validate(3));
    Chromosome bad_scale{{0, 1, 2}, {2, 5, 2}, {0, 0, 0}};
    CHECK_THROWS(bad_scale.validate(3));
    Chromosome bad_rot{{0, 1, 2}, {2, 2, 2}, {0, 24, 0}};
    CHECK_THROWS(bad_rot.validate(3));
}
