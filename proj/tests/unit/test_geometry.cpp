#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "packbench/geometry.hpp"
#include "packbench/shapes.hpp"

using namespace packbench;

namespace {

TriMesh cuboid(double w, double h, double d) { return gen_shape({"c", ShapeKind::Cuboid, {w, h, d}, 0, ""}); }

}  // namespace

TEST_CASE("rotation group is exactly the proper rotations of the cube") {
    const auto& group = rotation_group();
    REQUIRE(group.size() == 24);
    CHECK(group[0].matrix == IntMat3{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}});
    std::set<oracle::Mat> mine;
    for (int i = 0; i < 24; ++i) {
        CHECK(group[i].index == i);
        CHECK(oracle::det(group[i].matrix) == 1);
        mine.insert(group[i].matrix);
    }
    CHECK(mine == oracle::proper_cube_rotations());
}

TEST_CASE("composition and inverse agree with matrix products") {
    const auto& group = rotation_group();
    for (int a = 0; a < 24; ++a) {
        for (int b = 0; b < 24; ++b) {
            CHECK(group[compose_rotations(a, b)].matrix == oracle::mul(group[a].matrix, group[b].matrix));
        }
        CHECK(compose_rotations(a, inverse_rotation(a)) == 0);
    }
}

TEST_CASE("rotation index names the face that ends up facing down") {
    // Local face normals in the order of the down-face ids.
    const std::array<std::array<int, 3>, 6> normals{{{0, -1, 0}, {0, 1, 0}, {-1, 0, 0}, {1, 0, 0}, {0, 0, -1}, {0, 0, 1}}};
    for (int r = 0; r < 24; ++r) {
        const auto down = rotation_group()[r].apply(normals[static_cast<std::size_t>(r / 4)]);
        CHECK(down == std::array<int, 3>{0, -1, 0});
    }
}

TEST_CASE("scale factors") {
    CHECK(ScaleFactor::gene_set().size() == 5);
    CHECK(ScaleFactor::from_gene(0).volume_ratio() == Rational(1, 4));
    CHECK(ScaleFactor::from_gene(4).volume_ratio() == Rational(4));
    CHECK(scale_linear(ScaleFactor::from_gene(2)) == 1.0);
    CHECK(std::fabs(scale_linear(ScaleFactor::from_gene(4)) - 1.5874010519681994) < 1e-12);
    CHECK(ScaleFactor::from_ratio(Rational(1, 2)).gene() == 1);
    CHECK_THROWS_AS(ScaleFactor::from_ratio(Rational(1, 8)), std::invalid_argument);
    CHECK_THROWS(ScaleFactor::from_gene(5));
}

TEST_CASE("lattice-aligned cuboids voxelize exactly") {
    const auto g = voxelize(cuboid(0.2, 0.3, 0.4), ScaleFactor());
    REQUIRE(g);
    CHECK(g->dims() == Dims{20, 30, 40});
    CHECK(g->count() == 24000);

    const auto half = voxelize_linear(cuboid(0.2, 0.3, 0.4), 0.5);
    REQUIRE(half);
    CHECK(half->dims() == Dims{10, 15, 20});
    CHECK(half->count() == 3000);
}

TEST_CASE("sphere voxel count is within 5% of the analytic volume") {
    const auto g = voxelize(gen_shape({"s", ShapeKind::Sphere, {0.1}, 0, ""}), ScaleFactor());
    REQUIRE(g);
    const double expected = 4.0 / 3.0 * std::numbers::pi * 1000.0;
    CHECK(std::fabs(static_cast<double>(g->count()) - expected) / expected < 0.05);
}

TEST_CASE("scaled curved shapes keep the volume ratio within 10%") {
    for (const auto& spec : {ShapeSpec{"s", ShapeKind::Sphere, {0.2}, 0, ""},
                             ShapeSpec{"c", ShapeKind::Cylinder, {0.15, 0.3}, 0, ""}}) {
        const auto mesh = gen_shape(spec);
        const auto base = voxelize(mesh, ScaleFactor());
        REQUIRE(base);
        for (int gene = 0; gene < 5; ++gene) {
            const auto s = ScaleFactor::from_gene(gene);
            const auto g = voxelize(mesh, s);
            if (!g) continue;
            const double want = static_cast<double>(base->count()) * s.volume_ratio().to_double();
            if (want < 1000) continue;
            CHECK(static_cast<double>(g->count()) >= want * 0.9);
            CHECK(static_cast<double>(g->count()) <= want * 1.1);
        }
    }
}

TEST_CASE("shapes larger than the box are reported as oversized") {
    CHECK_FALSE(voxelize(cuboid(0.9, 0.9, 0.9), ScaleFactor::from_gene(4)));
    CHECK(voxelize(cuboid(1.0, 1.0, 1.0), ScaleFactor()));
}

TEST_CASE("inconsistent meshes are rejected by parity and recovered by the fallback") {
    // A duplicated top triangle gives odd crossing counts along the z rays.
    TriMesh bad = cuboid(0.3, 0.3, 0.3);
    double top = 0;
    for (const auto& v : bad.vertices) top = std::max(top, v.z);
    const auto it = std::find_if(bad.triangles.begin(), bad.triangles.end(), [&](const auto& t) {
        return bad.vertices[t[0]].z == top && bad.vertices[t[1]].z == top && bad.vertices[t[2]].z == top;
    });
    REQUIRE(it != bad.triangles.end());
    bad.triangles.push_back(*it);
    CHECK_THROWS_AS(voxelize_linear(bad, 1.0), NonWatertightError);
    const auto g = voxelize_robust(bad, 1.0);
    REQUIRE(g);
    CHECK(g->dims() == Dims{30, 30, 30});
    CHECK(g->count() == 27000);
}

TEST_CASE("rotating a cuboid permutes its dims") {
    const auto g = *voxelize(cuboid(0.2, 0.3, 0.4), ScaleFactor());
    CHECK(rotate_voxels(g, rotation_group()[0]) == g);
    // The rotation sending x->y, y->z, z->x.
    const IntMat3 cyc{{{0, 0, 1}, {1, 0, 0}, {0, 1, 0}}};
    const Rotation* r = nullptr;
    for (const auto& cand : rotation_group()) {
        if (cand.matrix == cyc) r = &cand;
    }
    REQUIRE(r != nullptr);
    const auto rg = rotate_voxels(g, *r);
    CHECK(rg.dims() == Dims{40, 20, 30});
    CHECK(rg.count() == 24000);
    for (int i = 0; i < 24; ++i) CHECK(rotated_dims(g.dims(), i) == rotate_voxels(g, rotation_group()[i]).dims());
}

TEST_CASE("rotate_voxels matches a cell-by-cell matrix oracle and inverts") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = oracle::random_grid(rng, 10, 0.4);
        for (const auto& r : rotation_group()) {
            const auto rg = rotate_voxels(g, r);
            CHECK(rg.count() == g.count());
            CHECK(rg == oracle::rotate_by_matrix(g, r.matrix));
            CHECK(rotate_voxels(rg, rotation_group()[inverse_rotation(r.index)]) == g);
        }
    }
}

TEST_CASE("voxel grid construction validates tightness") {
    CHECK_THROWS(VoxelGrid({2, 1, 1}, {1, 0}));
    CHECK_THROWS(VoxelGrid({1, 1, 1}, {0}));
    CHECK_THROWS(VoxelGrid({1, 1, 2}, {1}));
    const auto one = VoxelGrid::from_cells({{5, -3, 7}});
    CHECK(one.dims() == Dims{1, 1, 1});
    CHECK(bbox_dims(one) == Dims{1, 1, 1});
}

TEST_CASE("pooled occupancy") {
    SUBCASE("full box") {
        const auto full = oracle::solid_block(100, 100, 100);
        const auto pooled = pooled_occupancy(full, 25);
        CHECK(pooled.size() == 64);
        for (const double v : pooled) CHECK(v == 1.0);
    }
    SUBCASE("single voxel") {
        const auto pooled = pooled_occupancy(VoxelGrid::from_cells({{0, 0, 0}}), 50);
        CHECK(pooled.size() == 8);
        double total = 0;
        int nonzero = 0;
        for (const double v : pooled) {
            total += v;
            nonzero += v > 0;
        }
        CHECK(nonzero == 1);
        CHECK(total == doctest::Approx(1.0 / 125000.0));
    }
    SUBCASE("centered cuboid against direct summation") {
        const auto g = *voxelize(cuboid(0.2, 0.3, 0.4), ScaleFactor());
        const auto pooled = pooled_occupancy(g, 20);
        const int n = 5;
        std::vector<double> want(125, 0.0);
        const int ox = (100 - 20) / 2, oy = (100 - 30) / 2, oz = (100 - 40) / 2;
        for (int x = 0; x < 20; ++x)
            for (int y = 0; y < 30; ++y)
                for (int z = 0; z < 40; ++z)
                    want[static_cast<std::size_t>((((ox + x) / 20) * n + (oy + y) / 20) * n + (oz + z) / 20)] += 1.0 / 8000.0;
        REQUIRE(pooled.size() == want.size());
        double mass = 0;
        for (std::size_t i = 0; i < want.size(); ++i) {
            CHECK(pooled[i] == doctest::Approx(want[i]).epsilon(1e-12));
            CHECK(pooled[i] >= 0.0);
            CHECK(pooled[i] <= 1.0);
            mass += pooled[i];
        }
        CHECK(mass * 8000.0 == doctest::Approx(24000.0));
    }
    CHECK_THROWS_AS(pooled_occupancy(VoxelGrid::from_cells({{0, 0, 0}}), 3), std::invalid_argument);
}
