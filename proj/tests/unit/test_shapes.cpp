#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>

#include "packbench/shapes.hpp"

using namespace packbench;

namespace {

ShapeSpec spec(ShapeKind kind, std::vector<double> params) { return {"t", kind, std::move(params), 0, ""}; }

// Every edge of a closed, consistently oriented mesh appears once in each direction.
bool closed_and_oriented(const TriMesh& m) {
    std::map<std::pair<int, int>, int> edges;
    for (const auto& t : m.triangles) {
        for (int i = 0; i < 3; ++i) edges[{t[i], t[(i + 1) % 3]}]++;
    }
    for (const auto& [e, n] : edges) {
        if (n != 1) return false;
        const auto it = edges.find({e.second, e.first});
        if (it == edges.end() || it->second != 1) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("cuboid mesh") {
    const auto m = gen_shape(spec(ShapeKind::Cuboid, {0.2, 0.3, 0.4}));
    CHECK(m.vertices.size() == 8);
    CHECK(m.triangles.size() == 12);
    CHECK(mesh_volume(m) == doctest::Approx(0.024).epsilon(1e-12));
}

TEST_CASE("prism volumes equal their analytic values") {
    const double w = 0.4, h = 0.3, d = 0.25;
    SUBCASE("L prism") {
        const double tx = 0.1, ty = 0.12;
        const double area = w * ty + tx * (h - ty);
        CHECK(std::fabs(mesh_volume(gen_shape(spec(ShapeKind::LPrism, {w, h, d, tx, ty}))) - area * d) < 1e-9);
    }
    SUBCASE("T prism") {
        const double stem = 0.1, bar = 0.08;
        const double area = w * bar + stem * (h - bar);
        CHECK(std::fabs(mesh_volume(gen_shape(spec(ShapeKind::TPrism, {w, h, d, stem, bar}))) - area * d) < 1e-9);
    }
    SUBCASE("rectangular tube") {
        const double wall = 0.05;
        const double want = h * (w * d - (w - 2 * wall) * (d - 2 * wall));
        CHECK(std::fabs(mesh_volume(gen_shape(spec(ShapeKind::HollowBox, {w, h, d, wall}))) - want) < 1e-9);
    }
    SUBCASE("cylinder is the inscribed 32-gon prism") {
        const double r = 0.1, ch = 0.3;
        const double area = 0.5 * kCylinderSegments * r * r * std::sin(2 * std::numbers::pi / kCylinderSegments);
        CHECK(std::fabs(mesh_volume(gen_shape(spec(ShapeKind::Cylinder, {r, ch}))) - area * ch) < 1e-9);
    }
}

TEST_CASE("procedural meshes are closed, outward and deterministic") {
    const std::vector<ShapeSpec> specs = {
        spec(ShapeKind::Cuboid, {0.2, 0.3, 0.4}),       spec(ShapeKind::LPrism, {0.3, 0.3, 0.2, 0.1, 0.1}),
        spec(ShapeKind::TPrism, {0.3, 0.3, 0.2, 0.1, 0.1}), spec(ShapeKind::Cylinder, {0.1, 0.2}),
        spec(ShapeKind::Sphere, {0.15}),                spec(ShapeKind::HollowBox, {0.3, 0.2, 0.3, 0.05}),
    };
    for (const auto& s : specs) {
        const auto m = gen_shape(s);
        CHECK(closed_and_oriented(m));
        CHECK(mesh_volume(m) > 0);
        CHECK(gen_shape(s) == m);
    }
}

TEST_CASE("invalid descriptors are rejected") {
    CHECK_THROWS_AS(gen_shape(spec(ShapeKind::Cuboid, {0.2, 0.3})), std::invalid_argument);
    CHECK_THROWS_AS(gen_shape(spec(ShapeKind::Cuboid, {0.2, -0.3, 0.1})), std::invalid_argument);
    CHECK_THROWS_AS(gen_shape(spec(ShapeKind::Sphere, {0.0})), std::invalid_argument);
    CHECK_THROWS_AS(gen_shape(spec(ShapeKind::LPrism, {0.2, 0.2, 0.2, 0.3, 0.1})), std::invalid_argument);
    CHECK_THROWS_AS(gen_shape(spec(ShapeKind::HollowBox, {0.2, 0.2, 0.2, 0.1})), std::invalid_argument);
    CHECK_THROWS_AS(parse_shape_kind("torus"), std::invalid_argument);
    for (const auto k : kProceduralKinds) CHECK(parse_shape_kind(to_string(k)) == k);
}

TEST_CASE("wavefront parsing") {
    const char* text =
        "# unit tetrahedron\n"
        "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\n"
        "vn 0 0 1\n"
        "f 1/1/1 3/1/1 2/1/1\nf 1 2 4\nf 1 4 3\nf 2 3 4\n";
    const auto m = parse_obj(text);
    CHECK(m.vertices.size() == 4);
    CHECK(m.triangles.size() == 4);
    CHECK(mesh_volume(m) == doctest::Approx(1.0 / 6.0));

    const auto quad = parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
    CHECK(quad.triangles.size() == 2);

    CHECK_THROWS(parse_obj("v 0 0\n"));
    CHECK_THROWS(parse_obj("v 0 0 0\nf 1 2 3\n"));

    const auto path = std::filesystem::temp_directory_path() / "packbench_test_tetra.obj";
    std::ofstream(path) << text;
    ShapeSpec file{"tet", ShapeKind::MeshFile, {}, 0, path.string()};
    CHECK(gen_shape(file) == m);
    std::filesystem::remove(path);
    CHECK_THROWS(load_obj(path));
}
