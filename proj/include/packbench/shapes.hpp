#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "packbench/geometry.hpp"

namespace packbench {

enum class ShapeKind { Cuboid, LPrism, TPrism, Cylinder, Sphere, HollowBox, MeshFile };

inline constexpr std::array<ShapeKind, 6> kProceduralKinds = {
    ShapeKind::Cuboid,   ShapeKind::LPrism, ShapeKind::TPrism,
    ShapeKind::Cylinder, ShapeKind::Sphere, ShapeKind::HollowBox};

std::string_view to_string(ShapeKind kind);
ShapeKind parse_shape_kind(std::string_view name);

/// Procedural or file-backed shape description.
///
/// Parameters (box units) per kind:
///   cuboid      [w, h, d]
///   l_prism     [w, h, d, tx, ty]   L profile in xy (vertical arm tx wide,
///                                   foot ty tall), extruded along z
///   t_prism     [w, h, d, stem, bar] T profile in xy, bar on top
///   cylinder    [r, h]              axis along y, 32 segments
///   sphere      [r]                 16 stacks x 32 slices
///   hollow_box  [w, h, d, wall]     rectangular tube, open along y
///   mesh        (none)              Wavefront file at `mesh_path`
struct ShapeSpec {
    std::string id;
    ShapeKind kind = ShapeKind::Cuboid;
    std::vector<double> params;
    std::uint64_t seed = 0;
    std::string mesh_path;

    /// Throws std::invalid_argument on wrong arity or non-positive extents.
    void validate() const;

    friend bool operator==(const ShapeSpec&, const ShapeSpec&) = default;
};

inline constexpr int kCylinderSegments = 32;
inline constexpr int kSphereStacks = 16;
inline constexpr int kSphereSlices = 32;

/// Deterministic watertight mesh for a procedural spec, or the parsed file
/// for a mesh spec.
TriMesh gen_shape(const ShapeSpec& spec);

/// Reads `v x y z` / `f i j k` lines (1-based, `i/t/n` forms accepted,
/// polygons fan-triangulated); other lines are ignored.
TriMesh load_obj(const std::filesystem::path& path);
TriMesh parse_obj(std::string_view text);

/// Signed volume by the divergence theorem (sum of origin tetrahedra).
double mesh_volume(const TriMesh& mesh);

}  // namespace packbench
