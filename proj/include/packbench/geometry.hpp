#pragma once

// Coordinate convention used throughout the library:
//   x = width  (left -> right)
//   y = height (bottom -> top)
//   z = depth  (back -> front)
// The box is the unit cube. Voxel (ix, iy, iz) covers the half-open cube
// [i/100, (i+1)/100) on each axis.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "packbench/rational.hpp"

namespace packbench {

inline constexpr int kVoxelsPerUnit = 100;

using RowBits = unsigned __int128;

struct Vec3 {
    double x = 0, y = 0, z = 0;
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;

    /// Throws std::invalid_argument on non-finite coordinates, out-of-range
    /// indices or an empty triangle list.
    void validate() const;

    friend bool operator==(const TriMesh&, const TriMesh&) = default;
};

struct Dims {
    int x = 0, y = 0, z = 0;
    friend bool operator==(const Dims&, const Dims&) = default;
    [[nodiscard]] int operator[](int axis) const { return axis == 0 ? x : axis == 1 ? y : z; }
};

using IntMat3 = std::array<std::array<int, 3>, 3>;

/// One of the 24 proper rotations of the cube.
///
/// Indices are assigned as 4 * down_face + yaw, where down_face names the
/// local face that ends up pointing towards -y:
///   0: -y (no tilt)   1: +y   2: -x   3: +x   4: -z   5: +z
/// and yaw is the number of quarter turns about the world y axis applied
/// after the tilt (counter-clockwise seen from above, +z towards +x).
/// Index 0 is the identity.
struct Rotation {
    int index = 0;
    IntMat3 matrix{};

    [[nodiscard]] std::array<int, 3> apply(const std::array<int, 3>& v) const;
};

inline constexpr int kRotationCount = 24;

const std::array<Rotation, kRotationCount>& rotation_group();

/// Index of rotation_group()[a] * rotation_group()[b].
int compose_rotations(int a, int b);
int inverse_rotation(int r);

/// Tight dims of a box with the given dims after rotation r.
Dims rotated_dims(const Dims& dims, int r);

/// Volume ratio of a scaled shape to its canonical shape.
class ScaleFactor {
public:
    /// The gene set {1/4, 1/2, 1, 2, 4}, in that order.
    static const std::array<ScaleFactor, 5>& gene_set();
    static ScaleFactor from_gene(int gene);
    /// Throws std::invalid_argument unless the ratio is in the gene set.
    static ScaleFactor from_ratio(const Rational& ratio);

    ScaleFactor() : ratio_(1) {}

    [[nodiscard]] const Rational& volume_ratio() const { return ratio_; }
    [[nodiscard]] int gene() const;

    friend bool operator==(const ScaleFactor&, const ScaleFactor&) = default;

private:
    explicit ScaleFactor(Rational r) : ratio_(r) {}
    Rational ratio_;
};

/// Linear factor for a volume ratio: s^(1/3).
double scale_linear(const ScaleFactor& s);

/// Dense, tight boolean occupancy of one shape.
///
/// Cells are stored with z fastest: index = (x * dy + y) * dz + z. For
/// grids no deeper than 100 voxels, each (x, y) column is also kept as a
/// bitmask over z for fast overlap tests.
class VoxelGrid {
public:
    /// Throws std::invalid_argument if the occupancy is empty, not tight or
    /// the cell vector has the wrong size.
    VoxelGrid(Dims dims, std::vector<std::uint8_t> cells);

    /// Builds a tight grid from a list of occupied cells (any integer
    /// coordinates; the result is shifted so its minimum corner is 0).
    static VoxelGrid from_cells(const std::vector<std::array<int, 3>>& cells);

    [[nodiscard]] const Dims& dims() const { return dims_; }
    [[nodiscard]] std::int64_t count() const { return count_; }
    [[nodiscard]] bool at(int x, int y, int z) const {
        return cells_[static_cast<std::size_t>((x * dims_.y + y) * dims_.z + z)] != 0;
    }
    [[nodiscard]] const std::vector<std::uint8_t>& cells() const { return cells_; }
    /// Z-column bitmask of (x, y); empty when dims().z > 100.
    [[nodiscard]] RowBits row(int x, int y) const {
        return rows_[static_cast<std::size_t>(x * dims_.y + y)];
    }
    [[nodiscard]] bool has_rows() const { return !rows_.empty(); }

    friend bool operator==(const VoxelGrid& a, const VoxelGrid& b) {
        return a.dims_ == b.dims_ && a.cells_ == b.cells_;
    }

private:
    Dims dims_;
    std::vector<std::uint8_t> cells_;
    std::vector<RowBits> rows_;
    std::int64_t count_ = 0;
};

class NonWatertightError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Solid voxelization by +z ray parity at voxel centers. The mesh is scaled
/// about its bounding-box center, then moved so the bounding-box minimum is
/// at the origin. Returns std::nullopt (oversized) when any tight dimension
/// exceeds 100 voxels. Throws NonWatertightError when more than 0.1% of the
/// cast rays see an odd number of crossings.
std::optional<VoxelGrid> voxelize(const TriMesh& mesh, const ScaleFactor& s);
std::optional<VoxelGrid> voxelize_linear(const TriMesh& mesh, double linear_factor);

/// Fallback for meshes that are not closed: 26-connected surface
/// voxelization, 6-connected exterior flood fill, interior = complement.
std::optional<VoxelGrid> voxelize_surface_fill(const TriMesh& mesh, double linear_factor);

/// voxelize_linear, falling back to voxelize_surface_fill on NonWatertightError.
std::optional<VoxelGrid> voxelize_robust(const TriMesh& mesh, double linear_factor);

/// Maps the occupied cells through the rotation about the grid center and
/// re-tightens. Exact bijection on cells.
VoxelGrid rotate_voxels(const VoxelGrid& g, const Rotation& r);

inline Dims bbox_dims(const VoxelGrid& g) { return g.dims(); }

/// Pads g into the centered 100^3 volume and averages each cell^3 block.
/// Output has (100/cell)^3 entries, block (bx, by, bz) at (bx*n + by)*n + bz.
/// cell must be one of 4, 5, 10, 20, 25, 50.
std::vector<double> pooled_occupancy(const VoxelGrid& g, int cell);
/// Same, for raw cells laid out like VoxelGrid (z fastest). Empty grids are allowed.
std::vector<double> pooled_occupancy(const Dims& d, const std::vector<std::uint8_t>& cells, int cell);

}  // namespace packbench
