#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "packbench/geometry.hpp"
#include "packbench/rational.hpp"
#include "packbench/shapes.hpp"

namespace packbench {

inline constexpr int kAnchorGrid = 25;
inline constexpr int kAnchorStride = kVoxelsPerUnit / kAnchorGrid;
inline constexpr std::int64_t kBoxVolume = std::int64_t{kVoxelsPerUnit} * kVoxelsPerUnit * kVoxelsPerUnit;

/// Cell of the 25^3 placement grid. A shape placed at an anchor has the
/// minimum corner of its (rotated, tight) grid at voxel 4 * (gx, gy, gz).
struct Anchor {
    int gx = 0, gy = 0, gz = 0;
    friend bool operator==(const Anchor&, const Anchor&) = default;
};

/// Bottom-left-back order: by height, then width offset, then depth offset.
inline bool blbf_less(const Anchor& a, const Anchor& b) {
    if (a.gy != b.gy) return a.gy < b.gy;
    if (a.gx != b.gx) return a.gx < b.gx;
    return a.gz < b.gz;
}

struct Placement {
    int shape_idx = 0;
    ScaleFactor scale;
    int rotation = 0;
    Anchor anchor;
    friend bool operator==(const Placement&, const Placement&) = default;
};

class InfeasiblePlacement : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 100^3 occupancy of the box plus the placements that produced it.
///
/// Cells are stored as one z-bitmask per (x, y) column. The column array is
/// shared between copies and only duplicated by place().
class BoxOccupancy {
public:
    using Columns = std::array<RowBits, kVoxelsPerUnit * kVoxelsPerUnit>;

    BoxOccupancy();

    [[nodiscard]] bool occupied(int x, int y, int z) const { return (column(x, y) >> z) & 1U; }
    [[nodiscard]] RowBits column(int x, int y) const { return (*columns_)[static_cast<std::size_t>(x * kVoxelsPerUnit + y)]; }
    [[nodiscard]] std::int64_t count() const { return count_; }
    [[nodiscard]] const std::vector<Placement>& placements() const { return placed_; }

    /// Dense 0/1 copy of the box, index (x * 100 + y) * 100 + z.
    [[nodiscard]] std::vector<std::uint8_t> dense() const;

    friend bool operator==(const BoxOccupancy& a, const BoxOccupancy& b) {
        return a.count_ == b.count_ && a.placed_ == b.placed_ && *a.columns_ == *b.columns_;
    }

private:
    friend BoxOccupancy place(const BoxOccupancy&, const VoxelGrid&, const Placement&);

    std::shared_ptr<const Columns> columns_;
    std::vector<Placement> placed_;
    std::int64_t count_ = 0;
};

/// In-bounds and overlap-free at the anchor.
bool feasible(const BoxOccupancy& box, const VoxelGrid& g, const Anchor& a);

/// Every feasible anchor, ascending in blbf_less order.
std::vector<Anchor> candidate_locations(const BoxOccupancy& box, const VoxelGrid& g);

/// First feasible anchor in blbf_less order.
std::optional<Anchor> blbf_location(const BoxOccupancy& box, const VoxelGrid& g);

/// Returns the box with g added at placement.anchor. Throws
/// InfeasiblePlacement if the placement is out of bounds or overlaps.
BoxOccupancy place(const BoxOccupancy& box, const VoxelGrid& g, const Placement& placement);

/// GA genome. Orders are 0-based pool indices; scales are gene indices into
/// ScaleFactor::gene_set(); rotations index rotation_group().
struct Chromosome {
    std::vector<int> order;
    std::vector<int> scales;
    std::vector<int> rotations;

    /// Throws std::invalid_argument unless the genome is valid for n shapes.
    void validate(std::size_t n) const;
    friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

struct Pack {
    std::vector<ShapeSpec> pool;
    std::vector<Placement> placements;
    Rational density;
    std::uint64_t seed = 0;
    int generations_run = 0;
    friend bool operator==(const Pack&, const Pack&) = default;
};

/// Voxel grids of a shape pool for every (scale, rotation), computed on
/// first use. Safe to share between threads.
class ShapeCatalog {
public:
    explicit ShapeCatalog(std::vector<ShapeSpec> pool);
    ShapeCatalog(const ShapeCatalog&) = delete;
    ShapeCatalog& operator=(const ShapeCatalog&) = delete;

    [[nodiscard]] const std::vector<ShapeSpec>& pool() const { return pool_; }
    [[nodiscard]] std::size_t size() const { return pool_.size(); }

    /// nullptr when the scaled shape does not fit in 100^3 voxels.
    [[nodiscard]] std::shared_ptr<const VoxelGrid> grid(int shape, int scale_gene, int rotation) const;

private:
    struct Entry {
        std::once_flag once;
        std::shared_ptr<const VoxelGrid> grid;
    };
    struct MeshEntry {
        std::once_flag once;
        TriMesh mesh;
    };

    std::vector<ShapeSpec> pool_;
    std::unique_ptr<MeshEntry[]> meshes_;
    std::unique_ptr<Entry[]> entries_;
};

/// Pack creator: shapes in chromosome order, scaled and rotated by their
/// genes, each put at its BLBF anchor or left out when none exists.
Pack create_pack(const ShapeCatalog& catalog, const Chromosome& c);
Pack create_pack(const std::vector<ShapeSpec>& pool, const Chromosome& c);

/// Placed voxels of create_pack, without building the Pack.
std::int64_t packed_volume(const ShapeCatalog& catalog, const Chromosome& c);

/// Sum of placed voxel counts over 10^6, recomputed from the shapes.
Rational density(const Pack& p);
Rational density(const Pack& p, const ShapeCatalog& catalog);

/// Replays the placements through place(); throws InfeasiblePlacement on the
/// first one that does not fit.
BoxOccupancy replay(const Pack& p, const ShapeCatalog& catalog);

}  // namespace packbench
