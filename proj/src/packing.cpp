#include "packbench/packing.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace packbench {

namespace {

constexpr int kGenes = 5;

bool fits_bounds(const Dims& d, const Anchor& a) {
    return a.gx >= 0 && a.gy >= 0 && a.gz >= 0 && a.gx < kAnchorGrid && a.gy < kAnchorGrid && a.gz < kAnchorGrid &&
           kAnchorStride * a.gx + d.x <= kVoxelsPerUnit && kAnchorStride * a.gy + d.y <= kVoxelsPerUnit &&
           kAnchorStride * a.gz + d.z <= kVoxelsPerUnit;
}

// Highest anchor index along an axis that keeps extent d inside the box; -1 if none.
int last_anchor(int d) { return d > kVoxelsPerUnit ? -1 : (kVoxelsPerUnit - d) / kAnchorStride; }

// Bitmask over gz in [0, gz_last] of anchors (gx, gy, gz) that do not overlap.
std::uint32_t free_depths(const BoxOccupancy& box, const VoxelGrid& g, int gx, int gy, int gz_last) {
    std::uint32_t ok = (gz_last >= 31) ? ~0U : ((1U << (gz_last + 1)) - 1U);
    const Dims& d = g.dims();
    const int ox = kAnchorStride * gx;
    const int oy = kAnchorStride * gy;
    for (int sy = 0; sy < d.y; ++sy) {
        for (int sx = 0; sx < d.x; ++sx) {
            const RowBits m = g.row(sx, sy);
            if (m == 0) continue;
            const RowBits col = box.column(ox + sx, oy + sy);
            if (col == 0) continue;
            for (std::uint32_t rest = ok; rest != 0; rest &= rest - 1) {
                const int gz = __builtin_ctz(rest);
                if ((col >> (kAnchorStride * gz)) & m) ok &= ~(1U << gz);
            }
            if (ok == 0) return 0;
        }
    }
    return ok;
}

}  // namespace

BoxOccupancy::BoxOccupancy() : columns_(std::make_shared<const Columns>(Columns{})) {}

std::vector<std::uint8_t> BoxOccupancy::dense() const {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(kBoxVolume), 0);
    std::size_t i = 0;
    for (int x = 0; x < kVoxelsPerUnit; ++x)
        for (int y = 0; y < kVoxelsPerUnit; ++y) {
            const RowBits col = column(x, y);
            for (int z = 0; z < kVoxelsPerUnit; ++z, ++i) out[i] = static_cast<std::uint8_t>((col >> z) & 1U);
        }
    return out;
}

bool feasible(const BoxOccupancy& box, const VoxelGrid& g, const Anchor& a) {
    if (!g.has_rows() || !fits_bounds(g.dims(), a)) return false;
    const Dims& d = g.dims();
    const int ox = kAnchorStride * a.gx;
    const int oy = kAnchorStride * a.gy;
    const int oz = kAnchorStride * a.gz;
    for (int sy = 0; sy < d.y; ++sy) {
        for (int sx = 0; sx < d.x; ++sx) {
            if ((box.column(ox + sx, oy + sy) >> oz) & g.row(sx, sy)) return false;
        }
    }
    return true;
}

std::vector<Anchor> candidate_locations(const BoxOccupancy& box, const VoxelGrid& g) {
    std::vector<Anchor> out;
    if (!g.has_rows()) return out;
    const Dims& d = g.dims();
    const int gx_last = last_anchor(d.x);
    const int gy_last = last_anchor(d.y);
    const int gz_last = last_anchor(d.z);
    if (gx_last < 0 || gy_last < 0 || gz_last < 0) return out;
    for (int gy = 0; gy <= gy_last; ++gy) {
        for (int gx = 0; gx <= gx_last; ++gx) {
            for (std::uint32_t ok = free_depths(box, g, gx, gy, gz_last); ok != 0; ok &= ok - 1) {
                out.push_back({gx, gy, __builtin_ctz(ok)});
            }
        }
    }
    return out;
}

std::optional<Anchor> blbf_location(const BoxOccupancy& box, const VoxelGrid& g) {
    if (!g.has_rows()) return std::nullopt;
    const Dims& d = g.dims();
    const int gx_last = last_anchor(d.x);
    const int gy_last = last_anchor(d.y);
    const int gz_last = last_anchor(d.z);
    if (gx_last < 0 || gy_last < 0 || gz_last < 0) return std::nullopt;
    for (int gy = 0; gy <= gy_last; ++gy) {
        for (int gx = 0; gx <= gx_last; ++gx) {
            if (const std::uint32_t ok = free_depths(box, g, gx, gy, gz_last); ok != 0) {
                return Anchor{gx, gy, __builtin_ctz(ok)};
            }
        }
    }
    return std::nullopt;
}

BoxOccupancy place(const BoxOccupancy& box, const VoxelGrid& g, const Placement& placement) {
    const Anchor& a = placement.anchor;
    if (!feasible(box, g, a)) {
        throw InfeasiblePlacement("shape " + std::to_string(placement.shape_idx) + " does not fit at anchor (" +
                                  std::to_string(a.gx) + "," + std::to_string(a.gy) + "," + std::to_string(a.gz) + ")");
    }
    auto columns = std::make_shared<BoxOccupancy::Columns>(*box.columns_);
    const Dims& d = g.dims();
    for (int sx = 0; sx < d.x; ++sx) {
        for (int sy = 0; sy < d.y; ++sy) {
            const auto idx = static_cast<std::size_t>((kAnchorStride * a.gx + sx) * kVoxelsPerUnit + kAnchorStride * a.gy + sy);
            (*columns)[idx] |= g.row(sx, sy) << (kAnchorStride * a.gz);
        }
    }
    BoxOccupancy out;
    out.columns_ = std::move(columns);
    out.placed_ = box.placed_;
    out.placed_.push_back(placement);
    out.count_ = box.count_ + g.count();
    return out;
}

void Chromosome::validate(std::size_t n) const {
    if (order.size() != n || scales.size() != n || rotations.size() != n) {
        throw std::invalid_argument("chromosome length does not match pool size " + std::to_string(n));
    }
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) {
        if (sorted[i] != static_cast<int>(i)) throw std::invalid_argument("chromosome order is not a permutation");
    }
    for (const int s : scales) {
        if (s < 0 || s >= kGenes) throw std::invalid_argument("scale gene out of range");
    }
    for (const int r : rotations) {
        if (r < 0 || r >= kRotationCount) throw std::invalid_argument("rotation gene out of range");
    }
}

ShapeCatalog::ShapeCatalog(std::vector<ShapeSpec> pool)
    : pool_(std::move(pool)),
      meshes_(std::make_unique<MeshEntry[]>(pool_.size())),
      entries_(std::make_unique<Entry[]>(pool_.size() * kGenes * kRotationCount)) {}

std::shared_ptr<const VoxelGrid> ShapeCatalog::grid(int shape, int scale_gene, int rotation) const {
    if (shape < 0 || static_cast<std::size_t>(shape) >= pool_.size()) throw std::out_of_range("shape index out of range");
    if (scale_gene < 0 || scale_gene >= kGenes) throw std::out_of_range("scale gene out of range");
    if (rotation < 0 || rotation >= kRotationCount) throw std::out_of_range("rotation out of range");
    Entry& e = entries_[(static_cast<std::size_t>(shape) * kGenes + scale_gene) * kRotationCount + rotation];
    std::call_once(e.once, [&] {
        if (rotation != 0) {
            if (auto base = grid(shape, scale_gene, 0)) {
                e.grid = std::make_shared<const VoxelGrid>(rotate_voxels(*base, rotation_group()[rotation]));
            }
            return;
        }
        MeshEntry& m = meshes_[static_cast<std::size_t>(shape)];
        std::call_once(m.once, [&] { m.mesh = gen_shape(pool_[static_cast<std::size_t>(shape)]); });
        if (auto g = voxelize_robust(m.mesh, scale_linear(ScaleFactor::from_gene(scale_gene)))) {
            e.grid = std::make_shared<const VoxelGrid>(std::move(*g));
        }
    });
    return e.grid;
}

namespace {

template <typename OnPlace>
BoxOccupancy run_pack_creator(const ShapeCatalog& catalog, const Chromosome& c, OnPlace&& on_place) {
    c.validate(catalog.size());
    BoxOccupancy box;
    for (std::size_t i = 0; i < c.order.size(); ++i) {
        const int shape = c.order[i];
        const auto g = catalog.grid(shape, c.scales[i], c.rotations[i]);
        if (!g) continue;  // oversized: left outside
        const auto anchor = blbf_location(box, *g);
        if (!anchor) continue;
        const Placement p{shape, ScaleFactor::from_gene(c.scales[i]), c.rotations[i], *anchor};
        box = place(box, *g, p);
        on_place(p);
    }
    return box;
}

}  // namespace

Pack create_pack(const ShapeCatalog& catalog, const Chromosome& c) {
    Pack pack;
    pack.pool = catalog.pool();
    const BoxOccupancy box = run_pack_creator(catalog, c, [&](const Placement& p) { pack.placements.push_back(p); });
    pack.density = Rational(box.count(), kBoxVolume);
    return pack;
}

Pack create_pack(const std::vector<ShapeSpec>& pool, const Chromosome& c) {
    const ShapeCatalog catalog(pool);
    return create_pack(catalog, c);
}

std::int64_t packed_volume(const ShapeCatalog& catalog, const Chromosome& c) {
    return run_pack_creator(catalog, c, [](const Placement&) {}).count();
}

Rational density(const Pack& p, const ShapeCatalog& catalog) {
    std::int64_t total = 0;
    for (const auto& pl : p.placements) {
        const auto g = catalog.grid(pl.shape_idx, pl.scale.gene(), pl.rotation);
        if (!g) throw std::invalid_argument("pack places an oversized shape");
        total += g->count();
    }
    return Rational(total, kBoxVolume);
}

Rational density(const Pack& p) {
    const ShapeCatalog catalog(p.pool);
    return density(p, catalog);
}

BoxOccupancy replay(const Pack& p, const ShapeCatalog& catalog) {
    BoxOccupancy box;
    for (const auto& pl : p.placements) {
        const auto g = catalog.grid(pl.shape_idx, pl.scale.gene(), pl.rotation);
        if (!g) throw InfeasiblePlacement("placed shape " + std::to_string(pl.shape_idx) + " is oversized");
        box = place(box, *g, pl);
    }
    return box;
}

}  // namespace packbench
