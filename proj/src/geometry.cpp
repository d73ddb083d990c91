#include "packbench/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace packbench {

// ---------------------------------------------------------------------------
// TriMesh

void TriMesh::validate() const {
    if (triangles.empty()) throw std::invalid_argument("mesh has no triangles");
    for (const auto& v : vertices) {
        if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
            throw std::invalid_argument("mesh has a non-finite vertex");
        }
    }
    const int n = static_cast<int>(vertices.size());
    for (const auto& t : triangles) {
        for (const int i : t) {
            if (i < 0 || i >= n) {
                throw std::invalid_argument("triangle index " + std::to_string(i) + " out of range");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Rotations

namespace {

IntMat3 multiply(const IntMat3& a, const IntMat3& b) {
    IntMat3 c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
    return c;
}

constexpr IntMat3 kIdentity = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

// Tilts that bring the named local face to -y.
constexpr std::array<IntMat3, 6> kTilts = {{
    {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}},     // -y down
    {{{1, 0, 0}, {0, -1, 0}, {0, 0, -1}}},   // +y down: half turn about x
    {{{0, -1, 0}, {1, 0, 0}, {0, 0, 1}}},    // -x down: +90 about z
    {{{0, 1, 0}, {-1, 0, 0}, {0, 0, 1}}},    // +x down: -90 about z
    {{{1, 0, 0}, {0, 0, 1}, {0, -1, 0}}},    // -z down: -90 about x
    {{{1, 0, 0}, {0, 0, -1}, {0, 1, 0}}},    // +z down: +90 about x
}};

constexpr IntMat3 kYaw = {{{0, 0, 1}, {0, 1, 0}, {-1, 0, 0}}};

std::array<Rotation, kRotationCount> build_group() {
    std::array<Rotation, kRotationCount> group{};
    for (int face = 0; face < 6; ++face) {
        IntMat3 yaw = kIdentity;
        for (int q = 0; q < 4; ++q) {
            const int index = 4 * face + q;
            group[index] = Rotation{index, multiply(yaw, kTilts[face])};
            yaw = multiply(kYaw, yaw);
        }
    }
    return group;
}

int find_rotation(const IntMat3& m) {
    const auto& group = rotation_group();
    for (const auto& r : group) {
        if (r.matrix == m) return r.index;
    }
    throw std::logic_error("matrix is not a cube rotation");
}

struct RotationTables {
    std::array<std::array<int, kRotationCount>, kRotationCount> compose{};
    std::array<int, kRotationCount> inverse{};
};

const RotationTables& rotation_tables() {
    static const RotationTables tables = [] {
        RotationTables t;
        const auto& group = rotation_group();
        for (int a = 0; a < kRotationCount; ++a) {
            for (int b = 0; b < kRotationCount; ++b) {
                t.compose[a][b] = find_rotation(multiply(group[a].matrix, group[b].matrix));
                if (t.compose[a][b] == 0) t.inverse[a] = b;
            }
        }
        return t;
    }();
    return tables;
}

}  // namespace

std::array<int, 3> Rotation::apply(const std::array<int, 3>& v) const {
    std::array<int, 3> out{};
    for (int i = 0; i < 3; ++i) out[i] = matrix[i][0] * v[0] + matrix[i][1] * v[1] + matrix[i][2] * v[2];
    return out;
}

const std::array<Rotation, kRotationCount>& rotation_group() {
    static const auto group = build_group();
    return group;
}

int compose_rotations(int a, int b) { return rotation_tables().compose.at(a).at(b); }

int inverse_rotation(int r) { return rotation_tables().inverse.at(r); }

Dims rotated_dims(const Dims& dims, int r) {
    const auto& m = rotation_group().at(r).matrix;
    std::array<int, 3> out{};
    for (int i = 0; i < 3; ++i) {
        out[i] = std::abs(m[i][0]) * dims.x + std::abs(m[i][1]) * dims.y + std::abs(m[i][2]) * dims.z;
    }
    return {out[0], out[1], out[2]};
}

// ---------------------------------------------------------------------------
// Scale factors

const std::array<ScaleFactor, 5>& ScaleFactor::gene_set() {
    static const std::array<ScaleFactor, 5> set = {
        ScaleFactor(Rational(1, 4)), ScaleFactor(Rational(1, 2)), ScaleFactor(Rational(1)),
        ScaleFactor(Rational(2)), ScaleFactor(Rational(4))};
    return set;
}

ScaleFactor ScaleFactor::from_gene(int gene) {
    if (gene < 0 || gene >= 5) throw std::invalid_argument("scale gene out of range");
    return gene_set()[gene];
}

ScaleFactor ScaleFactor::from_ratio(const Rational& ratio) {
    for (const auto& s : gene_set()) {
        if (s.ratio_ == ratio) return s;
    }
    throw std::invalid_argument("scale " + ratio.to_string() + " is not in {1/4, 1/2, 1, 2, 4}");
}

int ScaleFactor::gene() const {
    const auto& set = gene_set();
    for (int i = 0; i < 5; ++i) {
        if (set[i] == *this) return i;
    }
    throw std::logic_error("scale factor outside the gene set");
}

double scale_linear(const ScaleFactor& s) { return std::cbrt(s.volume_ratio().to_double()); }

// ---------------------------------------------------------------------------
// VoxelGrid

VoxelGrid::VoxelGrid(Dims dims, std::vector<std::uint8_t> cells) : dims_(dims), cells_(std::move(cells)) {
    if (dims_.x < 1 || dims_.y < 1 || dims_.z < 1) throw std::invalid_argument("voxel grid dims must be >= 1");
    const auto expected = static_cast<std::size_t>(dims_.x) * dims_.y * dims_.z;
    if (cells_.size() != expected) throw std::invalid_argument("voxel grid cell count does not match dims");

    std::array<int, 3> lo = {dims_.x, dims_.y, dims_.z};
    std::array<int, 3> hi = {-1, -1, -1};
    std::size_t i = 0;
    for (int x = 0; x < dims_.x; ++x) {
        for (int y = 0; y < dims_.y; ++y) {
            for (int z = 0; z < dims_.z; ++z, ++i) {
                if (cells_[i] == 0) continue;
                cells_[i] = 1;
                ++count_;
                lo = {std::min(lo[0], x), std::min(lo[1], y), std::min(lo[2], z)};
                hi = {std::max(hi[0], x), std::max(hi[1], y), std::max(hi[2], z)};
            }
        }
    }
    if (count_ == 0) throw std::invalid_argument("voxel grid is empty");
    if (lo != std::array<int, 3>{0, 0, 0} || hi != std::array<int, 3>{dims_.x - 1, dims_.y - 1, dims_.z - 1}) {
        throw std::invalid_argument("voxel grid is not tight");
    }

    if (dims_.z <= 128) {
        rows_.assign(static_cast<std::size_t>(dims_.x) * dims_.y, 0);
        i = 0;
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            RowBits bits = 0;
            for (int z = 0; z < dims_.z; ++z, ++i) {
                if (cells_[i]) bits |= RowBits{1} << z;
            }
            rows_[r] = bits;
        }
    }
}

VoxelGrid VoxelGrid::from_cells(const std::vector<std::array<int, 3>>& cells) {
    if (cells.empty()) throw std::invalid_argument("voxel grid is empty");
    std::array<int, 3> lo = cells.front();
    std::array<int, 3> hi = cells.front();
    for (const auto& c : cells) {
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], c[a]);
            hi[a] = std::max(hi[a], c[a]);
        }
    }
    const Dims dims{hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1};
    std::vector<std::uint8_t> dense(static_cast<std::size_t>(dims.x) * dims.y * dims.z, 0);
    for (const auto& c : cells) {
        dense[static_cast<std::size_t>(((c[0] - lo[0]) * dims.y + (c[1] - lo[1])) * dims.z + (c[2] - lo[2]))] = 1;
    }
    return VoxelGrid(dims, std::move(dense));
}

// ---------------------------------------------------------------------------
// Voxelization

namespace {

struct Scaled {
    std::vector<Vec3> vertices;
    Vec3 extent;
};

Scaled scale_to_origin(const TriMesh& mesh, double k) {
    mesh.validate();
    if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("linear scale factor must be positive");
    Vec3 lo{INFINITY, INFINITY, INFINITY};
    Vec3 hi{-INFINITY, -INFINITY, -INFINITY};
    for (const auto& t : mesh.triangles) {
        for (const int i : t) {
            const auto& v = mesh.vertices[static_cast<std::size_t>(i)];
            lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
            hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
        }
    }
    const Vec3 center{(lo.x + hi.x) / 2, (lo.y + hi.y) / 2, (lo.z + hi.z) / 2};
    const Vec3 half{(hi.x - lo.x) * k / 2, (hi.y - lo.y) * k / 2, (hi.z - lo.z) * k / 2};
    Scaled out;
    out.extent = {2 * half.x, 2 * half.y, 2 * half.z};
    out.vertices.reserve(mesh.vertices.size());
    for (const auto& v : mesh.vertices) {
        out.vertices.push_back({(v.x - center.x) * k + half.x, (v.y - center.y) * k + half.y,
                                (v.z - center.z) * k + half.z});
    }
    return out;
}

int cells_for_extent(double extent) {
    return std::max(1, static_cast<int>(std::ceil(extent * kVoxelsPerUnit)) + 1);
}

struct P2 {
    double x, y;
};

bool lex_less(const P2& a, const P2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

// Edge function of p against the directed edge u -> v (positive on the
// left). Evaluated from the lexicographically smaller endpoint so that the
// two triangles sharing an edge see bit-identical magnitudes.
double edge_fn(const P2& u, const P2& v, const P2& p) {
    if (lex_less(u, v)) return (v.x - u.x) * (p.y - u.y) - (v.y - u.y) * (p.x - u.x);
    return -((u.x - v.x) * (p.y - v.y) - (u.y - v.y) * (p.x - v.x));
}

// Half-open ownership of points exactly on an edge: exactly one of u->v and
// v->u owns them.
bool owns_boundary(const P2& u, const P2& v) {
    const double dx = v.x - u.x;
    const double dy = v.y - u.y;
    return dy > 0 || (dy == 0 && dx < 0);
}

bool inside_edge(const P2& u, const P2& v, double e) { return e > 0 || (e == 0 && owns_boundary(u, v)); }

std::optional<VoxelGrid> tighten_dense(int nx, int ny, int nz, const std::vector<std::uint8_t>& dense) {
    std::array<int, 3> lo = {nx, ny, nz};
    std::array<int, 3> hi = {-1, -1, -1};
    std::size_t i = 0;
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
            for (int z = 0; z < nz; ++z, ++i) {
                if (!dense[i]) continue;
                lo = {std::min(lo[0], x), std::min(lo[1], y), std::min(lo[2], z)};
                hi = {std::max(hi[0], x), std::max(hi[1], y), std::max(hi[2], z)};
            }
    if (hi[0] < 0) throw std::invalid_argument("shape occupies no voxel centers");
    const Dims dims{hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1};
    if (dims.x > kVoxelsPerUnit || dims.y > kVoxelsPerUnit || dims.z > kVoxelsPerUnit) return std::nullopt;
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(dims.x) * dims.y * dims.z, 0);
    for (int x = 0; x < dims.x; ++x)
        for (int y = 0; y < dims.y; ++y)
            for (int z = 0; z < dims.z; ++z) {
                cells[static_cast<std::size_t>((x * dims.y + y) * dims.z + z)] =
                    dense[static_cast<std::size_t>(((x + lo[0]) * ny + (y + lo[1])) * nz + (z + lo[2]))];
            }
    return VoxelGrid(dims, std::move(cells));
}

}  // namespace

std::optional<VoxelGrid> voxelize(const TriMesh& mesh, const ScaleFactor& s) {
    return voxelize_linear(mesh, scale_linear(s));
}

std::optional<VoxelGrid> voxelize_linear(const TriMesh& mesh, double linear_factor) {
    const Scaled scaled = scale_to_origin(mesh, linear_factor);
    const int nx = cells_for_extent(scaled.extent.x);
    const int ny = cells_for_extent(scaled.extent.y);
    const int nz = cells_for_extent(scaled.extent.z);
    constexpr double inv = 1.0 / kVoxelsPerUnit;

    std::vector<std::vector<double>> hits(static_cast<std::size_t>(nx) * ny);
    for (const auto& t : mesh.triangles) {
        const Vec3& va = scaled.vertices[static_cast<std::size_t>(t[0])];
        Vec3 vb = scaled.vertices[static_cast<std::size_t>(t[1])];
        Vec3 vc = scaled.vertices[static_cast<std::size_t>(t[2])];
        P2 a{va.x, va.y};
        P2 b{vb.x, vb.y};
        P2 c{vc.x, vc.y};
        double area = edge_fn(a, b, c);
        if (area == 0) continue;  // parallel to the ray
        if (area < 0) {
            std::swap(b, c);
            std::swap(vb, vc);
            area = -area;
        }
        const double min_x = std::min({a.x, b.x, c.x});
        const double max_x = std::max({a.x, b.x, c.x});
        const double min_y = std::min({a.y, b.y, c.y});
        const double max_y = std::max({a.y, b.y, c.y});
        const int i0 = std::max(0, static_cast<int>(std::floor(min_x * kVoxelsPerUnit - 0.5)));
        const int i1 = std::min(nx - 1, static_cast<int>(std::ceil(max_x * kVoxelsPerUnit - 0.5)));
        const int j0 = std::max(0, static_cast<int>(std::floor(min_y * kVoxelsPerUnit - 0.5)));
        const int j1 = std::min(ny - 1, static_cast<int>(std::ceil(max_y * kVoxelsPerUnit - 0.5)));
        for (int i = i0; i <= i1; ++i) {
            for (int j = j0; j <= j1; ++j) {
                const P2 p{(i + 0.5) * inv, (j + 0.5) * inv};
                const double ea = edge_fn(b, c, p);
                if (!inside_edge(b, c, ea)) continue;
                const double eb = edge_fn(c, a, p);
                if (!inside_edge(c, a, eb)) continue;
                const double ec = edge_fn(a, b, p);
                if (!inside_edge(a, b, ec)) continue;
                const double z = (ea * va.z + eb * vb.z + ec * vc.z) / area;
                hits[static_cast<std::size_t>(i * ny + j)].push_back(z);
            }
        }
    }

    std::size_t ambiguous = 0;
    std::vector<std::uint8_t> dense(static_cast<std::size_t>(nx) * ny * nz, 0);
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            auto& column = hits[static_cast<std::size_t>(i * ny + j)];
            if (column.empty()) continue;
            if (column.size() % 2 != 0) {
                ++ambiguous;
                continue;
            }
            std::sort(column.begin(), column.end());
            std::size_t below = 0;
            for (int k = 0; k < nz; ++k) {
                const double zc = (k + 0.5) * inv;
                while (below < column.size() && column[below] < zc) ++below;
                if (below % 2 == 1) dense[static_cast<std::size_t>((i * ny + j) * nz + k)] = 1;
            }
        }
    }
    const std::size_t rays = static_cast<std::size_t>(nx) * ny;
    if (static_cast<double>(ambiguous) > 0.001 * static_cast<double>(rays)) {
        throw NonWatertightError("ray parity ambiguous on " + std::to_string(ambiguous) + " of " +
                                 std::to_string(rays) + " rays");
    }
    return tighten_dense(nx, ny, nz, dense);
}

std::optional<VoxelGrid> voxelize_surface_fill(const TriMesh& mesh, double linear_factor) {
    const Scaled scaled = scale_to_origin(mesh, linear_factor);
    // One voxel of padding on every side so the exterior is connected.
    const int nx = cells_for_extent(scaled.extent.x) + 2;
    const int ny = cells_for_extent(scaled.extent.y) + 2;
    const int nz = cells_for_extent(scaled.extent.z) + 2;
    auto index = [&](int x, int y, int z) { return static_cast<std::size_t>((x * ny + y) * nz + z); };
    // Cells own the half-open interval (k, k + 1], so faces on lattice planes
    // mark the cell inside the shape, matching the center rule of the parity pass.
    auto cell_of = [](double v, int n) {
        return std::clamp(static_cast<int>(std::ceil(v * kVoxelsPerUnit - 1e-9)), 1, n - 2);
    };

    std::vector<std::uint8_t> surface(static_cast<std::size_t>(nx) * ny * nz, 0);
    for (const auto& t : mesh.triangles) {
        const Vec3& a = scaled.vertices[static_cast<std::size_t>(t[0])];
        const Vec3& b = scaled.vertices[static_cast<std::size_t>(t[1])];
        const Vec3& c = scaled.vertices[static_cast<std::size_t>(t[2])];
        auto len = [](const Vec3& p, const Vec3& q) {
            return std::sqrt((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y) + (p.z - q.z) * (p.z - q.z));
        };
        const double longest = std::max({len(a, b), len(b, c), len(c, a)});
        // Samples closer than half a voxel give a 26-connected surface.
        const int steps = static_cast<int>(std::ceil(longest * kVoxelsPerUnit * 2.0)) + 1;
        for (int u = 0; u <= steps; ++u) {
            for (int v = 0; v <= steps - u; ++v) {
                const double s = static_cast<double>(u) / steps;
                const double r = static_cast<double>(v) / steps;
                const Vec3 p{a.x + (b.x - a.x) * s + (c.x - a.x) * r, a.y + (b.y - a.y) * s + (c.y - a.y) * r,
                             a.z + (b.z - a.z) * s + (c.z - a.z) * r};
                surface[index(cell_of(p.x, nx), cell_of(p.y, ny), cell_of(p.z, nz))] = 1;
            }
        }
    }

    std::vector<std::uint8_t> exterior(surface.size(), 0);
    std::deque<std::array<int, 3>> queue;
    queue.push_back({0, 0, 0});
    exterior[index(0, 0, 0)] = 1;
    constexpr std::array<std::array<int, 3>, 6> kSteps = {
        {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};
    while (!queue.empty()) {
        const auto [x, y, z] = queue.front();
        queue.pop_front();
        for (const auto& d : kSteps) {
            const int qx = x + d[0];
            const int qy = y + d[1];
            const int qz = z + d[2];
            if (qx < 0 || qy < 0 || qz < 0 || qx >= nx || qy >= ny || qz >= nz) continue;
            const auto q = index(qx, qy, qz);
            if (exterior[q] || surface[q]) continue;
            exterior[q] = 1;
            queue.push_back({qx, qy, qz});
        }
    }
    std::vector<std::uint8_t> solid(surface.size());
    for (std::size_t i = 0; i < solid.size(); ++i) solid[i] = exterior[i] ? 0 : 1;
    return tighten_dense(nx, ny, nz, solid);
}

std::optional<VoxelGrid> voxelize_robust(const TriMesh& mesh, double linear_factor) {
    try {
        return voxelize_linear(mesh, linear_factor);
    } catch (const NonWatertightError&) {
        return voxelize_surface_fill(mesh, linear_factor);
    }
}

// ---------------------------------------------------------------------------
// Rotation and pooling of voxel grids

VoxelGrid rotate_voxels(const VoxelGrid& g, const Rotation& r) {
    if (r.index == 0) return g;
    const Dims& d = g.dims();
    const Dims nd = rotated_dims(d, r.index);
    std::vector<std::uint8_t> cells(g.cells().size(), 0);
    std::size_t i = 0;
    for (int x = 0; x < d.x; ++x) {
        for (int y = 0; y < d.y; ++y) {
            for (int z = 0; z < d.z; ++z, ++i) {
                if (!g.cells()[i]) continue;
                // Doubled coordinates of the cell center relative to the grid center.
                const auto w = r.apply({2 * x + 1 - d.x, 2 * y + 1 - d.y, 2 * z + 1 - d.z});
                const int nx = (w[0] + nd.x - 1) / 2;
                const int ny = (w[1] + nd.y - 1) / 2;
                const int nz = (w[2] + nd.z - 1) / 2;
                cells[static_cast<std::size_t>((nx * nd.y + ny) * nd.z + nz)] = 1;
            }
        }
    }
    return VoxelGrid(nd, std::move(cells));
}

std::vector<double> pooled_occupancy(const VoxelGrid& g, int cell) { return pooled_occupancy(g.dims(), g.cells(), cell); }

std::vector<double> pooled_occupancy(const Dims& d, const std::vector<std::uint8_t>& cells, int cell) {
    constexpr std::array<int, 6> kAllowed = {4, 5, 10, 20, 25, 50};
    if (std::find(kAllowed.begin(), kAllowed.end(), cell) == kAllowed.end()) {
        throw std::invalid_argument("pooling cell " + std::to_string(cell) + " must be one of 4, 5, 10, 20, 25, 50");
    }
    if (cells.size() != static_cast<std::size_t>(d.x) * d.y * d.z) throw std::invalid_argument("cell count does not match dims");
    if (d.x > kVoxelsPerUnit || d.y > kVoxelsPerUnit || d.z > kVoxelsPerUnit) {
        throw std::invalid_argument("grid does not fit in the 100^3 volume");
    }
    const int n = kVoxelsPerUnit / cell;
    const std::array<int, 3> offset = {(kVoxelsPerUnit - d.x) / 2, (kVoxelsPerUnit - d.y) / 2,
                                       (kVoxelsPerUnit - d.z) / 2};
    std::vector<double> out(static_cast<std::size_t>(n) * n * n, 0.0);
    std::size_t i = 0;
    for (int x = 0; x < d.x; ++x) {
        for (int y = 0; y < d.y; ++y) {
            for (int z = 0; z < d.z; ++z, ++i) {
                if (!cells[i]) continue;
                const int bx = (x + offset[0]) / cell;
                const int by = (y + offset[1]) / cell;
                const int bz = (z + offset[2]) / cell;
                out[static_cast<std::size_t>((bx * n + by) * n + bz)] += 1.0;
            }
        }
    }
    const double volume = static_cast<double>(cell) * cell * cell;
    for (auto& v : out) v /= volume;
    return out;
}

}  // namespace packbench
