#include "packbench/shapes.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace packbench {

namespace {

struct P2 {
    double u, v;
};

constexpr std::array<std::pair<ShapeKind, std::string_view>, 7> kKindNames = {{
    {ShapeKind::Cuboid, "cuboid"},
    {ShapeKind::LPrism, "l_prism"},
    {ShapeKind::TPrism, "t_prism"},
    {ShapeKind::Cylinder, "cylinder"},
    {ShapeKind::Sphere, "sphere"},
    {ShapeKind::HollowBox, "hollow_box"},
    {ShapeKind::MeshFile, "mesh"},
}};

std::size_t arity(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::Cuboid: return 3;
        case ShapeKind::LPrism: return 5;
        case ShapeKind::TPrism: return 5;
        case ShapeKind::Cylinder: return 2;
        case ShapeKind::Sphere: return 1;
        case ShapeKind::HollowBox: return 4;
        case ShapeKind::MeshFile: return 0;
    }
    return 0;
}

class MeshBuilder {
public:
    // (u, v, w) -> world through a cyclic axis permutation, so windings are kept.
    explicit MeshBuilder(int extrude_axis) : axis_(extrude_axis) {}

    int vertex(double u, double v, double w) {
        Vec3 p;
        switch (axis_) {
            case 2: p = {u, v, w}; break;
            case 1: p = {v, w, u}; break;
            default: p = {w, u, v}; break;
        }
        mesh_.vertices.push_back(p);
        return static_cast<int>(mesh_.vertices.size()) - 1;
    }

    void tri(int a, int b, int c) { mesh_.triangles.push_back({a, b, c}); }

    void quad(int a, int b, int c, int d) {
        tri(a, b, c);
        tri(a, c, d);
    }

    TriMesh finish() && {
        if (mesh_volume(mesh_) < 0) {
            for (auto& t : mesh_.triangles) std::swap(t[1], t[2]);
        }
        return std::move(mesh_);
    }

private:
    int axis_;
    TriMesh mesh_;
};

double cross(const P2& o, const P2& a, const P2& b) {
    return (a.u - o.u) * (b.v - o.v) - (a.v - o.v) * (b.u - o.u);
}

// Ear clipping of a simple counter-clockwise polygon.
std::vector<std::array<int, 3>> triangulate(const std::vector<P2>& poly) {
    std::vector<int> idx(poly.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::vector<std::array<int, 3>> out;
    while (idx.size() > 3) {
        bool clipped = false;
        const std::size_t n = idx.size();
        for (std::size_t i = 0; i < n && !clipped; ++i) {
            const int a = idx[(i + n - 1) % n];
            const int b = idx[i];
            const int c = idx[(i + 1) % n];
            if (cross(poly[a], poly[b], poly[c]) <= 0) continue;
            bool contains = false;
            for (const int k : idx) {
                if (k == a || k == b || k == c) continue;
                if (cross(poly[a], poly[b], poly[k]) >= 0 && cross(poly[b], poly[c], poly[k]) >= 0 &&
                    cross(poly[c], poly[a], poly[k]) >= 0) {
                    contains = true;
                    break;
                }
            }
            if (contains) continue;
            out.push_back({a, b, c});
            idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
            clipped = true;
        }
        if (!clipped) throw std::logic_error("polygon is not simple");
    }
    out.push_back({idx[0], idx[1], idx[2]});
    return out;
}

TriMesh extrude(const std::vector<P2>& poly, double depth, int axis) {
    MeshBuilder b(axis);
    const int n = static_cast<int>(poly.size());
    std::vector<int> back(poly.size());
    std::vector<int> front(poly.size());
    for (int i = 0; i < n; ++i) back[i] = b.vertex(poly[i].u, poly[i].v, 0.0);
    for (int i = 0; i < n; ++i) front[i] = b.vertex(poly[i].u, poly[i].v, depth);
    for (const auto& t : triangulate(poly)) {
        b.tri(front[t[0]], front[t[1]], front[t[2]]);
        b.tri(back[t[0]], back[t[2]], back[t[1]]);
    }
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        b.quad(back[i], back[j], front[j], front[i]);
    }
    return std::move(b).finish();
}

TriMesh make_tube(double w, double h, double d, double wall) {
    // Rectangular ring in (u, v) = (z, x), extruded along y.
    MeshBuilder b(1);
    const std::array<P2, 4> outer = {{{0, 0}, {d, 0}, {d, w}, {0, w}}};
    const std::array<P2, 4> inner = {{{wall, wall}, {d - wall, wall}, {d - wall, w - wall}, {wall, w - wall}}};
    std::array<int, 4> ob{}, of{}, ib{}, inf{};
    for (int i = 0; i < 4; ++i) {
        ob[i] = b.vertex(outer[i].u, outer[i].v, 0.0);
        of[i] = b.vertex(outer[i].u, outer[i].v, h);
        ib[i] = b.vertex(inner[i].u, inner[i].v, 0.0);
        inf[i] = b.vertex(inner[i].u, inner[i].v, h);
    }
    for (int i = 0; i < 4; ++i) {
        const int j = (i + 1) % 4;
        b.quad(ob[i], ob[j], of[j], of[i]);      // outer walls
        b.quad(ib[j], ib[i], inf[i], inf[j]);    // inner walls face the hole
        b.quad(of[i], of[j], inf[j], inf[i]);    // top ring
        b.quad(ob[i], ib[i], ib[j], ob[j]);      // bottom ring
    }
    return std::move(b).finish();
}

TriMesh make_sphere(double r) {
    MeshBuilder b(2);
    const double pi = std::numbers::pi;
    const int top = b.vertex(r, 2 * r, r);
    std::vector<std::vector<int>> rings;
    for (int k = 1; k < kSphereStacks; ++k) {
        const double phi = pi * k / kSphereStacks;
        const double y = r + r * std::cos(phi);
        const double rr = r * std::sin(phi);
        std::vector<int> ring;
        for (int s = 0; s < kSphereSlices; ++s) {
            const double theta = 2 * pi * s / kSphereSlices;
            ring.push_back(b.vertex(r + rr * std::cos(theta), y, r + rr * std::sin(theta)));
        }
        rings.push_back(std::move(ring));
    }
    const int bottom = b.vertex(r, 0.0, r);
    for (int s = 0; s < kSphereSlices; ++s) {
        const int t = (s + 1) % kSphereSlices;
        b.tri(top, rings.front()[t], rings.front()[s]);
        b.tri(bottom, rings.back()[s], rings.back()[t]);
        for (std::size_t k = 0; k + 1 < rings.size(); ++k) {
            b.quad(rings[k][s], rings[k][t], rings[k + 1][t], rings[k + 1][s]);
        }
    }
    return std::move(b).finish();
}

}  // namespace

std::string_view to_string(ShapeKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

ShapeKind parse_shape_kind(std::string_view name) {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) return k;
    }
    throw std::invalid_argument("unknown shape kind '" + std::string(name) + "'");
}

void ShapeSpec::validate() const {
    if (kind == ShapeKind::MeshFile) {
        if (mesh_path.empty()) throw std::invalid_argument("mesh shape '" + id + "' has no path");
        return;
    }
    if (params.size() != arity(kind)) {
        throw std::invalid_argument("shape '" + id + "': " + std::string(to_string(kind)) + " takes " +
                                    std::to_string(arity(kind)) + " parameters");
    }
    for (const double p : params) {
        if (!(p > 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument("shape '" + id + "': extents must be positive");
        }
    }
    const auto& p = params;
    switch (kind) {
        case ShapeKind::LPrism:
            if (p[3] >= p[0] || p[4] >= p[1]) throw std::invalid_argument("shape '" + id + "': L arm too thick");
            break;
        case ShapeKind::TPrism:
            if (p[3] >= p[0] || p[4] >= p[1]) throw std::invalid_argument("shape '" + id + "': T stem/bar too large");
            break;
        case ShapeKind::HollowBox:
            if (2 * p[3] >= p[0] || 2 * p[3] >= p[2]) {
                throw std::invalid_argument("shape '" + id + "': tube wall too thick");
            }
            break;
        default: break;
    }
}

TriMesh gen_shape(const ShapeSpec& spec) {
    spec.validate();
    const auto& p = spec.params;
    switch (spec.kind) {
        case ShapeKind::Cuboid:
            return extrude({{0, 0}, {p[0], 0}, {p[0], p[1]}, {0, p[1]}}, p[2], 2);
        case ShapeKind::LPrism: {
            const double w = p[0], h = p[1], tx = p[3], ty = p[4];
            return extrude({{0, 0}, {w, 0}, {w, ty}, {tx, ty}, {tx, h}, {0, h}}, p[2], 2);
        }
        case ShapeKind::TPrism: {
            const double w = p[0], h = p[1], s = p[3], bar = p[4];
            const double l = (w - s) / 2, r = (w + s) / 2, neck = h - bar;
            return extrude({{l, 0}, {r, 0}, {r, neck}, {w, neck}, {w, h}, {0, h}, {0, neck}, {l, neck}}, p[2], 2);
        }
        case ShapeKind::Cylinder: {
            std::vector<P2> circle;
            const double r = p[0];
            for (int s = 0; s < kCylinderSegments; ++s) {
                const double theta = 2 * std::numbers::pi * s / kCylinderSegments;
                circle.push_back({r + r * std::cos(theta), r + r * std::sin(theta)});
            }
            return extrude(circle, p[1], 1);
        }
        case ShapeKind::Sphere: return make_sphere(p[0]);
        case ShapeKind::HollowBox: return make_tube(p[0], p[1], p[2], p[3]);
        case ShapeKind::MeshFile: return load_obj(spec.mesh_path);
    }
    throw std::logic_error("unhandled shape kind");
}

TriMesh parse_obj(std::string_view text) {
    TriMesh mesh;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            Vec3 v;
            if (!(ls >> v.x >> v.y >> v.z)) {
                throw std::invalid_argument("obj line " + std::to_string(line_no) + ": malformed vertex");
            }
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<int> face;
            std::string token;
            while (ls >> token) {
                const int raw = std::stoi(token.substr(0, token.find('/')));
                const int n = static_cast<int>(mesh.vertices.size());
                face.push_back(raw < 0 ? n + raw : raw - 1);
            }
            if (face.size() < 3) throw std::invalid_argument("obj line " + std::to_string(line_no) + ": face needs 3 vertices");
            for (std::size_t i = 1; i + 1 < face.size(); ++i) mesh.triangles.push_back({face[0], face[i], face[i + 1]});
        }
    }
    mesh.validate();
    return mesh;
}

TriMesh load_obj(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open mesh '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_obj(buf.str());
}

double mesh_volume(const TriMesh& mesh) {
    double v = 0.0;
    for (const auto& t : mesh.triangles) {
        const Vec3& a = mesh.vertices[static_cast<std::size_t>(t[0])];
        const Vec3& b = mesh.vertices[static_cast<std::size_t>(t[1])];
        const Vec3& c = mesh.vertices[static_cast<std::size_t>(t[2])];
        v += a.x * (b.y * c.z - b.z * c.y) - a.y * (b.x * c.z - b.z * c.x) + a.z * (b.x * c.y - b.y * c.x);
    }
    return v / 6.0;
}

}  // namespace packbench
