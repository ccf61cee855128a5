#pragma once

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "fsgkit/geometry/mesh.hpp"

// Procedural meshes used by the bundled assets and by the test suites.
namespace fsgkit::primitives {

inline TriangleMesh box(const Vec3& half_extents, const Vec3& center = Vec3::Zero()) {
    std::vector<Vec3> v;
    for (int i = 0; i < 8; ++i) {
        v.emplace_back(center.x() + ((i & 1) ? half_extents.x() : -half_extents.x()),
                       center.y() + ((i & 2) ? half_extents.y() : -half_extents.y()),
                       center.z() + ((i & 4) ? half_extents.z() : -half_extents.z()));
    }
    const std::vector<TriangleMesh::Triangle> t = {
        {0, 4, 6}, {0, 6, 2},  // -x
        {1, 3, 7}, {1, 7, 5},  // +x
        {0, 1, 5}, {0, 5, 4},  // -y
        {2, 6, 7}, {2, 7, 3},  // +y
        {0, 2, 3}, {0, 3, 1},  // -z
        {4, 5, 7}, {4, 7, 6},  // +z
    };
    return TriangleMesh(std::move(v), t);
}

inline TriangleMesh cube(double edge, const Vec3& center = Vec3::Zero()) {
    return box(Vec3::Constant(edge / 2), center);
}

/// Axis-aligned rectangle in the plane z = `z`, normal +z.
inline TriangleMesh rectangle(double sx, double sy, double z = 0.0) {
    std::vector<Vec3> v = {{-sx / 2, -sy / 2, z}, {sx / 2, -sy / 2, z}, {sx / 2, sy / 2, z}, {-sx / 2, sy / 2, z}};
    return TriangleMesh(std::move(v), {{0, 1, 2}, {0, 2, 3}});
}

inline TriangleMesh tetrahedron(double edge = 1.0) {
    const double a = edge / (2.0 * std::sqrt(2.0));
    std::vector<Vec3> v = {{a, a, a}, {a, -a, -a}, {-a, a, -a}, {-a, -a, a}};
    return TriangleMesh(std::move(v), {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}});
}

/// Subdivided icosahedron; subdivisions = 3 gives 1280 faces.
inline TriangleMesh icosphere(int subdivisions, double radius = 1.0) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                           {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (auto& p : v) p.normalize();
    std::vector<TriangleMesh::Triangle> f = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
        {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mid;
        auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
            auto key = std::minmax(a, b);
            auto it = mid.find(key);
            if (it != mid.end()) return it->second;
            v.push_back((v[a] + v[b]).normalized());
            const auto idx = static_cast<std::uint32_t>(v.size() - 1);
            mid.emplace(key, idx);
            return idx;
        };
        std::vector<TriangleMesh::Triangle> next;
        for (const auto& tri : f) {
            const auto a = midpoint(tri[0], tri[1]);
            const auto b = midpoint(tri[1], tri[2]);
            const auto c = midpoint(tri[2], tri[0]);
            next.push_back({tri[0], a, c});
            next.push_back({tri[1], b, a});
            next.push_back({tri[2], c, b});
            next.push_back({a, b, c});
        }
        f = std::move(next);
    }
    std::vector<Vec3> normals = v;
    for (auto& p : v) p *= radius;
    return TriangleMesh(std::move(v), f, std::move(normals));
}

/// Open spherical cap around +z with polar half-angle `half_angle` (radians),
/// smooth radial vertex normals. half_angle = pi/2 gives a hemisphere.
inline TriangleMesh spherical_cap(double radius, double half_angle, int rings = 16, int segments = 48) {
    std::vector<Vec3> v;
    std::vector<Vec3> n;
    v.emplace_back(0, 0, radius);
    n.emplace_back(0, 0, 1);
    for (int r = 1; r <= rings; ++r) {
        const double theta = half_angle * r / rings;
        for (int s = 0; s < segments; ++s) {
            const double phi = 2.0 * M_PI * s / segments;
            Vec3 dir(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
            v.push_back(radius * dir);
            n.push_back(dir);
        }
    }
    std::vector<TriangleMesh::Triangle> f;
    auto ring_index = [&](int r, int s) {
        return static_cast<std::uint32_t>(1 + (r - 1) * segments + (s % segments));
    };
    for (int s = 0; s < segments; ++s) f.push_back({0, ring_index(1, s), ring_index(1, s + 1)});
    for (int r = 1; r < rings; ++r) {
        for (int s = 0; s < segments; ++s) {
            f.push_back({ring_index(r, s), ring_index(r + 1, s), ring_index(r + 1, s + 1)});
            f.push_back({ring_index(r, s), ring_index(r + 1, s + 1), ring_index(r, s + 1)});
        }
    }
    return TriangleMesh(std::move(v), f, std::move(n));
}

/// Ear-clipping triangulation of a simple counter-clockwise polygon.
inline std::vector<std::array<std::uint32_t, 3>> triangulate_polygon(const std::vector<Vec2>& poly) {
    std::vector<std::uint32_t> idx(poly.size());
    for (std::size_t i = 0; i < poly.size(); ++i) idx[i] = static_cast<std::uint32_t>(i);
    auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
    std::vector<std::array<std::uint32_t, 3>> out;
    std::size_t guard = 0;
    while (idx.size() > 3 && guard++ < 10 * poly.size() * poly.size()) {
        bool clipped = false;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const auto a = idx[(i + idx.size() - 1) % idx.size()];
            const auto b = idx[i];
            const auto c = idx[(i + 1) % idx.size()];
            if (cross(poly[a], poly[b], poly[c]) <= 1e-15) continue;
            bool contains = false;
            for (auto k : idx) {
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
            break;
        }
        if (!clipped) break;
    }
    if (idx.size() == 3) out.push_back({idx[0], idx[1], idx[2]});
    return out;
}

/// Prism obtained by extruding a simple counter-clockwise (y, z) polygon along x
/// over [-length/2, length/2]. Closed and outward oriented.
inline TriangleMesh extrude_yz(const std::vector<Vec2>& poly, double length) {
    const auto n = static_cast<std::uint32_t>(poly.size());
    std::vector<Vec3> v;
    for (const auto& p : poly) v.emplace_back(-length / 2, p.x(), p.y());
    for (const auto& p : poly) v.emplace_back(length / 2, p.x(), p.y());
    std::vector<TriangleMesh::Triangle> f;
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint32_t j = (i + 1) % n;
        f.push_back({i, j, j + n});
        f.push_back({i, j + n, i + n});
    }
    for (const auto& t : triangulate_polygon(poly)) {
        f.push_back({t[0] + n, t[1] + n, t[2] + n});
        f.push_back({t[0], t[2], t[1]});
    }
    return TriangleMesh(std::move(v), f);
}

}  // namespace fsgkit::primitives
