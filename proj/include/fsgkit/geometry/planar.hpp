#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "fsgkit/errors.hpp"
#include "fsgkit/geometry/hull.hpp"
#include "fsgkit/geometry/lp.hpp"
#include "fsgkit/geometry/surface.hpp"

namespace fsgkit {

/// Orthonormal 2D frame embedded in a 3D plane.
struct PlaneFrame {
    Vec3 origin = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ();
    Vec3 axis_u = Vec3::UnitX();
    Vec3 axis_v = Vec3::UnitY();

    /// Frame whose v axis is `reference` projected onto the plane (if usable).
    static PlaneFrame make(const Vec3& origin, const Vec3& unit_normal, const std::optional<Vec3>& reference = {}) {
        PlaneFrame f;
        f.origin = origin;
        f.normal = unit_normal;
        Vec3 v;
        if (reference) v = *reference - reference->dot(unit_normal) * unit_normal;
        if (!reference || v.norm() < 1e-9) {
            v = orthonormal_basis(unit_normal).second;
        }
        f.axis_v = v.normalized();
        f.axis_u = f.axis_v.cross(unit_normal);
        return f;
    }

    Vec2 to_plane(const Vec3& p) const {
        const Vec3 d = p - origin;
        return {d.dot(axis_u), d.dot(axis_v)};
    }

    Vec3 to_space(const Vec2& q) const { return origin + q.x() * axis_u + q.y() * axis_v; }
};

inline std::vector<Vec2> project_to_plane(std::span<const SurfacePoint> points, const PlaneFrame& frame) {
    std::vector<Vec2> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(frame.to_plane(p.position));
    return out;
}

/// Orthogonal projection onto the plane through `plane_point` with unit `plane_normal`.
inline std::vector<Vec2> project_to_plane(std::span<const SurfacePoint> points, const Vec3& plane_point,
                                          const Vec3& plane_normal) {
    return project_to_plane(points, PlaneFrame::make(plane_point, plane_normal));
}

/// Convex polygon in half-plane form: normals[i].x <= offsets[i], unit normals.
struct ConvexPolygon {
    std::vector<Vec2> vertices;  // counter-clockwise
    std::vector<Vec2> normals;
    std::vector<double> offsets;

    /// Canonicalises an arbitrary point list to its convex hull.
    static ConvexPolygon from_points(std::span<const Vec2> pts) {
        ConvexPolygon poly;
        for (auto i : convex_polygon(pts)) poly.vertices.push_back(pts[i]);
        const auto n = poly.vertices.size();
        for (std::size_t k = 0; k < n; ++k) {
            const Vec2 e = poly.vertices[(k + 1) % n] - poly.vertices[k];
            const Vec2 normal = Vec2(e.y(), -e.x()).normalized();
            poly.normals.push_back(normal);
            poly.offsets.push_back(normal.dot(poly.vertices[k]));
        }
        return poly;
    }

    static ConvexPolygon from_points(const std::vector<Vec2>& pts) {
        return from_points(std::span<const Vec2>(pts.data(), pts.size()));
    }

    double area() const {
        double a = 0;
        for (std::size_t k = 0; k < vertices.size(); ++k) {
            const auto& p = vertices[k];
            const auto& q = vertices[(k + 1) % vertices.size()];
            a += p.x() * q.y() - p.y() * q.x();
        }
        return 0.5 * a;
    }

    /// Smallest slack offset - n.p over all edges (distance to the boundary when inside).
    double clearance(const Vec2& p) const {
        double s = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < normals.size(); ++k) s = std::min(s, offsets[k] - normals[k].dot(p));
        return s;
    }

    Vec2 vertex_mean() const {
        Vec2 c = Vec2::Zero();
        for (const auto& v : vertices) c += v;
        return c / static_cast<double>(vertices.size());
    }
};

struct Circle2 {
    Vec2 center = Vec2::Zero();
    double radius = 0;
    double area() const { return M_PI * radius * radius; }
};

struct AxisRect2 {
    Vec2 corner_min = Vec2::Zero();
    Vec2 corner_max = Vec2::Zero();
    Vec2 center() const { return 0.5 * (corner_min + corner_max); }
    Vec2 half_extents() const { return 0.5 * (corner_max - corner_min); }
    double area() const { return (corner_max - corner_min).prod(); }
};

/// Chebyshev centre and radius of a convex polygon, solved as the LP
/// max r  s.t.  n_i.c + r <= b_i, with c shifted to the vertex mean so the
/// origin is feasible.
inline Circle2 largest_inscribed_circle(const ConvexPolygon& poly) {
    if (poly.vertices.size() < 3 || !(poly.area() > 0)) {
        throw DegenerateHullError(1, "polygon has no interior");
    }
    const Vec2 c0 = poly.vertex_mean();
    const auto m = static_cast<Eigen::Index>(poly.normals.size());
    Eigen::MatrixXd a(m, 5);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Vec2& n = poly.normals[i];
        a.row(i) << n.x(), -n.x(), n.y(), -n.y(), 1.0;
        b[i] = poly.offsets[i] - n.dot(c0);
    }
    Eigen::VectorXd c(5);
    c << 0, 0, 0, 0, 1;
    const auto sol = solve_lp_origin_feasible(a, b, c);
    if (!sol || !(sol->x[4] > 0)) throw DegenerateHullError(1, "polygon has no interior");
    Circle2 out;
    out.center = c0 + Vec2(sol->x[0] - sol->x[1], sol->x[2] - sol->x[3]);
    out.radius = sol->x[4];
    return out;
}

inline Circle2 largest_inscribed_circle(std::span<const Vec2> poly) {
    return largest_inscribed_circle(ConvexPolygon::from_points(poly));
}

/// Largest circle centred at `center`; radius 0 when the centre is on or outside the boundary.
inline Circle2 inscribed_circle_at(const ConvexPolygon& poly, const Vec2& center) {
    return {center, std::max(0.0, poly.clearance(center))};
}

namespace detail {

/// Largest axis-aligned rectangle with a fixed centre: for each aspect
/// angle phi the scale is closed-form, and the area is unimodal in phi.
inline AxisRect2 best_rect_at(const ConvexPolygon& poly, const Vec2& center, int iterations = 60) {
    const auto m = poly.normals.size();
    std::vector<double> slack(m);
    for (std::size_t i = 0; i < m; ++i) {
        slack[i] = poly.offsets[i] - poly.normals[i].dot(center);
        if (slack[i] <= 0) return {center, center};
    }
    auto scale_at = [&](double phi) {
        const double c = std::cos(phi), s = std::sin(phi);
        double t = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            const double denom = 0.5 * (std::abs(poly.normals[i].x()) * c + std::abs(poly.normals[i].y()) * s);
            if (denom > 0) t = std::min(t, slack[i] / denom);
        }
        return t;
    };
    auto area_at = [&](double phi) {
        const double t = scale_at(phi);
        return t * t * std::cos(phi) * std::sin(phi);
    };
    double lo = 1e-9, hi = M_PI / 2 - 1e-9;
    for (int it = 0; it < iterations; ++it) {
        const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        if (area_at(m1) < area_at(m2)) lo = m1; else hi = m2;
    }
    const double phi = 0.5 * (lo + hi);
    const double t = scale_at(phi);
    const Vec2 half(0.5 * t * std::cos(phi), 0.5 * t * std::sin(phi));
    return {center - half, center + half};
}

}  // namespace detail

inline AxisRect2 inscribed_axis_rect_at(const ConvexPolygon& poly, const Vec2& center) {
    return detail::best_rect_at(poly, center);
}

/// Maximal-area axis-aligned rectangle inside a convex polygon: a 64x64 grid
/// of candidate centres (aspect optimised per centre by ternary search),
/// followed by two zoomed 64x64 refinement passes around the best centre.
inline AxisRect2 largest_inscribed_axis_rect(const ConvexPolygon& poly) {
    if (poly.vertices.size() < 3 || !(poly.area() > 0)) {
        throw DegenerateHullError(1, "polygon has no interior");
    }
    Vec2 lo = poly.vertices.front(), hi = lo;
    for (const auto& v : poly.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    constexpr int kGrid = 64;
    AxisRect2 best{poly.vertex_mean(), poly.vertex_mean()};
    double best_area = -1;
    Vec2 win_lo = lo, win_hi = hi;
    for (int pass = 0; pass < 3; ++pass) {
        const Vec2 cell = (win_hi - win_lo) / kGrid;
        for (int i = 0; i < kGrid; ++i) {
            for (int j = 0; j < kGrid; ++j) {
                const Vec2 c = win_lo + Vec2((i + 0.5) * cell.x(), (j + 0.5) * cell.y());
                if (poly.clearance(c) <= 0) continue;
                const AxisRect2 r = detail::best_rect_at(poly, c, 40);
                if (r.area() > best_area) {
                    best_area = r.area();
                    best = r;
                }
            }
        }
        const Vec2 c = best.center();
        win_lo = c - 2.0 * cell;
        win_hi = c + 2.0 * cell;
    }
    return detail::best_rect_at(poly, best.center());
}

inline AxisRect2 largest_inscribed_axis_rect(std::span<const Vec2> poly) {
    return largest_inscribed_axis_rect(ConvexPolygon::from_points(poly));
}

}  // namespace fsgkit
