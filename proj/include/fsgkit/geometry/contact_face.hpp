#pragma once

#include <cmath>
#include <vector>

#include "fsgkit/errors.hpp"
#include "fsgkit/geometry/surface.hpp"
#include "fsgkit/rng.hpp"

namespace fsgkit {

enum class FaceKind : std::uint8_t { circle = 0, rectangle = 1 };

/// Planar fingertip contact patch. Rectangles store half-edge vectors.
struct ContactFace {
    FaceKind kind = FaceKind::circle;
    SurfacePoint center;
    double radius = 0;  // circle only
    Vec3 edge_u = Vec3::Zero();  // rectangle only, |edge_u| = half length
    Vec3 edge_v = Vec3::Zero();

    static ContactFace circle(const SurfacePoint& c, double r) {
        ContactFace f;
        f.kind = FaceKind::circle;
        f.center = c;
        f.radius = r;
        return f;
    }

    static ContactFace rectangle(const SurfacePoint& c, const Vec3& u, const Vec3& v) {
        ContactFace f;
        f.kind = FaceKind::rectangle;
        f.center = c;
        f.edge_u = u;
        f.edge_v = v;
        return f;
    }

    double area() const {
        return kind == FaceKind::circle ? M_PI * radius * radius : 4.0 * edge_u.norm() * edge_v.norm();
    }

    bool is_valid(double tol = 1e-6) const {
        if (std::abs(center.normal.norm() - 1.0) > 1e-6) return false;
        if (kind == FaceKind::circle) return radius > 0;
        const double lu = edge_u.norm(), lv = edge_v.norm();
        if (!(lu > 0 && lv > 0)) return false;
        return std::abs(edge_u.dot(edge_v)) <= tol * lu * lv && std::abs(edge_u.dot(center.normal)) <= tol * lu &&
               std::abs(edge_v.dot(center.normal)) <= tol * lv;
    }

    ContactFace transformed(const RigidTransform& t) const {
        ContactFace f = *this;
        f.center = center.transformed(t);
        f.edge_u = t.rotate(edge_u);
        f.edge_v = t.rotate(edge_v);
        return f;
    }

    /// In-plane axes (unit) used for displacement and sampling.
    std::pair<Vec3, Vec3> axes() const {
        if (kind == FaceKind::rectangle) return {edge_u.normalized(), edge_v.normalized()};
        return orthonormal_basis(center.normal);
    }

    /// Point lies inside the face outline and within `normal_tol` of its plane.
    bool contains(const Vec3& p, double normal_tol) const {
        const Vec3 d = p - center.position;
        const double h = d.dot(center.normal);
        if (std::abs(h) > normal_tol) return false;
        const Vec3 in_plane = d - h * center.normal;
        if (kind == FaceKind::circle) return in_plane.norm() <= radius;
        const double lu = edge_u.norm(), lv = edge_v.norm();
        return std::abs(in_plane.dot(edge_u)) <= lu * lu && std::abs(in_plane.dot(edge_v)) <= lv * lv;
    }

    /// Rectangle corners, or `rim_samples` points on a circle's rim.
    std::vector<Vec3> outline(int rim_samples = 8) const {
        std::vector<Vec3> out;
        if (kind == FaceKind::rectangle) {
            for (int su : {-1, 1}) {
                for (int sv : {-1, 1}) out.push_back(center.position + su * edge_u + sv * edge_v);
            }
            return out;
        }
        const auto [u, v] = axes();
        for (int k = 0; k < rim_samples; ++k) {
            const double a = 2.0 * M_PI * k / rim_samples;
            out.push_back(center.position + radius * (std::cos(a) * u + std::sin(a) * v));
        }
        return out;
    }

    /// Uniform sample over the face area.
    Vec3 sample(Rng& rng) const {
        if (kind == FaceKind::rectangle) {
            return center.position + rng.uniform(-1, 1) * edge_u + rng.uniform(-1, 1) * edge_v;
        }
        const auto [u, v] = axes();
        const double r = radius * std::sqrt(rng.uniform());
        const double a = 2.0 * M_PI * rng.uniform();
        return center.position + r * (std::cos(a) * u + std::sin(a) * v);
    }
};

}  // namespace fsgkit
