#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include <Eigen/Geometry>

namespace fsgkit {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

constexpr double kDegToRad = M_PI / 180.0;
constexpr double kRadToDeg = 180.0 / M_PI;

inline double deg2rad(double deg) noexcept { return deg * kDegToRad; }
inline double rad2deg(double rad) noexcept { return rad * kRadToDeg; }

/// Proper rigid motion x -> rotation * x + translation.
struct RigidTransform {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    static RigidTransform identity() { return {}; }

    static RigidTransform from(const Mat3& r, const Vec3& t) {
        RigidTransform out;
        out.rotation = r;
        out.translation = t;
        return out;
    }

    /// Fixed-axis roll/pitch/yaw (R = Rz(yaw) * Ry(pitch) * Rx(roll)), radians.
    static RigidTransform from_xyz_rpy(const Vec3& xyz, const Vec3& rpy) {
        const Mat3 r = (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) *
                        Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
                        Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
                           .toRotationMatrix();
        return from(r, xyz);
    }

    static RigidTransform from_axis_angle(const Vec3& axis, double angle) {
        return from(Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix(), Vec3::Zero());
    }

    /// Quaternion in (w, x, y, z) order.
    static RigidTransform from_xyz_quat(const Vec3& xyz, const std::array<double, 4>& wxyz) {
        Eigen::Quaterniond q(wxyz[0], wxyz[1], wxyz[2], wxyz[3]);
        q.normalize();
        return from(q.toRotationMatrix(), xyz);
    }

    /// Unit quaternion (w, x, y, z) with w >= 0.
    std::array<double, 4> quaternion_wxyz() const {
        Eigen::Quaterniond q(rotation);
        q.normalize();
        if (q.w() < 0) q.coeffs() *= -1.0;
        return {q.w(), q.x(), q.y(), q.z()};
    }

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
    Vec3 rotate(const Vec3& v) const { return rotation * v; }

    RigidTransform operator*(const RigidTransform& rhs) const {
        return from(rotation * rhs.rotation, rotation * rhs.translation + translation);
    }

    RigidTransform inverse() const {
        const Mat3 rt = rotation.transpose();
        return from(rt, -(rt * translation));
    }

    bool is_proper(double tol = 1e-9) const {
        return (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
               std::abs(rotation.determinant() - 1.0) <= tol;
    }
};

/// Rotation angle (radians) of a^-1 * b.
inline double rotation_angle_between(const Mat3& a, const Mat3& b) {
    const double c = std::clamp(((a.transpose() * b).trace() - 1.0) * 0.5, -1.0, 1.0);
    return std::acos(c);
}

/// Minimal rotation taking unit vector `from` onto unit vector `to`.
inline Mat3 rotation_between(const Vec3& from, const Vec3& to) {
    const Vec3 a = from.normalized();
    const Vec3 b = to.normalized();
    const double c = a.dot(b);
    if (c < -1.0 + 1e-12) {
        // antiparallel: half turn about any axis orthogonal to a
        Vec3 axis = a.cross(Vec3::UnitX());
        if (axis.squaredNorm() < 1e-12) axis = a.cross(Vec3::UnitY());
        return Eigen::AngleAxisd(M_PI, axis.normalized()).toRotationMatrix();
    }
    return Eigen::Quaterniond::FromTwoVectors(a, b).toRotationMatrix();
}

/// Deterministic orthonormal pair spanning the plane orthogonal to unit n.
inline std::pair<Vec3, Vec3> orthonormal_basis(const Vec3& n) {
    const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    Vec3 u = (helper - helper.dot(n) * n).normalized();
    Vec3 v = n.cross(u);
    return {u, v};
}

}  // namespace fsgkit
