#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fsgkit/errors.hpp"
#include "fsgkit/geometry/transform.hpp"

namespace fsgkit {

struct SurfacePoint {
    Vec3 position = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ();

    static SurfacePoint make(const Vec3& p, const Vec3& n) { return {p, n.normalized()}; }

    SurfacePoint transformed(const RigidTransform& t) const {
        return {t.apply(position), t.rotate(normal)};
    }

    friend bool operator==(const SurfacePoint& a, const SurfacePoint& b) {
        return a.position == b.position && a.normal == b.normal;
    }
};

enum class FrameTag { tip, palm, obj };

inline std::string_view to_string(FrameTag tag) {
    switch (tag) {
        case FrameTag::tip: return "tip";
        case FrameTag::palm: return "palm";
        case FrameTag::obj: return "obj";
    }
    return "?";
}

/// Ordered oriented point set expressed in one named frame.
class SurfaceCloud {
public:
    SurfaceCloud() = default;

    SurfaceCloud(std::vector<SurfacePoint> points, FrameTag frame)
        : points_(std::move(points)), frame_(frame) {
        for (const auto& p : points_) {
            if (std::abs(p.normal.norm() - 1.0) > 1e-6) {
                throw Error(ErrorKind::InvalidArgument, "surface point normal is not unit length");
            }
        }
    }

    const std::vector<SurfacePoint>& points() const noexcept { return points_; }
    FrameTag frame() const noexcept { return frame_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    const SurfacePoint& operator[](std::size_t i) const { return points_[i]; }
    auto begin() const noexcept { return points_.begin(); }
    auto end() const noexcept { return points_.end(); }

    SurfaceCloud transformed(const RigidTransform& t, FrameTag target) const {
        std::vector<SurfacePoint> out;
        out.reserve(points_.size());
        for (const auto& p : points_) out.push_back(p.transformed(t));
        SurfaceCloud c;
        c.points_ = std::move(out);
        c.frame_ = target;
        return c;
    }

    SurfaceCloud subset(const std::vector<std::size_t>& indices) const {
        std::vector<SurfacePoint> out;
        out.reserve(indices.size());
        for (auto i : indices) out.push_back(points_.at(i));
        SurfaceCloud c;
        c.points_ = std::move(out);
        c.frame_ = frame_;
        return c;
    }

    Vec3 centroid() const {
        Vec3 c = Vec3::Zero();
        for (const auto& p : points_) c += p.position;
        return points_.empty() ? c : Vec3(c / static_cast<double>(points_.size()));
    }

private:
    std::vector<SurfacePoint> points_;
    FrameTag frame_ = FrameTag::obj;
};

}  // namespace fsgkit
