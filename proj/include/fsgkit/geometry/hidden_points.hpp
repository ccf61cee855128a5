#pragma once

#include <algorithm>
#include <vector>

#include "fsgkit/errors.hpp"
#include "fsgkit/geometry/hull.hpp"
#include "fsgkit/geometry/surface.hpp"

namespace fsgkit {

struct HprOptions {
    /// Inversion radius as a multiple of the farthest point distance.
    double radius_factor = 100.0;
};

/// Indices of the points visible from `viewpoint`, in input order.
///
/// Spherical flipping about the viewpoint, then a point is visible iff its
/// image is a vertex of the convex hull of all images plus the viewpoint.
inline std::vector<std::size_t> visible_point_indices(const SurfaceCloud& cloud, const Vec3& viewpoint,
                                                      const HprOptions& options = {}) {
    if (cloud.empty()) throw Error(ErrorKind::EmptyCloud, "hidden point removal on an empty cloud");
    double max_dist = 0;
    for (const auto& p : cloud) max_dist = std::max(max_dist, (p.position - viewpoint).norm());
    const double coincide = 1e-12 * std::max(1.0, max_dist);
    for (const auto& p : cloud) {
        if ((p.position - viewpoint).norm() <= coincide) {
            throw Error(ErrorKind::HPRDegenerate, "viewpoint coincides with a cloud point");
        }
    }
    const double radius = options.radius_factor * max_dist;
    std::vector<VecN<3>> flipped;
    flipped.reserve(cloud.size() + 1);
    for (const auto& p : cloud) {
        const Vec3 d = p.position - viewpoint;
        const double n = d.norm();
        flipped.push_back(d + 2.0 * (radius - n) * d / n);
    }
    flipped.push_back(VecN<3>::Zero());

    std::vector<std::size_t> out;
    try {
        const Hull<3> hull = convex_hull<3>(flipped);
        for (auto v : hull.vertices) {
            if (v < cloud.size()) out.push_back(v);
        }
    } catch (const DegenerateHullError&) {
        // coplanar with the viewpoint or too few points: nothing occludes anything
        out.resize(cloud.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline SurfaceCloud remove_hidden_points(const SurfaceCloud& cloud, const Vec3& viewpoint,
                                         const HprOptions& options = {}) {
    return cloud.subset(visible_point_indices(cloud, viewpoint, options));
}

}  // namespace fsgkit
