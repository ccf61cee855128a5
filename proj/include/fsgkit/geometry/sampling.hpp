#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "fsgkit/errors.hpp"
#include "fsgkit/geometry/mesh.hpp"
#include "fsgkit/geometry/surface.hpp"
#include "fsgkit/rng.hpp"

namespace fsgkit {

/// Minimum spacing used by poisson_disk_sample for a given area and count.
inline double pds_radius(double area, std::size_t target_count) {
    return std::sqrt(area / (2.0 * std::sqrt(3.0) * static_cast<double>(target_count)));
}

/// Dart throwing on the mesh surface: candidates are drawn area-weighted
/// from jittered strata of the area CDF (one stratum per target sample,
/// shuffled each round), rejected when closer than the PDS radius to an accepted sample (hash-grid
/// lookup), and the run stops at `target_count` accepted points.
inline SurfaceCloud poisson_disk_sample(const TriangleMesh& mesh, std::size_t target_count, std::uint64_t seed,
                                        FrameTag frame = FrameTag::obj) {
    if (mesh.vertices().empty() || mesh.triangles().empty()) {
        throw Error(ErrorKind::InvalidMesh, "mesh has no triangles with positive area");
    }
    if (target_count < 4) throw Error(ErrorKind::InvalidArgument, "target_count must be at least 4");
    const double area = mesh.surface_area();
    if (!(area > 0)) throw Error(ErrorKind::InvalidMesh, "mesh has zero surface area");

    const double r = pds_radius(area, target_count);
    const double r2 = r * r;
    std::vector<double> cdf;
    cdf.reserve(mesh.areas().size());
    double acc = 0;
    for (double a : mesh.areas()) cdf.push_back(acc += a);

    struct KeyHash {
        std::size_t operator()(const std::array<std::int64_t, 3>& k) const noexcept {
            std::uint64_t h = 1469598103934665603ULL;
            for (auto v : k) h = (h ^ static_cast<std::uint64_t>(v)) * 1099511628211ULL;
            return h;
        }
    };
    std::unordered_map<std::array<std::int64_t, 3>, std::vector<std::uint32_t>, KeyHash> grid;
    auto key_of = [&](const Vec3& p) {
        return std::array<std::int64_t, 3>{static_cast<std::int64_t>(std::floor(p.x() / r)),
                                           static_cast<std::int64_t>(std::floor(p.y() / r)),
                                           static_cast<std::int64_t>(std::floor(p.z() / r))};
    };

    Rng rng(seed);
    std::vector<SurfacePoint> samples;
    samples.reserve(target_count);
    const std::size_t max_attempts = 200 * target_count + 1000;
    std::vector<std::size_t> strata(target_count);
    for (std::size_t attempt = 0; attempt < max_attempts && samples.size() < target_count; ++attempt) {
        const std::size_t slot = attempt % target_count;
        if (slot == 0) {
            for (std::size_t i = 0; i < target_count; ++i) strata[i] = i;
            for (std::size_t i = target_count - 1; i > 0; --i) std::swap(strata[i], strata[rng.below(i + 1)]);
        }
        const double pick = (static_cast<double>(strata[slot]) + rng.uniform()) / static_cast<double>(target_count) * acc;
        const auto tri = static_cast<std::size_t>(
            std::min<std::ptrdiff_t>(std::upper_bound(cdf.begin(), cdf.end(), pick) - cdf.begin(),
                                     static_cast<std::ptrdiff_t>(cdf.size()) - 1));
        double u = rng.uniform(), v = rng.uniform();
        if (u + v > 1.0) {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        const double w0 = 1.0 - u - v;
        const auto& t = mesh.triangles()[tri];
        const auto& vs = mesh.vertices();
        const Vec3 p = w0 * vs[t[0]] + u * vs[t[1]] + v * vs[t[2]];

        const auto k = key_of(p);
        bool ok = true;
        for (std::int64_t dx = -1; dx <= 1 && ok; ++dx) {
            for (std::int64_t dy = -1; dy <= 1 && ok; ++dy) {
                for (std::int64_t dz = -1; dz <= 1 && ok; ++dz) {
                    auto it = grid.find({k[0] + dx, k[1] + dy, k[2] + dz});
                    if (it == grid.end()) continue;
                    for (auto idx : it->second) {
                        if ((samples[idx].position - p).squaredNorm() < r2) {
                            ok = false;
                            break;
                        }
                    }
                }
            }
        }
        if (!ok) continue;
        grid[k].push_back(static_cast<std::uint32_t>(samples.size()));
        samples.push_back({p, mesh.normal_at(tri, w0, u, v)});
    }
    return SurfaceCloud(std::move(samples), frame);
}

}  // namespace fsgkit
