#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <vector>

#include "fsgkit/errors.hpp"
#include "fsgkit/geometry/surface.hpp"

namespace fsgkit {

/// Static 3D kd-tree over a point set. Immutable after construction, so
/// concurrent queries are safe. Ties are broken by the smaller point index,
/// which makes `nearest` agree exactly with a first-minimum linear scan.
class NeighborIndex {
public:
    struct Hit {
        std::size_t index;
        double distance;
    };

    explicit NeighborIndex(std::vector<Vec3> points) : points_(std::move(points)) {
        if (points_.empty()) throw Error(ErrorKind::EmptyCloud, "cannot index an empty point set");
        order_.resize(points_.size());
        std::iota(order_.begin(), order_.end(), std::uint32_t{0});
        nodes_.reserve(2 * points_.size() / kLeafSize + 2);
        build(0, static_cast<std::uint32_t>(points_.size()));
    }

    std::size_t size() const noexcept { return points_.size(); }
    const Vec3& point(std::size_t i) const { return points_[i]; }

    Hit nearest(const Vec3& q) const {
        std::size_t best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        nearest_rec(0, q, best, best_d2);
        return {best, std::sqrt(best_d2)};
    }

    /// All points with distance <= radius, sorted by (distance, index).
    std::vector<Hit> within_radius(const Vec3& q, double radius) const {
        std::vector<Hit> out;
        for_each_within(q, radius, [&](std::size_t i, double d2) { out.push_back({i, std::sqrt(d2)}); });
        std::sort(out.begin(), out.end(), [](const Hit& a, const Hit& b) {
            return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
        });
        return out;
    }

    /// Visits every point within `radius` as fn(index, squared_distance); order unspecified.
    template <typename Fn>
    void for_each_within(const Vec3& q, double radius, Fn&& fn) const {
        if (radius < 0) return;
        radius_rec(0, q, radius * radius, fn);
    }

    /// k nearest points sorted by (distance, index).
    std::vector<Hit> k_nearest(const Vec3& q, std::size_t k) const {
        k = std::min(k, points_.size());
        std::priority_queue<std::pair<double, std::size_t>> heap;  // max-heap on (d2, index)
        knn_rec(0, q, k, heap);
        std::vector<Hit> out;
        while (!heap.empty()) {
            out.push_back({heap.top().second, std::sqrt(heap.top().first)});
            heap.pop();
        }
        std::reverse(out.begin(), out.end());
        return out;
    }

private:
    static constexpr std::uint32_t kLeafSize = 8;

    struct Node {
        std::uint32_t begin, end;  // range in order_
        std::int32_t left = -1, right = -1;
        int axis = 0;
        double split = 0;
        Vec3 lo, hi;
    };

    std::int32_t build(std::uint32_t begin, std::uint32_t end) {
        const auto id = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back(Node{begin, end});
        Vec3 lo = points_[order_[begin]], hi = lo;
        for (auto i = begin; i < end; ++i) {
            lo = lo.cwiseMin(points_[order_[i]]);
            hi = hi.cwiseMax(points_[order_[i]]);
        }
        nodes_[id].lo = lo;
        nodes_[id].hi = hi;
        if (end - begin <= kLeafSize) return id;
        int axis;
        (hi - lo).maxCoeff(&axis);
        const auto mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](std::uint32_t a, std::uint32_t b) { return points_[a][axis] < points_[b][axis]; });
        const double split = points_[order_[mid]][axis];
        const auto left = build(begin, mid);
        const auto right = build(mid, end);
        nodes_[id].axis = axis;
        nodes_[id].split = split;
        nodes_[id].left = left;
        nodes_[id].right = right;
        return id;
    }

    static double box_d2(const Node& n, const Vec3& q) {
        const Vec3 d = (n.lo - q).cwiseMax(q - n.hi).cwiseMax(0.0);
        return d.squaredNorm();
    }

    void nearest_rec(std::int32_t id, const Vec3& q, std::size_t& best, double& best_d2) const {
        const Node& n = nodes_[id];
        if (box_d2(n, q) > best_d2) return;
        if (n.left < 0) {
            for (auto i = n.begin; i < n.end; ++i) {
                const auto idx = order_[i];
                const double d2 = (points_[idx] - q).squaredNorm();
                if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
                    best_d2 = d2;
                    best = idx;
                }
            }
            return;
        }
        const bool go_left = q[n.axis] < n.split;
        nearest_rec(go_left ? n.left : n.right, q, best, best_d2);
        nearest_rec(go_left ? n.right : n.left, q, best, best_d2);
    }

    template <typename Fn>
    void radius_rec(std::int32_t id, const Vec3& q, double r2, Fn& fn) const {
        const Node& n = nodes_[id];
        if (box_d2(n, q) > r2) return;
        if (n.left < 0) {
            for (auto i = n.begin; i < n.end; ++i) {
                const auto idx = order_[i];
                const double d2 = (points_[idx] - q).squaredNorm();
                if (d2 <= r2) fn(static_cast<std::size_t>(idx), d2);
            }
            return;
        }
        radius_rec(n.left, q, r2, fn);
        radius_rec(n.right, q, r2, fn);
    }

    void knn_rec(std::int32_t id, const Vec3& q, std::size_t k,
                 std::priority_queue<std::pair<double, std::size_t>>& heap) const {
        const Node& n = nodes_[id];
        if (heap.size() == k && box_d2(n, q) > heap.top().first) return;
        if (n.left < 0) {
            for (auto i = n.begin; i < n.end; ++i) {
                const std::pair<double, std::size_t> cand{(points_[order_[i]] - q).squaredNorm(), order_[i]};
                if (heap.size() < k) {
                    heap.push(cand);
                } else if (cand < heap.top()) {
                    heap.pop();
                    heap.push(cand);
                }
            }
            return;
        }
        const bool go_left = q[n.axis] < n.split;
        knn_rec(go_left ? n.left : n.right, q, k, heap);
        knn_rec(go_left ? n.right : n.left, q, k, heap);
    }

    std::vector<Vec3> points_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
};

inline NeighborIndex build_kdtree(const SurfaceCloud& cloud) {
    if (cloud.empty()) throw Error(ErrorKind::EmptyCloud, "cannot index an empty cloud");
    std::vector<Vec3> pts;
    pts.reserve(cloud.size());
    for (const auto& p : cloud) pts.push_back(p.position);
    return NeighborIndex(std::move(pts));
}

}  // namespace fsgkit
