#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fsgkit/errors.hpp"
#include "fsgkit/geometry/transform.hpp"
#include "fsgkit/rng.hpp"

namespace fsgkit {

template <int D>
using VecN = Eigen::Matrix<double, D, 1>;

/// Hyperplane n.x = offset with outward unit normal, spanned by D input points.
template <int D>
struct HullFacet {
    std::array<std::size_t, D> vertices{};
    VecN<D> normal = VecN<D>::Zero();
    double offset = 0;

    double signed_distance(const VecN<D>& p) const { return normal.dot(p) - offset; }
};

/// Full-dimensional convex hull. Facets are simplicial; coplanar input
/// facets appear as several facets sharing one hyperplane.
template <int D>
struct Hull {
    std::vector<HullFacet<D>> facets;
    std::vector<std::size_t> vertices;  // sorted input indices
    VecN<D> interior = VecN<D>::Zero();
    double volume = 0;

    bool contains(const VecN<D>& p, double tol = 1e-9) const {
        for (const auto& f : facets) {
            if (f.signed_distance(p) > tol) return false;
        }
        return true;
    }

    /// min over facets of (offset - n.p); positive iff p is strictly inside.
    double depth(const VecN<D>& p) const {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& f : facets) d = std::min(d, -f.signed_distance(p));
        return d;
    }
};

struct HullOptions {
    /// Visibility tolerance relative to the coordinate scale of the input.
    double relative_eps = 1e-10;
};

/// Affine rank of a point set (number of independent directions).
template <int D>
int affine_rank(std::span<const VecN<D>> pts, double relative_tol = 1e-9) {
    if (pts.empty()) return -1;
    Eigen::MatrixXd m(D, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = pts[i] - pts[0];
    if (pts.size() == 1) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    double scale = 0;
    for (const auto& p : pts) scale = std::max(scale, (p - pts[0]).cwiseAbs().maxCoeff());
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s[i] > relative_tol * std::max(scale, 1e-300)) ++rank;
    }
    return rank;
}

namespace detail {

struct HullTopologyError {};

/// Unit normal of the hyperplane through D points (rows = p_k - p_0, k >= 1)
/// by Gaussian elimination with complete pivoting; false when a pivot falls
/// below `tiny`.
template <int D>
bool hyperplane_normal(std::array<std::array<double, D>, D - 1>& a, double tiny, VecN<D>& n) {
    std::array<int, D> col{};
    std::iota(col.begin(), col.end(), 0);
    for (int r = 0; r < D - 1; ++r) {
        int pr = r, pc = r;
        double best = 0;
        for (int i = r; i < D - 1; ++i) {
            for (int j = r; j < D; ++j) {
                if (std::abs(a[i][col[j]]) > best) {
                    best = std::abs(a[i][col[j]]);
                    pr = i;
                    pc = j;
                }
            }
        }
        if (best <= tiny) return false;
        std::swap(a[r], a[pr]);
        std::swap(col[r], col[pc]);
        const double piv = a[r][col[r]];
        for (int i = r + 1; i < D - 1; ++i) {
            const double f = a[i][col[r]] / piv;
            if (f == 0) continue;
            for (int j = r; j < D; ++j) a[i][col[j]] -= f * a[r][col[j]];
        }
    }
    // free variable is the last permuted column
    std::array<double, D> x{};
    x[col[D - 1]] = 1.0;
    for (int r = D - 2; r >= 0; --r) {
        double acc = 0;
        for (int j = r + 1; j < D; ++j) acc += a[r][col[j]] * x[col[j]];
        x[col[r]] = -acc / a[r][col[r]];
    }
    for (int k = 0; k < D; ++k) n[k] = x[k];
    n.normalize();
    return true;
}

/// Determinant by partial-pivot elimination.
template <int D>
double small_determinant(std::array<std::array<double, D>, D> a) {
    double det = 1;
    for (int r = 0; r < D; ++r) {
        int pr = r;
        for (int i = r + 1; i < D; ++i) {
            if (std::abs(a[i][r]) > std::abs(a[pr][r])) pr = i;
        }
        if (a[pr][r] == 0) return 0;
        if (pr != r) {
            std::swap(a[r], a[pr]);
            det = -det;
        }
        det *= a[r][r];
        for (int i = r + 1; i < D; ++i) {
            const double f = a[i][r] / a[r][r];
            for (int j = r + 1; j < D; ++j) a[i][j] -= f * a[r][j];
        }
    }
    return det;
}

template <int D>
class QuickHullBuilder {
public:
    using Vec = VecN<D>;

    QuickHullBuilder(const std::vector<Vec>& pts, double scale, double eps)
        : pts_(pts), scale_(scale), eps_(eps), packable_((D - 1) * kPackBits <= 64 && pts.size() < (1u << kPackBits)) {}

    Hull<D> run() {
        const auto simplex = initial_simplex();
        interior_ = Vec::Zero();
        for (int s : simplex) interior_ += pts_[s];
        interior_ /= static_cast<double>(D + 1);

        for (int i = 0; i <= D; ++i) {
            Facet f;
            int k = 0;
            for (int j = 0; j <= D; ++j) {
                if (j == i) continue;
                f.v[k] = simplex[j];
                f.nb[k] = j;  // facet omitting simplex[j] shares every vertex except simplex[j]
                ++k;
            }
            if (!make_plane(f)) throw HullTopologyError{};
            facets_.push_back(std::move(f));
        }

        std::vector<char> used(pts_.size(), 0);
        for (int s : simplex) used[s] = 1;
        for (int p = 0; p < static_cast<int>(pts_.size()); ++p) {
            if (used[p]) continue;
            for (int fi = 0; fi <= D; ++fi) {
                if (assign(fi, p)) break;
            }
        }

        std::vector<int> work;
        for (int fi = 0; fi <= D; ++fi) {
            if (!facets_[fi].outside.empty()) work.push_back(fi);
        }
        while (!work.empty()) {
            const int fi = work.back();
            work.pop_back();
            if (!facets_[fi].alive || facets_[fi].outside.empty()) continue;
            add_point(fi, work);
        }
        return collect();
    }

private:
    struct Facet {
        std::array<int, D> v{};
        std::array<int, D> nb{};
        Vec n = Vec::Zero();
        double off = 0;
        std::vector<int> outside;
        int furthest = -1;
        double furthest_dist = 0;
        bool alive = true;
        int stamp = -1;
        bool visible = false;
    };

    double dist(const Facet& f, int p) const { return f.n.dot(pts_[p]) - f.off; }

    bool assign(int fi, int p) {
        Facet& f = facets_[fi];
        const double d = dist(f, p);
        if (d <= eps_) return false;
        f.outside.push_back(p);
        if (d > f.furthest_dist) {
            f.furthest_dist = d;
            f.furthest = p;
        }
        return true;
    }

    bool make_plane(Facet& f) const {
        Vec n;
        if constexpr (D == 2) {
            const Vec e = pts_[f.v[1]] - pts_[f.v[0]];
            if (e.norm() <= 1e-14 * scale_) return false;
            n = Vec(e.y(), -e.x());
            n.normalize();
        } else {
            std::array<std::array<double, D>, D - 1> a;
            for (int k = 1; k < D; ++k) {
                for (int j = 0; j < D; ++j) a[k - 1][j] = pts_[f.v[k]][j] - pts_[f.v[0]][j];
            }
            if (!hyperplane_normal<D>(a, 1e-14 * scale_, n)) return false;
        }
        double off = n.dot(pts_[f.v[0]]);
        const double s = n.dot(interior_) - off;
        if (std::abs(s) <= eps_) return false;
        if (s > 0) {
            n = -n;
            off = -off;
        }
        f.n = n;
        f.off = off;
        return true;
    }

    std::array<int, D + 1> initial_simplex() const {
        const int count = static_cast<int>(pts_.size());
        std::array<int, D + 1> chosen{};
        int lowest = 0;
        for (int i = 1; i < count; ++i) {
            if (pts_[i].x() < pts_[lowest].x()) lowest = i;
        }
        chosen[0] = lowest;
        std::vector<Vec> basis;
        const double rank_tol = 1e-9 * scale_;
        for (int k = 1; k <= D; ++k) {
            int best = -1;
            double best_r = -1;
            for (int i = 0; i < count; ++i) {
                Vec r = pts_[i] - pts_[chosen[0]];
                for (const auto& b : basis) r -= r.dot(b) * b;
                const double rn = r.norm();
                if (rn > best_r) {
                    best_r = rn;
                    best = i;
                }
            }
            if (best_r <= rank_tol) {
                throw DegenerateHullError(k - 1, "hull input is affinely dependent");
            }
            Vec r = pts_[best] - pts_[chosen[0]];
            for (const auto& b : basis) r -= r.dot(b) * b;
            // re-orthogonalise once more for stability
            for (const auto& b : basis) r -= r.dot(b) * b;
            basis.push_back(r.normalized());
            chosen[k] = best;
        }
        return chosen;
    }

    void add_point(int fi, std::vector<int>& work) {
        const int p = facets_[fi].furthest;
        ++stamp_;
        std::vector<int> visible{fi};
        facets_[fi].stamp = stamp_;
        facets_[fi].visible = true;
        std::vector<std::pair<int, int>> horizon;  // (visible facet, slot of the non-visible neighbour)
        for (std::size_t q = 0; q < visible.size(); ++q) {
            const int f = visible[q];
            for (int k = 0; k < D; ++k) {
                const int g = facets_[f].nb[k];
                Facet& gf = facets_[g];
                if (gf.stamp != stamp_) {
                    gf.stamp = stamp_;
                    gf.visible = dist(gf, p) > eps_;
                    if (gf.visible) visible.push_back(g);
                }
                if (!gf.visible) horizon.emplace_back(f, k);
            }
        }

        struct Ridge {
            std::array<int, D - 1> key;
            std::uint64_t packed;
            int facet;
            int slot;
        };
        std::vector<Ridge> ridges;
        std::vector<int> created;
        created.reserve(horizon.size());
        ridges.reserve(horizon.size() * (D - 1));
        for (const auto& [f, k] : horizon) {
            Facet nf;
            nf.v = facets_[f].v;
            nf.v[k] = p;
            const int g = facets_[f].nb[k];
            nf.nb[k] = g;
            if (!make_plane(nf)) throw HullTopologyError{};
            const int id = static_cast<int>(facets_.size());
            facets_.push_back(std::move(nf));
            created.push_back(id);
            Facet& gf = facets_[g];
            bool relinked = false;
            for (int j = 0; j < D; ++j) {
                if (gf.nb[j] == f) {
                    gf.nb[j] = id;
                    relinked = true;
                    break;
                }
            }
            if (!relinked) throw HullTopologyError{};
            for (int kk = 0; kk < D; ++kk) {
                if (kk == k) continue;
                Ridge r{{}, 0, id, kk};
                int w = 0;
                for (int j = 0; j < D; ++j) {
                    if (j != kk) r.key[w++] = facets_[id].v[j];
                }
                std::sort(r.key.begin(), r.key.end());
                if (packable_) {
                    for (int v : r.key) r.packed = (r.packed << kPackBits) | static_cast<std::uint64_t>(v);
                }
                ridges.push_back(r);
            }
        }
        // every new ridge must be shared by exactly two new facets
        if (packable_) {
            std::sort(ridges.begin(), ridges.end(), [](const Ridge& x, const Ridge& y) { return x.packed < y.packed; });
        } else {
            std::sort(ridges.begin(), ridges.end(), [](const Ridge& x, const Ridge& y) { return x.key < y.key; });
        }
        if (ridges.size() % 2 != 0) throw HullTopologyError{};
        for (std::size_t i = 0; i < ridges.size(); i += 2) {
            const Ridge& x = ridges[i];
            const Ridge& y = ridges[i + 1];
            if (x.key != y.key || (i + 2 < ridges.size() && ridges[i + 2].key == x.key)) throw HullTopologyError{};
            facets_[x.facet].nb[x.slot] = y.facet;
            facets_[y.facet].nb[y.slot] = x.facet;
        }

        for (int f : visible) {
            Facet& vf = facets_[f];
            vf.alive = false;
            for (int q : vf.outside) {
                if (q == p) continue;
                for (int c : created) {
                    if (assign(c, q)) break;
                }
            }
            vf.outside.clear();
            vf.outside.shrink_to_fit();
        }
        for (int c : created) {
            if (!facets_[c].outside.empty()) work.push_back(c);
        }
    }

    Hull<D> collect() const {
        Hull<D> h;
        h.interior = interior_;
        std::vector<char> is_vertex(pts_.size(), 0);
        double factorial = 1;
        for (int k = 2; k <= D; ++k) factorial *= k;
        for (const auto& f : facets_) {
            if (!f.alive) continue;
            HullFacet<D> out;
            std::array<std::array<double, D>, D> m;
            for (int k = 0; k < D; ++k) {
                out.vertices[k] = static_cast<std::size_t>(f.v[k]);
                is_vertex[f.v[k]] = 1;
                for (int j = 0; j < D; ++j) m[k][j] = pts_[f.v[k]][j] - interior_[j];
            }
            out.normal = f.n;
            out.offset = f.off;
            h.volume += std::abs(small_determinant<D>(m)) / factorial;
            h.facets.push_back(out);
        }
        for (std::size_t i = 0; i < pts_.size(); ++i) {
            if (is_vertex[i]) h.vertices.push_back(i);
        }
        return h;
    }

    static constexpr int kPackBits = 12;

    const std::vector<Vec>& pts_;
    double scale_;
    double eps_;
    bool packable_;
    Vec interior_ = Vec::Zero();
    std::vector<Facet> facets_;
    int stamp_ = 0;
};

}  // namespace detail

/// Counter-clockwise convex polygon (indices into `pts`) by monotone chain;
/// collinear boundary points are dropped.
inline std::vector<std::size_t> convex_polygon(std::span<const Vec2> pts) {
    std::vector<std::size_t> idx(pts.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return pts[a].x() < pts[b].x() || (pts[a].x() == pts[b].x() && pts[a].y() < pts[b].y());
    });
    double scale = 0;
    for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
    const double tol = 1e-14 * std::max(scale * scale, 1e-300);
    auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
        return (pts[a] - pts[o]).x() * (pts[b] - pts[o]).y() - (pts[a] - pts[o]).y() * (pts[b] - pts[o]).x();
    };
    std::vector<std::size_t> hull(2 * idx.size() + 1);
    std::size_t k = 0;
    for (auto i : idx) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], i) <= tol) --k;
        hull[k++] = i;
    }
    for (std::size_t j = idx.size() - 1, lower = k + 1; j-- > 0;) {
        const auto i = idx[j];
        while (k >= lower && cross(hull[k - 2], hull[k - 1], i) <= tol) --k;
        hull[k++] = i;
    }
    hull.resize(k > 0 ? k - 1 : 0);
    if (hull.size() < 3) {
        const int rank = pts.empty() ? -1 : (hull.size() <= 1 ? 0 : 1);
        throw DegenerateHullError(rank, "planar point set has no area");
    }
    return hull;
}

/// Convex hull of points in D dimensions (D in {2, 3, 6} are exercised).
///
/// 2D uses a monotone chain. Higher dimensions use quickhull with a
/// scale-relative visibility tolerance; if the facet topology becomes
/// inconsistent on near-degenerate input the points are re-run with a
/// deterministic 1e-12-relative perturbation (growing on repeated failure).
template <int D>
Hull<D> convex_hull(std::span<const VecN<D>> points, const HullOptions& options = {}) {
    static_assert(D >= 2);
    if (points.size() < static_cast<std::size_t>(D + 1)) {
        throw DegenerateHullError(points.empty() ? -1 : affine_rank<D>(points),
                                  "too few points for a full-dimensional hull");
    }
    if constexpr (D == 2) {
        const auto ring = convex_polygon(points);
        Hull<2> h;
        for (auto i : ring) h.interior += points[i];
        h.interior /= static_cast<double>(ring.size());
        for (std::size_t k = 0; k < ring.size(); ++k) {
            const auto a = ring[k];
            const auto b = ring[(k + 1) % ring.size()];
            const Vec2 e = points[b] - points[a];
            HullFacet<2> f;
            f.vertices = {a, b};
            f.normal = Vec2(e.y(), -e.x()).normalized();
            f.offset = f.normal.dot(points[a]);
            h.facets.push_back(f);
            h.volume += 0.5 * std::abs((points[a] - h.interior).x() * (points[b] - h.interior).y() -
                                       (points[a] - h.interior).y() * (points[b] - h.interior).x());
        }
        h.vertices.assign(ring.begin(), ring.end());
        std::sort(h.vertices.begin(), h.vertices.end());
        return h;
    } else {
        VecN<D> mean = VecN<D>::Zero();
        for (const auto& p : points) mean += p;
        mean /= static_cast<double>(points.size());
        double scale = 0;
        for (const auto& p : points) scale = std::max(scale, (p - mean).cwiseAbs().maxCoeff());
        if (!(scale > 0)) throw DegenerateHullError(0, "all hull points coincide");

        std::vector<VecN<D>> work(points.begin(), points.end());
        for (int attempt = 0; attempt < 5; ++attempt) {
            if (attempt > 0) {
                const double magnitude = 1e-12 * scale * std::pow(100.0, attempt - 1);
                Rng rng{0xC0FFEEULL, static_cast<std::uint64_t>(attempt)};
                for (std::size_t i = 0; i < work.size(); ++i) {
                    for (int d = 0; d < D; ++d) work[i][d] = points[i][d] + magnitude * (2.0 * rng.uniform() - 1.0);
                }
            }
            try {
                detail::QuickHullBuilder<D> builder(work, scale, options.relative_eps * scale);
                Hull<D> h = builder.run();
                if (attempt > 0) {
                    // re-express planes against the unperturbed input so containment holds
                    for (auto& f : h.facets) {
                        double worst = -std::numeric_limits<double>::infinity();
                        for (const auto& p : points) worst = std::max(worst, f.normal.dot(p));
                        f.offset = std::max(f.offset, worst);
                    }
                }
                return h;
            } catch (const detail::HullTopologyError&) {
                continue;
            }
        }
        throw DegenerateHullError(affine_rank<D>(points), "hull construction failed on near-degenerate input");
    }
}

template <int D>
Hull<D> convex_hull(const std::vector<VecN<D>>& points, const HullOptions& options = {}) {
    return convex_hull<D>(std::span<const VecN<D>>(points.data(), points.size()), options);
}

}  // namespace fsgkit
