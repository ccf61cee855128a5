#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fsgkit/errors.hpp"
#include "fsgkit/geometry/hull.hpp"
#include "fsgkit/geometry/surface.hpp"

namespace fsgkit {

using Wrench = VecN<6>;

struct ContactWrenchSet {
    std::vector<SurfacePoint> contacts;
    double mu = 0.5;
    int m_edges = 8;
    double torque_scale = 1.0;
    std::vector<Wrench> wrenches;    // contact-major, m_edges per contact
    std::vector<std::size_t> group;  // per contact: index of its normal group
};

struct QualityReport {
    double q1 = 0;
    bool force_closure = false;
    double gws_volume = 0;
    std::size_t hull_facets = 0;
};

struct QualityParams {
    double mu = 0.5;
    int m_edges = 8;
};

/// Groups contacts whose unit normals agree within 1e-9; returns the group
/// index per contact and each group's representative normal (its first member's).
inline std::pair<std::vector<std::size_t>, std::vector<Vec3>> normal_groups(const std::vector<SurfacePoint>& contacts) {
    std::vector<std::size_t> group(contacts.size());
    std::vector<Vec3> normals;
    for (std::size_t i = 0; i < contacts.size(); ++i) {
        const double len = contacts[i].normal.norm();
        if (!(len > 1e-12)) throw Error(ErrorKind::InvalidContact, "contact normal has zero length");
        const Vec3 n = contacts[i].normal / len;
        std::size_t g = 0;
        while (g < normals.size() && (normals[g] - n).norm() > 1e-9) ++g;
        if (g == normals.size()) normals.push_back(n);
        group[i] = g;
    }
    return {group, normals};
}

/// Friction-pyramid edge wrenches. Force edges lean atan(mu) away from the
/// inward normal and are renormalised to unit length; torques are taken
/// about `centroid` and multiplied by `torque_scale`. Contacts sharing a
/// normal share one pyramid whose first edge lies in the plane of the normal
/// and the lever arm of the group's mean (distinct) position, so the set is
/// equivariant under rigid motions and affine in position within a group.
inline ContactWrenchSet build_wrenches(const std::vector<SurfacePoint>& contacts, const Vec3& centroid, double mu,
                                       int m_edges, double torque_scale) {
    if (contacts.empty()) throw Error(ErrorKind::InvalidArgument, "at least one contact is required");
    if (mu < 0 || m_edges < 3) throw Error(ErrorKind::InvalidArgument, "need mu >= 0 and at least 3 cone edges");
    auto [group, normals] = normal_groups(contacts);
    std::vector<std::vector<Vec3>> distinct(normals.size());
    for (std::size_t i = 0; i < contacts.size(); ++i) {
        auto& d = distinct[group[i]];
        if (std::find(d.begin(), d.end(), contacts[i].position) == d.end()) d.push_back(contacts[i].position);
    }
    std::vector<std::vector<Vec3>> edges(normals.size());
    for (std::size_t g = 0; g < normals.size(); ++g) {
        const Vec3& n = normals[g];
        Vec3 mean = Vec3::Zero();
        for (const auto& p : distinct[g]) mean += p;
        const Vec3 arm = mean / static_cast<double>(distinct[g].size()) - centroid;
        Vec3 t1 = arm - arm.dot(n) * n;
        if (t1.norm() <= 1e-9 * std::max(1.0, arm.norm())) {
            t1 = orthonormal_basis(n).first;
        } else {
            t1.normalize();
        }
        const Vec3 t2 = n.cross(t1);
        for (int j = 0; j < m_edges; ++j) {
            const double a = 2.0 * M_PI * j / m_edges;
            edges[g].push_back((-n + mu * (std::cos(a) * t1 + std::sin(a) * t2)).normalized());
        }
    }
    ContactWrenchSet ws{contacts, mu, m_edges, torque_scale, {}, group};
    ws.wrenches.reserve(contacts.size() * static_cast<std::size_t>(m_edges));
    for (std::size_t i = 0; i < contacts.size(); ++i) {
        const Vec3 arm = contacts[i].position - centroid;
        for (const auto& f : edges[group[i]]) {
            Wrench w;
            w.head<3>() = f;
            w.tail<3>() = torque_scale * arm.cross(f);
            ws.wrenches.push_back(w);
        }
    }
    return ws;
}

/// Contacts that can contribute hull vertices: within a normal group the
/// wrenches are affine in position, so only extreme positions matter.
inline std::vector<std::size_t> support_contacts(const ContactWrenchSet& ws) {
    std::size_t groups = 0;
    for (auto g : ws.group) groups = std::max(groups, g + 1);
    std::vector<std::vector<std::size_t>> members(groups);
    for (std::size_t i = 0; i < ws.group.size(); ++i) members[ws.group[i]].push_back(i);
    std::vector<std::size_t> keep;
    for (const auto& m : members) {
        std::vector<std::size_t> uniq;
        std::vector<Vec3> pts;
        for (auto i : m) {
            const Vec3& p = ws.contacts[i].position;
            if (std::find(pts.begin(), pts.end(), p) == pts.end()) {
                pts.push_back(p);
                uniq.push_back(i);
            }
        }
        if (pts.size() <= 3) {
            keep.insert(keep.end(), uniq.begin(), uniq.end());
            continue;
        }
        Vec3 mean = Vec3::Zero();
        for (const auto& p : pts) mean += p;
        mean /= static_cast<double>(pts.size());
        Eigen::MatrixXd c(3, static_cast<Eigen::Index>(pts.size()));
        for (std::size_t k = 0; k < pts.size(); ++k) c.col(static_cast<Eigen::Index>(k)) = pts[k] - mean;
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeThinU);
        const auto sv = svd.singularValues();
        const double tol = 1e-9 * std::max(sv[0], 1e-300);
        std::vector<std::size_t> chosen;
        if (sv[2] > tol) {
            try {
                chosen = convex_hull<3>(pts).vertices;
            } catch (const DegenerateHullError&) {
                chosen.resize(pts.size());
                for (std::size_t k = 0; k < pts.size(); ++k) chosen[k] = k;
            }
        } else if (sv[1] > tol) {
            std::vector<Vec2> flat;
            for (const auto& p : pts) {
                const Vec3 d = p - mean;
                flat.emplace_back(d.dot(svd.matrixU().col(0)), d.dot(svd.matrixU().col(1)));
            }
            chosen = convex_polygon(flat);
        } else {
            std::size_t lo = 0, hi = 0;
            for (std::size_t k = 1; k < pts.size(); ++k) {
                const double t = (pts[k] - mean).dot(svd.matrixU().col(0));
                if (t < (pts[lo] - mean).dot(svd.matrixU().col(0))) lo = k;
                if (t > (pts[hi] - mean).dot(svd.matrixU().col(0))) hi = k;
            }
            chosen = lo == hi ? std::vector<std::size_t>{lo} : std::vector<std::size_t>{lo, hi};
        }
        for (auto k : chosen) keep.push_back(uniq[k]);
    }
    std::sort(keep.begin(), keep.end());
    return keep;
}

/// Minimum-norm point of conv(points) by Wolfe's method; returns its norm.
inline double min_norm_distance(std::span<const Wrench> points) {
    const auto n = points.size();
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "empty point set");
    double scale2 = 0;
    for (const auto& p : points) scale2 = std::max(scale2, p.squaredNorm());
    const double tol = 1e-12 * std::max(scale2, 1e-300);

    std::size_t start = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (points[i].squaredNorm() < points[start].squaredNorm()) start = i;
    }
    std::vector<std::size_t> s{start};
    std::vector<double> lambda{1.0};
    Wrench x = points[start];

    auto affine_min = [&](const std::vector<std::size_t>& idx) {
        const auto k = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
        for (Eigen::Index i = 0; i < k; ++i) {
            for (Eigen::Index j = 0; j < k; ++j) kkt(i, j) = points[idx[i]].dot(points[idx[j]]);
            kkt(i, k) = 1.0;
            kkt(k, i) = 1.0;
        }
        rhs[k] = 1.0;
        return Eigen::VectorXd(kkt.completeOrthogonalDecomposition().solve(rhs).head(k));
    };

    for (int major = 0; major < 1000; ++major) {
        std::size_t j = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const double v = x.dot(points[i]);
            if (v < best) {
                best = v;
                j = i;
            }
        }
        if (x.squaredNorm() - best <= tol) break;
        if (std::find(s.begin(), s.end(), j) != s.end()) break;
        s.push_back(j);
        lambda.push_back(0.0);
        for (int minor = 0; minor < 1000; ++minor) {
            const Eigen::VectorXd alpha = affine_min(s);
            bool interior = true;
            for (Eigen::Index i = 0; i < alpha.size(); ++i) interior = interior && alpha[i] > 1e-14;
            if (interior) {
                for (std::size_t i = 0; i < s.size(); ++i) lambda[i] = alpha[static_cast<Eigen::Index>(i)];
                break;
            }
            double theta = 1.0;
            for (std::size_t i = 0; i < s.size(); ++i) {
                const double a = alpha[static_cast<Eigen::Index>(i)];
                if (a <= 1e-14 && lambda[i] - a > 0) theta = std::min(theta, lambda[i] / (lambda[i] - a));
            }
            std::vector<std::size_t> ns;
            std::vector<double> nl;
            for (std::size_t i = 0; i < s.size(); ++i) {
                const double l = theta * alpha[static_cast<Eigen::Index>(i)] + (1 - theta) * lambda[i];
                if (l > 1e-14) {
                    ns.push_back(s[i]);
                    nl.push_back(l);
                }
            }
            if (ns.empty()) {
                ns = {s.back()};
                nl = {1.0};
            }
            double total = 0;
            for (double l : nl) total += l;
            for (double& l : nl) l /= total;
            s = std::move(ns);
            lambda = std::move(nl);
        }
        Wrench nx = Wrench::Zero();
        for (std::size_t i = 0; i < s.size(); ++i) nx += lambda[i] * points[s[i]];
        if (nx.squaredNorm() >= x.squaredNorm() - 1e-15 * std::max(scale2, 1e-300) && major > 0) {
            x = nx.squaredNorm() < x.squaredNorm() ? nx : x;
            break;
        }
        x = nx;
    }
    return x.norm();
}

/// Distance from the origin to the affine hull of `points`.
inline double affine_hull_distance(std::span<const Wrench> points) {
    if (points.size() == 1) return points[0].norm();
    Eigen::MatrixXd d(6, static_cast<Eigen::Index>(points.size() - 1));
    for (std::size_t i = 1; i < points.size(); ++i) d.col(static_cast<Eigen::Index>(i - 1)) = points[i] - points[0];
    const Eigen::VectorXd rhs = -points[0];
    const Eigen::VectorXd coef = d.completeOrthogonalDecomposition().solve(rhs);
    return (points[0] + d * coef).norm();
}

/// GWS epsilon of a wrench set: depth of the origin inside the 6D hull when
/// it is strictly inside, otherwise minus its distance to the hull (or to
/// the affine hull when the wrenches do not span six dimensions).
inline QualityReport q1_epsilon(std::span<const Wrench> wrenches) {
    QualityReport r;
    if (wrenches.empty()) throw Error(ErrorKind::InvalidArgument, "no wrenches");
    const bool full = wrenches.size() >= 7 && affine_rank<6>(wrenches, 1e-9) == 6;
    if (!full) {
        r.q1 = -affine_hull_distance(wrenches);
        return r;
    }
    Hull<6> hull;
    try {
        hull = convex_hull<6>(wrenches);
    } catch (const DegenerateHullError&) {
        r.q1 = -affine_hull_distance(wrenches);
        return r;
    }
    double scale = 0;
    for (const auto& w : wrenches) scale = std::max(scale, w.norm());
    r.gws_volume = hull.volume;
    r.hull_facets = hull.facets.size();
    const double depth = hull.depth(Wrench::Zero());
    if (depth > 1e-12 * scale) {
        r.q1 = depth;
        r.force_closure = true;
    } else {
        r.q1 = -min_norm_distance(wrenches);
    }
    return r;
}

/// Same result as scoring every wrench; only support contacts enter the hull.
inline QualityReport q1_epsilon(const ContactWrenchSet& ws) {
    if (ws.group.size() != ws.contacts.size()) return q1_epsilon(std::span<const Wrench>(ws.wrenches));
    std::vector<Wrench> reduced;
    const auto m = static_cast<std::size_t>(ws.m_edges);
    for (auto i : support_contacts(ws)) {
        reduced.insert(reduced.end(), ws.wrenches.begin() + static_cast<std::ptrdiff_t>(i * m),
                       ws.wrenches.begin() + static_cast<std::ptrdiff_t>((i + 1) * m));
    }
    return q1_epsilon(std::span<const Wrench>(reduced));
}

inline QualityReport q1_epsilon(const std::vector<Wrench>& w) { return q1_epsilon(std::span<const Wrench>(w)); }

/// Scores contacts (frame_obj) of an object whose torque reference is its
/// mesh centroid and whose torques are scaled by 1 / characteristic length.
inline QualityReport evaluate_contacts(const std::vector<SurfacePoint>& contacts, const Vec3& centroid,
                                       double characteristic_length, const QualityParams& params = {}) {
    if (!(characteristic_length > 0)) throw Error(ErrorKind::InvalidArgument, "characteristic length must be positive");
    return q1_epsilon(build_wrenches(contacts, centroid, params.mu, params.m_edges, 1.0 / characteristic_length));
}

}  // namespace fsgkit
