#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "fsgkit/errors.hpp"
#include "fsgkit/geometry/kdtree.hpp"
#include "fsgkit/geometry/mesh.hpp"
#include "fsgkit/geometry/sampling.hpp"
#include "fsgkit/parallel.hpp"

namespace fsgkit {

struct ObjectAsset {
    std::string name;
    TriangleMesh mesh;
    SurfaceCloud cloud_full;
    SurfaceCloud cloud_part;
    std::vector<std::size_t> part_indices;  // into cloud_full
    bool on_table = false;
    double characteristic_length = 0;  // bounding-box diagonal

    void set_part(std::vector<std::size_t> indices) {
        part_indices = std::move(indices);
        cloud_part = cloud_full.subset(part_indices);
    }
};

inline SurfaceCloud sample_object(const TriangleMesh& mesh, std::size_t count, std::uint64_t seed) {
    return poisson_disk_sample(mesh, count, seed, FrameTag::obj);
}

/// Surface variation l0 / (l0 + l1 + l2) of the k-neighbourhood covariance (point included).
inline std::vector<double> estimate_curvature(const SurfaceCloud& cloud, std::size_t k = 16, unsigned threads = 1) {
    if (k < 4 || cloud.size() <= k) {
        throw Error(ErrorKind::EmptyCloud, "curvature needs more than k >= 4 points (have " +
                                               std::to_string(cloud.size()) + ", k=" + std::to_string(k) + ")");
    }
    std::vector<Vec3> pts;
    pts.reserve(cloud.size());
    for (const auto& p : cloud) pts.push_back(p.position);
    const NeighborIndex index(pts);
    std::vector<double> out(cloud.size());
    parallel_for(cloud.size(), threads, [&](std::size_t i) {
        const auto hits = index.k_nearest(pts[i], k);
        Vec3 mean = Vec3::Zero();
        for (const auto& h : hits) mean += pts[h.index];
        mean /= static_cast<double>(hits.size());
        Mat3 cov = Mat3::Zero();
        for (const auto& h : hits) {
            const Vec3 d = pts[h.index] - mean;
            cov += d * d.transpose();
        }
        const Eigen::SelfAdjointEigenSolver<Mat3> eig(cov, Eigen::EigenvaluesOnly);
        const Vec3 l = eig.eigenvalues().cwiseMax(0.0);
        const double sum = l.sum();
        out[i] = sum > 0 ? l[0] / sum : 0.0;
    });
    return out;
}

/// Linear-interpolated percentile (0..100) of `values`.
inline double percentile_of(std::vector<double> values, double pct) {
    if (values.empty()) throw Error(ErrorKind::EmptyCloud, "percentile of an empty set");
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(pct, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

/// Indices of points whose curvature is at most the given percentile.
inline std::vector<std::size_t> graspable_part_indices(const SurfaceCloud& cloud_full, double pct, std::size_t k = 16,
                                                       unsigned threads = 1) {
    if (!(pct >= 0 && pct <= 100)) throw Error(ErrorKind::InvalidArgument, "percentile must lie in [0, 100]");
    const auto curv = estimate_curvature(cloud_full, k, threads);
    const double limit = percentile_of(curv, pct);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < curv.size(); ++i) {
        if (curv[i] <= limit) keep.push_back(i);
    }
    if (keep.empty()) throw Error(ErrorKind::EmptyCloud, "graspable part is empty");
    return keep;
}

inline SurfaceCloud extract_graspable_part(const SurfaceCloud& cloud_full, double pct, std::size_t k = 16) {
    return cloud_full.subset(graspable_part_indices(cloud_full, pct, k));
}

inline SurfaceCloud load_affordance_part(const SurfaceCloud& cloud_full, const std::vector<std::size_t>& indices) {
    if (indices.empty()) throw Error(ErrorKind::EmptyCloud, "affordance annotation selects no points");
    for (auto i : indices) {
        if (i >= cloud_full.size()) {
            throw Error(ErrorKind::SchemaError, "affordance index " + std::to_string(i) + " out of range (cloud has " +
                                                    std::to_string(cloud_full.size()) + " points)");
        }
    }
    return cloud_full.subset(indices);
}

/// Affordance annotation file: {"object": name, "indices": [int]} and/or
/// {"regions": [{"min": [x,y,z], "max": [x,y,z]}]} selecting the cloud_full
/// points inside any box (frame_obj, after scaling and table lift).
inline std::vector<std::size_t> load_affordance_indices(const std::filesystem::path& path,
                                                        const SurfaceCloud& cloud_full) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::AssetMissing, "cannot open affordance file " + path.string());
    std::vector<std::size_t> out;
    try {
        const auto doc = nlohmann::json::parse(in);
        if (!doc.contains("indices") && !doc.contains("regions")) {
            throw Error(ErrorKind::SchemaError, path.string() + ": needs 'indices' or 'regions'");
        }
        if (doc.contains("indices")) {
            for (const auto& v : doc.at("indices")) {
                if (!v.is_number_integer() || v.get<long long>() < 0) {
                    throw Error(ErrorKind::SchemaError, path.string() + ": indices must be non-negative integers");
                }
                out.push_back(v.get<std::size_t>());
            }
        }
        if (doc.contains("regions")) {
            for (const auto& r : doc.at("regions")) {
                const auto lo = r.at("min").get<std::array<double, 3>>();
                const auto hi = r.at("max").get<std::array<double, 3>>();
                for (std::size_t i = 0; i < cloud_full.size(); ++i) {
                    const Vec3& p = cloud_full[i].position;
                    bool inside = true;
                    for (int d = 0; d < 3; ++d) inside = inside && p[d] >= lo[d] && p[d] <= hi[d];
                    if (inside) out.push_back(i);
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::SchemaError, path.string() + ": " + e.what());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// One entry of an object manifest.
struct ObjectSpec {
    std::string name;
    std::filesystem::path mesh_path;
    bool on_table = false;
    std::optional<std::filesystem::path> affordance_path;
    double scale = 1.0;
};

struct ObjectOptions {
    std::size_t sample_count = 1024;
    double curvature_percentile = 80.0;
    std::size_t curvature_k = 16;
    bool use_affordance = false;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

inline std::uint64_t name_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
    return h;
}

/// Loads and scales the mesh; table objects are lifted so their lowest point sits on y = 0.
inline TriangleMesh load_object_mesh(const ObjectSpec& spec) {
    auto mesh = load_mesh(spec.mesh_path);
    if (mesh.empty()) throw Error(ErrorKind::InvalidMesh, spec.mesh_path.string() + " has no triangles");
    if (spec.scale != 1.0) mesh = mesh.transformed(RigidTransform::identity(), spec.scale);
    if (spec.on_table) {
        const auto [lo, hi] = mesh.bounds();
        mesh = mesh.transformed(RigidTransform::from(Mat3::Identity(), Vec3(0, -lo.y(), 0)));
    }
    return mesh;
}

/// Object mesh plus cloud_full and the selected cloud_part.
inline ObjectAsset prepare_object(const ObjectSpec& spec, const ObjectOptions& opt) {
    ObjectAsset a;
    a.name = spec.name;
    a.on_table = spec.on_table;
    a.mesh = load_object_mesh(spec);
    a.characteristic_length = a.mesh.bbox_diagonal();
    a.cloud_full = sample_object(a.mesh, opt.sample_count, Rng({opt.seed, name_hash(spec.name)}).next_u64());
    if (opt.use_affordance && spec.affordance_path) {
        auto idx = load_affordance_indices(*spec.affordance_path, a.cloud_full);
        load_affordance_part(a.cloud_full, idx);
        a.set_part(std::move(idx));
    } else if (opt.use_affordance) {
        a.set_part(graspable_part_indices(a.cloud_full, opt.curvature_percentile, opt.curvature_k, opt.threads));
    } else {
        std::vector<std::size_t> all(a.cloud_full.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        a.set_part(std::move(all));
    }
    return a;
}

/// Accepts a single object entry, an array of entries or {"objects": [...]}.
inline std::vector<ObjectSpec> load_object_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::AssetMissing, "cannot open object manifest " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::SchemaError, path.string() + ": " + e.what());
    }
    if (doc.is_object() && doc.contains("objects")) doc = doc["objects"];
    if (doc.is_object()) doc = nlohmann::json::array({doc});
    if (!doc.is_array()) throw Error(ErrorKind::SchemaError, path.string() + ": expected object entries");
    std::vector<ObjectSpec> out;
    const auto base = path.parent_path();
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& e = doc[i];
        const std::string ctx = path.string() + ": objects[" + std::to_string(i) + "]";
        try {
            ObjectSpec s;
            s.name = e.at("name").get<std::string>();
            s.mesh_path = base / e.at("mesh_path").get<std::string>();
            s.on_table = e.value("on_table", false);
            if (e.contains("affordance_path") && !e["affordance_path"].is_null()) {
                s.affordance_path = base / e["affordance_path"].get<std::string>();
            }
            s.scale = e.value("scale", 1.0);
            if (!(s.scale > 0)) throw Error(ErrorKind::SchemaError, ctx + ": scale must be positive");
            out.push_back(std::move(s));
        } catch (const nlohmann::json::exception& ex) {
            throw Error(ErrorKind::SchemaError, ctx + ": " + ex.what());
        }
    }
    return out;
}

}  // namespace fsgkit
