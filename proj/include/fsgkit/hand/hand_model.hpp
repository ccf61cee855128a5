#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fsgkit/errors.hpp"
#include "fsgkit/geometry/mesh.hpp"
#include "fsgkit/geometry/surface.hpp"

namespace fsgkit {

struct JointSpec {
    std::string name;
    Vec3 axis = Vec3::UnitZ();
    RigidTransform origin;  // parent link -> joint frame
    double lower = 0;       // radians
    double upper = 0;
    std::optional<std::string> coupled_to;
};

/// Angles of one finger's independent joints, in chain order (radians).
struct JointCombination {
    std::vector<double> angles;

    friend bool operator==(const JointCombination&, const JointCombination&) = default;
    friend auto operator<=>(const JointCombination& a, const JointCombination& b) { return a.angles <=> b.angles; }
};

struct FingerChain {
    std::string name;
    std::vector<JointSpec> joints;
    std::vector<double> link_lengths;
    RigidTransform tip_offset;  // last joint frame -> frame_tip
    TriangleMesh tip_mesh;
    std::string tip_mesh_path;
    Vec3 v_f = Vec3::UnitY();
    Vec3 v_u = Vec3::UnitZ();
    double tip_width = 0.01;
    int priority = 1;

    /// For each joint, the index of the joint whose angle it takes (itself if independent).
    std::vector<std::size_t> angle_source;
    std::vector<std::size_t> independent;  // joint indices in chain order

    std::size_t independent_count() const { return independent.size(); }

    /// Full per-joint angles with coupled joints resolved. Throws JointLimit.
    std::vector<double> resolve(const JointCombination& combo) const {
        if (combo.angles.size() != independent.size()) {
            throw Error(ErrorKind::InvalidArgument, "finger " + name + " expects " +
                                                         std::to_string(independent.size()) + " joint angles, got " +
                                                         std::to_string(combo.angles.size()));
        }
        std::vector<double> full(joints.size(), 0.0);
        for (std::size_t k = 0; k < independent.size(); ++k) full[independent[k]] = combo.angles[k];
        for (std::size_t j = 0; j < joints.size(); ++j) full[j] = full[angle_source[j]];
        constexpr double tol = 1e-9;
        for (std::size_t j = 0; j < joints.size(); ++j) {
            if (!(full[j] >= joints[j].lower - tol && full[j] <= joints[j].upper + tol)) {
                throw Error(ErrorKind::JointLimit, "joint " + joints[j].name + " angle " +
                                                       std::to_string(rad2deg(full[j])) + " deg outside limits");
            }
        }
        return full;
    }

    /// Joint frames in frame_palm after each joint rotation, followed by frame_tip.
    std::vector<RigidTransform> frames(const RigidTransform& palm_alignment, const JointCombination& combo) const {
        const auto full = resolve(combo);
        std::vector<RigidTransform> out;
        out.reserve(joints.size() + 1);
        RigidTransform t = palm_alignment;
        for (std::size_t j = 0; j < joints.size(); ++j) {
            t = t * joints[j].origin * RigidTransform::from_axis_angle(joints[j].axis, full[j]);
            out.push_back(t);
        }
        out.push_back(t * tip_offset);
        return out;
    }

    /// Limits of independent joint k intersected with every joint mirroring it.
    std::pair<double, double> effective_limits(std::size_t k) const {
        const std::size_t src = independent.at(k);
        double lo = joints[src].lower, hi = joints[src].upper;
        for (std::size_t j = 0; j < joints.size(); ++j) {
            if (angle_source[j] != src) continue;
            lo = std::max(lo, joints[j].lower);
            hi = std::min(hi, joints[j].upper);
        }
        return {lo, hi};
    }

    JointCombination zero_combination() const { return {std::vector<double>(independent.size(), 0.0)}; }
};

struct PalmBox {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Zero();

    bool contains(const Vec3& p) const {
        return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
    }

    std::array<Vec3, 8> corners() const {
        std::array<Vec3, 8> c;
        for (int i = 0; i < 8; ++i) {
            c[i] = Vec3(i & 1 ? max.x() : min.x(), i & 2 ? max.y() : min.y(), i & 4 ? max.z() : min.z());
        }
        return c;
    }
};

struct HandModel {
    std::string name;
    std::vector<FingerChain> fingers;
    PalmBox palm_box;
    RigidTransform palm_alignment;

    const FingerChain& finger(const std::string& finger_name) const {
        for (const auto& f : fingers) {
            if (f.name == finger_name) return f;
        }
        throw Error(ErrorKind::NotFound, "hand " + name + " has no finger named " + finger_name);
    }

    bool has_finger(const std::string& finger_name) const {
        return std::any_of(fingers.begin(), fingers.end(), [&](const auto& f) { return f.name == finger_name; });
    }
};

namespace detail {

inline Vec3 json_vec3(const nlohmann::json& j, const std::string& ctx) {
    if (!j.is_array() || j.size() != 3) throw Error(ErrorKind::SchemaError, ctx + ": expected a 3-element array");
    for (const auto& v : j) {
        if (!v.is_number()) throw Error(ErrorKind::SchemaError, ctx + ": expected numbers");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline RigidTransform json_xyz_rpy(const nlohmann::json& j, const std::string& ctx) {
    if (!j.is_object()) throw Error(ErrorKind::SchemaError, ctx + ": expected {xyz, rpy}");
    const Vec3 xyz = j.contains("xyz") ? json_vec3(j["xyz"], ctx + ".xyz") : Vec3::Zero();
    const Vec3 rpy = j.contains("rpy") ? json_vec3(j["rpy"], ctx + ".rpy") : Vec3::Zero();
    return RigidTransform::from_xyz_rpy(xyz, rpy * kDegToRad);
}

template <typename T>
T json_get(const nlohmann::json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key)) throw Error(ErrorKind::SchemaError, ctx + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::SchemaError, ctx + "." + key + ": " + e.what());
    }
}

/// Fills angle_source / independent and rejects unknown targets and cycles.
inline void resolve_coupling(FingerChain& f) {
    std::map<std::string, std::size_t> by_name;
    for (std::size_t j = 0; j < f.joints.size(); ++j) {
        if (!by_name.emplace(f.joints[j].name, j).second) {
            throw Error(ErrorKind::SchemaError, "finger " + f.name + ": duplicate joint name " + f.joints[j].name);
        }
    }
    f.angle_source.assign(f.joints.size(), 0);
    f.independent.clear();
    for (std::size_t j = 0; j < f.joints.size(); ++j) {
        std::size_t cur = j;
        std::set<std::size_t> seen{cur};
        while (f.joints[cur].coupled_to) {
            auto it = by_name.find(*f.joints[cur].coupled_to);
            if (it == by_name.end()) {
                throw Error(ErrorKind::SchemaError,
                            "joint " + f.joints[cur].name + " coupled to unknown joint " + *f.joints[cur].coupled_to);
            }
            cur = it->second;
            if (!seen.insert(cur).second) {
                throw Error(ErrorKind::SchemaError, "coupling cycle through joint " + f.joints[j].name);
            }
        }
        f.angle_source[j] = cur;
        if (cur == j) f.independent.push_back(j);
    }
}

}  // namespace detail

/// Parses a hand document; mesh paths are resolved against `base_dir`.
inline HandModel parse_hand_model(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
    using detail::json_get;
    HandModel hand;
    hand.name = json_get<std::string>(doc, "name", "hand");
    if (!doc.contains("fingers") || !doc["fingers"].is_array() || doc["fingers"].empty()) {
        throw Error(ErrorKind::SchemaError, "hand: 'fingers' must be a non-empty array");
    }
    std::set<int> priorities;
    for (std::size_t fi = 0; fi < doc["fingers"].size(); ++fi) {
        const auto& fj = doc["fingers"][fi];
        FingerChain f;
        f.name = json_get<std::string>(fj, "name", "fingers[" + std::to_string(fi) + "]");
        const std::string ctx = "finger " + f.name;
        f.priority = json_get<int>(fj, "priority", ctx);
        if (!priorities.insert(f.priority).second) {
            throw Error(ErrorKind::SchemaError, ctx + ": priority " + std::to_string(f.priority) + " is not unique");
        }
        f.tip_width = json_get<double>(fj, "tip_width_m", ctx);
        if (!(f.tip_width > 0)) throw Error(ErrorKind::SchemaError, ctx + ": tip_width_m must be positive");
        f.v_f = detail::json_vec3(fj.at("v_f"), ctx + ".v_f").normalized();
        f.v_u = detail::json_vec3(fj.at("v_u"), ctx + ".v_u").normalized();
        if (std::abs(f.v_f.dot(f.v_u)) > 1e-3) throw Error(ErrorKind::SchemaError, ctx + ": v_f and v_u not perpendicular");
        if (fj.contains("tip_origin")) f.tip_offset = detail::json_xyz_rpy(fj["tip_origin"], ctx + ".tip_origin");

        if (!fj.contains("joints") || !fj["joints"].is_array() || fj["joints"].empty()) {
            throw Error(ErrorKind::SchemaError, ctx + ": 'joints' must be a non-empty array");
        }
        for (const auto& jj : fj["joints"]) {
            JointSpec js;
            js.name = json_get<std::string>(jj, "name", ctx + ".joints");
            const std::string jctx = ctx + ".joint " + js.name;
            js.axis = detail::json_vec3(jj.at("axis"), jctx + ".axis");
            if (!(js.axis.norm() > 0)) throw Error(ErrorKind::SchemaError, jctx + ": zero axis");
            js.axis.normalize();
            if (jj.contains("origin")) js.origin = detail::json_xyz_rpy(jj["origin"], jctx + ".origin");
            const auto lim = json_get<std::vector<double>>(jj, "limits_deg", jctx);
            if (lim.size() != 2) throw Error(ErrorKind::SchemaError, jctx + ": limits_deg must have two entries");
            if (lim[0] > lim[1]) {
                throw Error(ErrorKind::SchemaError, jctx + ": inverted limits [" + std::to_string(lim[0]) + ", " +
                                                        std::to_string(lim[1]) + "]");
            }
            js.lower = deg2rad(lim[0]);
            js.upper = deg2rad(lim[1]);
            if (jj.contains("coupled_to") && !jj["coupled_to"].is_null()) {
                js.coupled_to = json_get<std::string>(jj, "coupled_to", jctx);
            }
            f.joints.push_back(std::move(js));
        }
        detail::resolve_coupling(f);
        for (std::size_t j = 1; j < f.joints.size(); ++j) f.link_lengths.push_back(f.joints[j].origin.translation.norm());
        f.link_lengths.push_back(f.tip_offset.translation.norm());

        f.tip_mesh_path = json_get<std::string>(fj, "tip_mesh", ctx);
        f.tip_mesh = load_mesh(base_dir / f.tip_mesh_path);
        if (f.tip_mesh.empty()) throw Error(ErrorKind::InvalidMesh, ctx + ": tip mesh has no triangles");
        hand.fingers.push_back(std::move(f));
    }
    if (!doc.contains("palm_box")) throw Error(ErrorKind::SchemaError, "hand: missing field 'palm_box'");
    hand.palm_box.min = detail::json_vec3(doc["palm_box"].at("min"), "palm_box.min");
    hand.palm_box.max = detail::json_vec3(doc["palm_box"].at("max"), "palm_box.max");
    if (!((hand.palm_box.max - hand.palm_box.min).array() > 0).all()) {
        throw Error(ErrorKind::SchemaError, "palm_box must have positive volume");
    }
    if (doc.contains("palm_alignment")) hand.palm_alignment = detail::json_xyz_rpy(doc["palm_alignment"], "palm_alignment");
    return hand;
}

inline HandModel load_hand_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::AssetMissing, "cannot open hand model " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::SchemaError, path.string() + ": " + e.what());
    }
    try {
        return parse_hand_model(doc, path.parent_path());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::SchemaError, path.string() + ": " + e.what());
    }
}

/// frame_palm -> frame_tip for one finger.
inline RigidTransform forward_kinematics(const HandModel& hand, const std::string& finger, const JointCombination& combo) {
    return hand.finger(finger).frames(hand.palm_alignment, combo).back();
}

/// Sorted, duplicate-free product of {center + k*step} per independent joint, clamped to limits.
inline std::vector<JointCombination> enumerate_joint_combinations(const HandModel& hand, const std::string& finger,
                                                                  const std::vector<double>& centers, double step,
                                                                  int steps_each_way) {
    const auto& f = hand.finger(finger);
    if (centers.size() != f.independent_count()) {
        throw Error(ErrorKind::InvalidArgument, "finger " + finger + ": one center per independent joint required");
    }
    if (!(step > 0) || steps_each_way < 0) throw Error(ErrorKind::InvalidArgument, "step must be > 0, steps >= 0");
    std::vector<std::vector<double>> axes;
    for (std::size_t k = 0; k < centers.size(); ++k) {
        const auto [lo, hi] = f.effective_limits(k);
        if (lo > hi) throw Error(ErrorKind::JointLimit, "finger " + finger + ": coupled joints have disjoint limits");
        std::vector<double> vals;
        for (int s = -steps_each_way; s <= steps_each_way; ++s) {
            vals.push_back(std::clamp(centers[k] + s * step, lo, hi));
        }
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                   vals.end());
        axes.push_back(std::move(vals));
    }
    std::vector<JointCombination> out{{}};
    for (const auto& vals : axes) {
        std::vector<JointCombination> next;
        next.reserve(out.size() * vals.size());
        for (const auto& prefix : out) {
            for (double v : vals) {
                JointCombination c = prefix;
                c.angles.push_back(v);
                next.push_back(std::move(c));
            }
        }
        out = std::move(next);
    }
    return out;
}

/// Joint-origin polyline (frame_palm) from the first joint to the fingertip
/// link origin, densified to at most `max_spacing` between samples.
inline std::vector<Vec3> link_skeleton(const HandModel& hand, const std::string& finger, const JointCombination& combo,
                                       double max_spacing = 0.005) {
    const auto frames = hand.finger(finger).frames(hand.palm_alignment, combo);
    std::vector<Vec3> out;
    for (std::size_t j = 0; j + 1 < frames.size(); ++j) {
        const Vec3 p = frames[j].translation;
        if (!out.empty()) {
            const Vec3 a = out.back();
            const int pieces = static_cast<int>(std::ceil((p - a).norm() / max_spacing));
            for (int k = 1; k < pieces; ++k) out.push_back(a + (p - a) * (static_cast<double>(k) / pieces));
        }
        out.push_back(p);
    }
    return out;
}

inline std::size_t palm_box_contains(const HandModel& hand, const SurfaceCloud& palm_points) {
    std::size_t n = 0;
    for (const auto& p : palm_points) n += hand.palm_box.contains(p.position);
    return n;
}

}  // namespace fsgkit
