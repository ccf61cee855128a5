#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fsgkit/autows/autows.hpp"
#include "fsgkit/errors.hpp"
#include "fsgkit/fsg/fsg.hpp"
#include "fsgkit/hand/hand_model.hpp"
#include "fsgkit/object/object_processing.hpp"

namespace fsgkit {

using ojson = nlohmann::ordered_json;

/// One dataset line as stored on disk: degrees, quaternion wxyz, frame_obj.
struct DatasetRecord {
    std::string pose_id;
    std::string object;
    std::optional<std::string> demo;
    std::array<double, 3> palm_xyz{};
    std::array<double, 4> palm_quat_wxyz{1, 0, 0, 0};
    std::map<std::string, std::vector<double>> joint_angles_deg;
    std::vector<std::string> fingers_used;
    std::vector<std::array<double, 6>> contacts;
    std::vector<std::size_t> contact_indices;
    double q1 = 0;
    double gws_volume = 0;
    Provenance provenance;

    RigidTransform palm_pose() const {
        return RigidTransform::from_xyz_quat({palm_xyz[0], palm_xyz[1], palm_xyz[2]}, palm_quat_wxyz);
    }

    std::vector<SurfacePoint> contact_points() const {
        std::vector<SurfacePoint> out;
        for (const auto& c : contacts) out.push_back({{c[0], c[1], c[2]}, {c[3], c[4], c[5]}});
        return out;
    }
};

/// Record for a synthesized pose; fingers of `hand` absent from the pose get zero angles.
inline DatasetRecord make_record(const GraspPose& pose, const HandModel& hand, const std::string& pose_id,
                                 const std::optional<std::string>& demo = std::nullopt) {
    DatasetRecord r;
    r.pose_id = pose_id;
    r.object = pose.object;
    r.demo = demo;
    for (int k = 0; k < 3; ++k) r.palm_xyz[static_cast<std::size_t>(k)] = pose.palm_pose.translation[k];
    r.palm_quat_wxyz = pose.palm_pose.quaternion_wxyz();
    for (const auto& f : hand.fingers) {
        auto it = pose.joint_angles.find(f.name);
        std::vector<double> deg;
        if (it != pose.joint_angles.end()) {
            for (double a : it->second.angles) deg.push_back(rad2deg(a));
        } else {
            deg.assign(f.independent_count(), 0.0);
        }
        r.joint_angles_deg[f.name] = deg;
    }
    r.fingers_used = pose.fingers_used;
    for (const auto& c : pose.contacts) {
        r.contacts.push_back({c.position.x(), c.position.y(), c.position.z(), c.normal.x(), c.normal.y(), c.normal.z()});
    }
    r.contact_indices = pose.contact_indices;
    r.q1 = pose.q1;
    r.gws_volume = pose.gws_volume;
    r.provenance = pose.provenance;
    return r;
}

inline ojson to_json(const DatasetRecord& r) {
    ojson j;
    j["pose_id"] = r.pose_id;
    j["object"] = r.object;
    if (r.demo) j["demo"] = *r.demo;
    j["palm_pose"] = {{"xyz", r.palm_xyz}, {"quaternion_wxyz", r.palm_quat_wxyz}};
    ojson joints = ojson::object();
    for (const auto& [name, deg] : r.joint_angles_deg) joints[name] = deg;
    j["joint_angles_deg"] = joints;
    j["fingers_used"] = r.fingers_used;
    j["contacts"] = r.contacts;
    j["contact_indices"] = r.contact_indices;
    j["q1"] = r.q1;
    j["gws_volume"] = r.gws_volume;
    j["provenance"] = {{"seed", r.provenance.seed},
                       {"round", r.provenance.round},
                       {"outer", r.provenance.outer},
                       {"inner", r.provenance.inner}};
    return j;
}

inline DatasetRecord record_from_json(const nlohmann::json& j) {
    try {
        DatasetRecord r;
        r.pose_id = j.at("pose_id").get<std::string>();
        r.object = j.at("object").get<std::string>();
        if (j.contains("demo")) r.demo = j["demo"].get<std::string>();
        r.palm_xyz = j.at("palm_pose").at("xyz").get<std::array<double, 3>>();
        r.palm_quat_wxyz = j.at("palm_pose").at("quaternion_wxyz").get<std::array<double, 4>>();
        r.joint_angles_deg = j.at("joint_angles_deg").get<std::map<std::string, std::vector<double>>>();
        r.fingers_used = j.at("fingers_used").get<std::vector<std::string>>();
        r.contacts = j.at("contacts").get<std::vector<std::array<double, 6>>>();
        r.contact_indices = j.at("contact_indices").get<std::vector<std::size_t>>();
        r.q1 = j.at("q1").get<double>();
        r.gws_volume = j.at("gws_volume").get<double>();
        const auto& p = j.at("provenance");
        r.provenance = {p.at("seed").get<std::uint64_t>(), p.at("round").get<int>(), p.at("outer").get<int>(),
                        p.at("inner").get<int>()};
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::SchemaError, std::string("dataset record: ") + e.what());
    }
}

inline std::string serialize_record(const DatasetRecord& r) { return to_json(r).dump(); }

inline void write_dataset(std::ostream& out, const std::vector<DatasetRecord>& records) {
    for (const auto& r : records) out << serialize_record(r) << '\n';
}

inline std::vector<DatasetRecord> read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::AssetMissing, "cannot open dataset " + path.string());
    std::vector<DatasetRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            out.push_back(record_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::SchemaError, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(ErrorKind::SchemaError, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

namespace detail {

inline nlohmann::json read_json_file(const std::filesystem::path& path, const std::string& what) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::AssetMissing, "cannot open " + what + " " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::SchemaError, path.string() + ": " + e.what());
    }
}

}  // namespace detail

/// Demonstration file: {"id", "object", "palm_pose": {"xyz", "quaternion_wxyz"},
/// "joint_angles_deg": {finger: [deg]}, "contacts": {finger: [[x,y,z] in frame_tip]}}.
struct DemoFile {
    std::string id;
    Demonstration demo;
};

inline DemoFile load_demonstration(const std::filesystem::path& path) {
    const auto doc = detail::read_json_file(path, "demonstration");
    const std::string ctx = path.string();
    try {
        DemoFile f;
        f.id = doc.value("id", path.stem().string());
        f.demo.object = doc.at("object").get<std::string>();
        if (doc.contains("palm_pose")) {
            f.demo.palm_pose = RigidTransform::from_xyz_quat(
                Vec3(doc["palm_pose"].at("xyz").get<std::array<double, 3>>().data()),
                doc["palm_pose"].at("quaternion_wxyz").get<std::array<double, 4>>());
        }
        for (const auto& [name, deg] : doc.at("joint_angles_deg").items()) {
            JointCombination c;
            for (double d : deg.get<std::vector<double>>()) c.angles.push_back(deg2rad(d));
            f.demo.joint_angles[name] = c;
        }
        for (const auto& [name, pts] : doc.at("contacts").items()) {
            std::vector<Vec3> v;
            for (const auto& p : pts) v.emplace_back(p.get<std::array<double, 3>>().data());
            f.demo.contacts[name] = v;
        }
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::SchemaError, ctx + ": " + e.what());
    }
}

/// Ranges file: {"step_deg": s, "ranges_deg": {finger: [[lo, hi] per independent joint]}}.
struct RangesFile {
    double step_deg = 5.0;
    JointRanges ranges;
};

inline RangesFile load_joint_ranges(const std::filesystem::path& path) {
    const auto doc = detail::read_json_file(path, "ranges file");
    try {
        RangesFile f;
        f.step_deg = doc.value("step_deg", 5.0);
        for (const auto& [name, list] : doc.at("ranges_deg").items()) {
            for (const auto& r : list) {
                const auto pair = r.get<std::array<double, 2>>();
                f.ranges[name].push_back({pair[0], pair[1]});
            }
        }
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::SchemaError, path.string() + ": " + e.what());
    }
}

/// Every tunable of a run. Angles are degrees in files, radians nowhere here.
struct RunConfig {
    FsgConfig fsg;
    ObjectOptions object;
    AutowsOptions autows;
    double demo_step_deg = 5.0;
    int demo_steps = 2;
};

inline void set_seed(RunConfig& c, std::uint64_t seed) {
    c.fsg.seed = seed;
    c.object.seed = seed;
    c.autows.seed = seed;
}

/// Applies the keys present in `doc` (a flat JSON object); unknown keys are schema errors.
inline void apply_config(RunConfig& c, const nlohmann::json& doc, const std::string& ctx) {
    if (!doc.is_object()) throw Error(ErrorKind::SchemaError, ctx + ": config must be a JSON object");
    for (const auto& [key, v] : doc.items()) {
        try {
            if (key == "outer_iterations") c.fsg.outer_iterations = v.get<int>();
            else if (key == "inner_rotations") c.fsg.inner_rotations = v.get<int>();
            else if (key == "pose_target") c.fsg.pose_target = v.get<int>();
            else if (key == "pos_tolerance_m") c.fsg.pos_tolerance = v.get<double>();
            else if (key == "nor_tolerance") c.fsg.nor_tolerance = v.get<double>();
            else if (key == "table_clearance_m") c.fsg.table_clearance = v.get<double>();
            else if (key == "palm_points_max") c.fsg.palm_points_max = v.get<int>();
            else if (key == "q1_min") c.fsg.q1_min = v.get<double>();
            else if (key == "use_affordance") c.fsg.use_affordance = c.object.use_affordance = v.get<bool>();
            else if (key == "finger_iteration") c.fsg.finger_iteration = v.get<bool>();
            else if (key == "link_penetration") c.fsg.link_penetration = v.get<bool>();
            else if (key == "ordering_axis") {
                const auto a = v.get<std::string>();
                if (a != "x" && a != "y" && a != "z") throw Error(ErrorKind::SchemaError, ctx + ".ordering_axis: x, y or z");
                c.fsg.ordering_axis = a[0] - 'x';
            } else if (key == "mu") c.fsg.quality.mu = v.get<double>();
            else if (key == "m_edges") c.fsg.quality.m_edges = v.get<int>();
            else if (key == "dedup_translation_m") c.fsg.dedup_translation = v.get<double>();
            else if (key == "dedup_rotation_deg") c.fsg.dedup_rotation_deg = v.get<double>();
            else if (key == "object_samples") c.object.sample_count = v.get<std::size_t>();
            else if (key == "curvature_percentile") c.object.curvature_percentile = v.get<double>();
            else if (key == "curvature_k") c.object.curvature_k = v.get<std::size_t>();
            else if (key == "thre_pos_m") c.autows.thre_pos = v.get<double>();
            else if (key == "thre_nor") c.autows.thre_nor = v.get<double>();
            else if (key == "tip_samples") c.autows.tip_samples = v.get<std::size_t>();
            else if (key == "face_shape") c.autows.face_shape = parse_face_shape(v.get<std::string>());
            else if (key == "demo_step_deg") c.demo_step_deg = v.get<double>();
            else if (key == "demo_steps") c.demo_steps = v.get<int>();
            else if (key == "seed") set_seed(c, v.get<std::uint64_t>());
            else if (key == "threads") c.fsg.threads = v.get<int>();
            else throw Error(ErrorKind::SchemaError, ctx + ": unknown config key '" + key + "'");
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::SchemaError, ctx + "." + key + ": " + e.what());
        }
    }
}

inline void load_config(RunConfig& c, const std::filesystem::path& path) {
    apply_config(c, detail::read_json_file(path, "config"), path.string());
}

/// Per-object outcome of a synth/augment run.
struct ObjectSummary {
    std::string object;
    bool ok = false;
    std::string error;
    std::size_t valid_poses = 0;
    double q1_mean = 0;
    double q1_median = 0;
    std::map<std::size_t, std::size_t> finger_histogram;
    RejectionCounters counters;
    std::size_t duplicates = 0;
    std::size_t truncated = 0;
    double seconds = 0;  // wall time, kept out of the deterministic summary

    double seconds_per_pose() const { return valid_poses ? seconds / static_cast<double>(valid_poses) : 0.0; }
};

inline ObjectSummary summarize(const std::string& object, const SynthesisResult& r, double seconds) {
    ObjectSummary s;
    s.object = object;
    s.ok = true;
    s.valid_poses = r.poses.size();
    std::vector<double> q;
    for (const auto& p : r.poses) {
        q.push_back(p.q1);
        ++s.finger_histogram[p.fingers_used.size()];
    }
    if (!q.empty()) {
        double sum = 0;
        for (double v : q) sum += v;
        s.q1_mean = sum / static_cast<double>(q.size());
        std::sort(q.begin(), q.end());
        const auto n = q.size();
        s.q1_median = n % 2 ? q[n / 2] : 0.5 * (q[n / 2 - 1] + q[n / 2]);
    }
    s.counters = r.counters;
    s.duplicates = r.duplicates;
    s.truncated = r.truncated;
    s.seconds = seconds;
    return s;
}

inline ojson counters_json(const RejectionCounters& c) {
    return {{"attempts", c.attempts},       {"accepted", c.accepted},
            {"palm_collision", c.palm_collision}, {"table_collision", c.table_collision},
            {"no_contact", c.no_contact},   {"ordering", c.ordering},
            {"q1", c.q1},                   {"penetration", c.penetration}};
}

inline ojson summary_json(const std::vector<ObjectSummary>& objects) {
    ojson arr = ojson::array();
    for (const auto& s : objects) {
        ojson j;
        j["object"] = s.object;
        j["status"] = s.ok ? "ok" : "failed";
        if (!s.ok) j["error"] = s.error;
        j["valid_poses"] = s.valid_poses;
        j["q1_mean"] = s.q1_mean;
        j["q1_median"] = s.q1_median;
        ojson hist = ojson::object();
        for (const auto& [k, v] : s.finger_histogram) hist[std::to_string(k)] = v;
        j["finger_histogram"] = hist;
        j["counters"] = counters_json(s.counters);
        j["duplicates"] = s.duplicates;
        j["truncated"] = s.truncated;
        arr.push_back(j);
    }
    return {{"objects", arr}};
}

inline ojson timing_json(const std::vector<ObjectSummary>& objects) {
    ojson arr = ojson::array();
    for (const auto& s : objects) {
        arr.push_back({{"object", s.object}, {"seconds", s.seconds}, {"seconds_per_valid_pose", s.seconds_per_pose()}});
    }
    return {{"objects", arr}};
}

inline std::string summary_table(const std::vector<ObjectSummary>& objects, bool with_timing) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-16s %-6s %5s %9s %9s %7s %6s %6s %6s %6s %6s %6s%s\n", "object", "status",
                  "poses", "q1_mean", "q1_med", "tries", "palm", "table", "nocon", "order", "q1", "pen",
                  with_timing ? "  s/pose" : "");
    out << line;
    for (const auto& s : objects) {
        const auto& c = s.counters;
        std::snprintf(line, sizeof line, "%-16s %-6s %5zu %9.5f %9.5f %7zu %6zu %6zu %6zu %6zu %6zu %6zu", s.object.c_str(),
                      s.ok ? "ok" : "failed", s.valid_poses, s.q1_mean, s.q1_median, c.attempts, c.palm_collision,
                      c.table_collision, c.no_contact, c.ordering, c.q1, c.penetration);
        out << line;
        if (with_timing) {
            std::snprintf(line, sizeof line, "  %7.4f", s.seconds_per_pose());
            out << line;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace fsgkit
