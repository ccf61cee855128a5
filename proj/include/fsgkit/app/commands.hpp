#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <optional>
#include <string>
#include <vector>

#include "fsgkit/autows/autows.hpp"
#include "fsgkit/autows/workspace_io.hpp"
#include "fsgkit/fsg/fsg.hpp"
#include "fsgkit/geometry/ply.hpp"
#include "fsgkit/io/dataset.hpp"

namespace fsgkit::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 2;
inline constexpr int kExitFailure = 3;
inline constexpr int kExitSchema = 4;

/// Exit code for an error escaping a command.
inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::SchemaError:
        case ErrorKind::AssetMissing:
        case ErrorKind::InvalidMesh:
        case ErrorKind::InvalidArgument:
        case ErrorKind::JointLimit: return kExitSchema;
        default: return kExitFailure;
    }
}

struct CommandOptions {
    std::filesystem::path hand;
    std::filesystem::path objects;
    std::vector<std::filesystem::path> demos;
    std::filesystem::path ranges;
    std::filesystem::path workspace;
    std::filesystem::path dataset;
    std::filesystem::path config;
    std::filesystem::path out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<int> pose_target;
    bool no_finger_iter = false;
    bool no_link_pen = false;
    std::optional<bool> affordance;
    bool json_dump = false;
    bool trace = false;
    std::string pose_id;
    std::ostream* log = &std::cerr;
    std::ostream* out_stream = &std::cout;
};

/// Defaults, then the config file, then command-line overrides.
inline RunConfig resolve_config(const CommandOptions& o) {
    RunConfig c;
    if (!o.config.empty()) load_config(c, o.config);
    if (o.seed) set_seed(c, *o.seed);
    if (o.threads) c.fsg.threads = *o.threads;
    c.fsg.threads = static_cast<int>(resolve_thread_count(c.fsg.threads));
    c.autows.threads = static_cast<unsigned>(c.fsg.threads);
    c.object.threads = static_cast<unsigned>(c.fsg.threads);
    if (o.pose_target) c.fsg.pose_target = *o.pose_target;
    if (o.no_finger_iter) c.fsg.finger_iteration = false;
    if (o.no_link_pen) c.fsg.link_penetration = false;
    if (o.affordance) c.fsg.use_affordance = c.object.use_affordance = *o.affordance;
    if (o.trace) c.fsg.trace = true;
    return c;
}

namespace detail {

inline void require(const std::filesystem::path& p, const char* flag) {
    if (p.empty()) throw Error(ErrorKind::InvalidArgument, std::string("missing required option ") + flag);
    if (!std::filesystem::exists(p)) throw Error(ErrorKind::AssetMissing, std::string(flag) + ": no such file " + p.string());
}

inline std::ofstream open_out(const std::filesystem::path& p, bool binary = false) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, binary ? std::ios::binary : std::ios::out);
    if (!f) throw Error(ErrorKind::IoError, "cannot write " + p.string());
    return f;
}

inline std::vector<WorkspaceCloud> load_workspace_dir(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().extension() == ".fsgws") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<WorkspaceCloud> out;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        out.push_back(read_workspace(in));
    }
    if (out.empty()) throw Error(ErrorKind::AssetMissing, "no .fsgws files in " + dir.string());
    return out;
}

inline void write_workspace_files(const std::vector<WorkspaceCloud>& clouds, const std::filesystem::path& dir,
                                  bool json_dump) {
    for (const auto& c : clouds) {
        auto f = open_out(dir / (c.finger + ".fsgws"), true);
        write_workspace(f, c);
        if (json_dump) open_out(dir / (c.finger + ".json")) << workspace_to_json(c).dump(1) << '\n';
    }
}

struct RunOutput {
    std::vector<DatasetRecord> records;
    std::vector<ObjectSummary> summaries;
    std::vector<std::string> trace_lines;
};

inline void synthesize_object(const HandModel& hand, const std::vector<WorkspaceCloud>& ws, const ObjectSpec& spec,
                              const RunConfig& cfg, const std::optional<std::string>& demo, RunOutput& out,
                              std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const auto asset = prepare_object(spec, cfg.object);
        const auto result = synthesize_detailed(hand, ws, asset, cfg.fsg);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const std::string prefix = spec.name + (demo ? "/" + *demo : std::string()) + "/";
        for (std::size_t i = 0; i < result.poses.size(); ++i) {
            out.records.push_back(make_record(result.poses[i], hand, prefix + std::to_string(i), demo));
        }
        for (const auto& t : result.trace) {
            out.trace_lines.push_back(ojson{{"object", spec.name},
                                            {"round", t.where.round},
                                            {"outer", t.where.outer},
                                            {"inner", t.where.inner},
                                            {"outcome", to_string(t.outcome)}}
                                          .dump());
        }
        out.summaries.push_back(summarize(spec.name, result, secs));
    } catch (const Error& e) {
        ObjectSummary s;
        s.object = spec.name;
        s.error = std::string(to_string(e.kind())) + ": " + e.what();
        s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        log << "warning: " << spec.name << ": " << s.error << '\n';
        out.summaries.push_back(s);
    }
}

inline int finish_run(const RunOutput& run, const std::filesystem::path& dir, bool trace, std::ostream& report) {
    {
        auto f = open_out(dir / "dataset.jsonl");
        write_dataset(f, run.records);
    }
    open_out(dir / "summary.json") << summary_json(run.summaries).dump(2) << '\n';
    open_out(dir / "summary.txt") << summary_table(run.summaries, false);
    open_out(dir / "timing.json") << timing_json(run.summaries).dump(2) << '\n';
    if (trace) {
        auto f = open_out(dir / "trace.jsonl");
        for (const auto& l : run.trace_lines) f << l << '\n';
    }
    report << summary_table(run.summaries, true);
    std::size_t failed = 0;
    for (const auto& s : run.summaries) failed += !s.ok;
    if (run.summaries.empty()) return kExitPartial;
    if (failed == run.summaries.size()) return kExitFailure;
    return failed ? kExitPartial : kExitOk;
}

}  // namespace detail

/// Workspace clouds from a demonstration or a ranges file, one file per finger.
inline int run_autows(const CommandOptions& o) {
    detail::require(o.hand, "--hand");
    if (o.out.empty()) throw Error(ErrorKind::InvalidArgument, "missing required option --out");
    const auto cfg = resolve_config(o);
    const auto hand = load_hand_model(o.hand);
    std::vector<WorkspaceCloud> clouds;
    if (!o.demos.empty()) {
        detail::require(o.demos.front(), "--demo");
        const auto demo = load_demonstration(o.demos.front());
        clouds = autows_from_demonstration(hand, demo.demo, deg2rad(cfg.demo_step_deg), cfg.demo_steps, cfg.autows);
    } else {
        detail::require(o.ranges, "--ranges");
        const auto r = load_joint_ranges(o.ranges);
        clouds = autows_from_ranges(hand, r.ranges, r.step_deg, cfg.autows);
    }
    detail::write_workspace_files(clouds, o.out, o.json_dump);
    for (const auto& c : clouds) {
        *o.out_stream << c.finger << ": " << c.points.size() << " points, group " << (c.group == OppositionGroup::A ? "A" : "B")
                      << '\n';
    }
    return kExitOk;
}

/// FSG over every object of the manifest with workspaces from --workspace or --ranges.
inline int run_synth(const CommandOptions& o) {
    detail::require(o.hand, "--hand");
    detail::require(o.objects, "--objects");
    if (o.out.empty()) throw Error(ErrorKind::InvalidArgument, "missing required option --out");
    const auto cfg = resolve_config(o);
    const auto hand = load_hand_model(o.hand);
    std::vector<WorkspaceCloud> ws;
    if (!o.workspace.empty()) {
        detail::require(o.workspace, "--workspace");
        ws = detail::load_workspace_dir(o.workspace);
    } else {
        detail::require(o.ranges, "--ranges");
        const auto r = load_joint_ranges(o.ranges);
        ws = autows_from_ranges(hand, r.ranges, r.step_deg, cfg.autows);
    }
    const auto specs = load_object_manifest(o.objects);
    if (specs.empty()) *o.log << "warning: object manifest " << o.objects.string() << " lists no objects\n";
    detail::RunOutput run;
    for (const auto& spec : specs) detail::synthesize_object(hand, ws, spec, cfg, std::nullopt, run, *o.log);
    return detail::finish_run(run, o.out, cfg.fsg.trace, *o.out_stream);
}

/// Demonstration-conditioned workspaces followed by FSG, per object and matching demo.
inline int run_augment(const CommandOptions& o) {
    detail::require(o.hand, "--hand");
    detail::require(o.objects, "--objects");
    if (o.demos.empty()) throw Error(ErrorKind::InvalidArgument, "missing required option --demo");
    if (o.out.empty()) throw Error(ErrorKind::InvalidArgument, "missing required option --out");
    const auto cfg = resolve_config(o);
    const auto hand = load_hand_model(o.hand);
    std::vector<DemoFile> demos;
    for (const auto& d : o.demos) {
        detail::require(d, "--demo");
        demos.push_back(load_demonstration(d));
    }
    const auto specs = load_object_manifest(o.objects);
    if (specs.empty()) *o.log << "warning: object manifest " << o.objects.string() << " lists no objects\n";
    detail::RunOutput run;
    for (const auto& spec : specs) {
        bool any = false;
        for (const auto& d : demos) {
            if (d.demo.object != spec.name) continue;
            any = true;
            const auto ws = autows_from_demonstration(hand, d.demo, deg2rad(cfg.demo_step_deg), cfg.demo_steps, cfg.autows);
            detail::synthesize_object(hand, ws, spec, cfg, d.id, run, *o.log);
        }
        if (!any) {
            ObjectSummary s;
            s.object = spec.name;
            s.error = "NotFound: no demonstration for this object";
            *o.log << "warning: " << spec.name << ": " << s.error << '\n';
            run.summaries.push_back(s);
        }
    }
    return detail::finish_run(run, o.out, cfg.fsg.trace, *o.out_stream);
}

/// Re-scores every dataset record; CSV to --out or the output stream.
inline int run_eval(const CommandOptions& o) {
    detail::require(o.dataset, "--dataset");
    detail::require(o.objects, "--objects");
    const auto cfg = resolve_config(o);
    const auto records = read_dataset(o.dataset);
    std::map<std::string, TriangleMesh> meshes;
    for (const auto& s : load_object_manifest(o.objects)) meshes.emplace(s.name, load_object_mesh(s));
    std::ostringstream csv;
    csv << "object,pose_id,q1,volume,force_closure\n";
    for (const auto& r : records) {
        auto it = meshes.find(r.object);
        if (it == meshes.end()) throw Error(ErrorKind::NotFound, "object " + r.object + " is not in the manifest");
        const auto q = evaluate_contacts(r.contact_points(), it->second.centroid(), it->second.bbox_diagonal(),
                                         cfg.fsg.quality);
        char line[512];
        std::snprintf(line, sizeof line, "%s,%s,%.9g,%.9g,%s\n", r.object.c_str(), r.pose_id.c_str(), q.q1, q.gws_volume,
                      q.force_closure ? "true" : "false");
        csv << line;
    }
    if (o.out.empty()) {
        *o.out_stream << csv.str();
    } else {
        detail::open_out(o.out) << csv.str();
    }
    return kExitOk;
}

inline std::string file_safe(std::string s) {
    for (auto& c : s) {
        if (c == '/' || c == '\\' || c == ' ') c = '_';
    }
    return s;
}

/// Object clouds, the palm-position cloud and per-pose contact markers as PLY.
inline int run_export_ply(const CommandOptions& o) {
    detail::require(o.dataset, "--dataset");
    detail::require(o.objects, "--objects");
    if (o.out.empty()) throw Error(ErrorKind::InvalidArgument, "missing required option --out");
    const auto cfg = resolve_config(o);
    const auto records = read_dataset(o.dataset);
    std::vector<const DatasetRecord*> chosen;
    for (const auto& r : records) {
        if (o.pose_id.empty() || r.pose_id == o.pose_id) chosen.push_back(&r);
    }
    if (!o.pose_id.empty() && chosen.empty()) throw Error(ErrorKind::NotFound, "no pose with id " + o.pose_id);

    std::set<std::string> used;
    for (const auto* r : chosen) used.insert(r->object);
    for (const auto& s : load_object_manifest(o.objects)) {
        if (!o.pose_id.empty() && !used.count(s.name)) continue;
        const auto asset = prepare_object(s, cfg.object);
        auto f = detail::open_out(o.out / (file_safe(s.name) + "_cloud.ply"), true);
        write_ply(f, asset.cloud_full);
    }
    std::vector<SurfacePoint> palms;
    for (const auto* r : chosen) {
        const auto t = r->palm_pose();
        palms.push_back({t.translation, t.rotation.col(2)});
        auto f = detail::open_out(o.out / ("contacts_" + file_safe(r->pose_id) + ".ply"), true);
        write_ply(f, r->contact_points());
    }
    auto f = detail::open_out(o.out / "palms.ply", true);
    write_ply(f, palms);
    *o.out_stream << "exported " << palms.size() << " palm positions to " << o.out.string() << '\n';
    return kExitOk;
}

}  // namespace fsgkit::app
