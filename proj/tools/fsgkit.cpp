#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fsgkit/app/commands.hpp"

namespace {

using fsgkit::app::CommandOptions;

void common_flags(CLI::App* sub, CommandOptions& o) {
    sub->add_option("--config", o.config, "JSON config file (flat key/value)");
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--threads", o.threads, "Worker threads (default: FSGKIT_THREADS or all cores)");
}

void synth_flags(CLI::App* sub, CommandOptions& o) {
    sub->add_option("--hand", o.hand, "Hand model JSON")->required();
    sub->add_option("--objects", o.objects, "Object manifest JSON")->required();
    sub->add_option("--out", o.out, "Output directory")->required();
    sub->add_option("--pose-target", o.pose_target, "Poses to keep per object");
    sub->add_flag("--no-finger-iter", o.no_finger_iter, "Never drop fingers when too few poses are found");
    sub->add_flag("--no-link-pen", o.no_link_pen, "Skip the link penetration check");
    sub->add_flag("--affordance,!--no-affordance", o.affordance, "Restrict anchors to the graspable part");
    sub->add_flag("--trace", o.trace, "Write one line per palm candidate to trace.jsonl");
    common_flags(sub, o);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grasp dataset generation from fingertip workspace clouds"};
    app.require_subcommand(1);
    CommandOptions o;

    auto* autows = app.add_subcommand("autows", "Build per-finger workspace clouds");
    autows->add_option("--hand", o.hand, "Hand model JSON")->required();
    autows->add_option("--demo", o.demos, "Demonstration JSON");
    autows->add_option("--ranges", o.ranges, "Joint ranges JSON");
    autows->add_option("--out", o.out, "Output directory")->required();
    autows->add_flag("--json", o.json_dump, "Also write a JSON dump per finger");
    common_flags(autows, o);

    auto* synth = app.add_subcommand("synth", "Synthesize grasps for every object");
    synth_flags(synth, o);
    synth->add_option("--ranges", o.ranges, "Joint ranges JSON (workspaces built on the fly)");
    synth->add_option("--workspace", o.workspace, "Directory of .fsgws files from autows");

    auto* augment = app.add_subcommand("augment", "Synthesize grasps conditioned on demonstrations");
    synth_flags(augment, o);
    augment->add_option("--demo", o.demos, "Demonstration JSON (repeatable)")->required();

    auto* eval = app.add_subcommand("eval", "Re-score a dataset as CSV");
    eval->add_option("--dataset", o.dataset, "Dataset JSONL")->required();
    eval->add_option("--objects", o.objects, "Object manifest JSON")->required();
    eval->add_option("--out", o.out, "CSV file (default: stdout)");
    common_flags(eval, o);

    auto* ply = app.add_subcommand("export-ply", "Export object, palm and contact clouds as PLY");
    ply->add_option("--dataset", o.dataset, "Dataset JSONL")->required();
    ply->add_option("--objects", o.objects, "Object manifest JSON")->required();
    ply->add_option("--hand", o.hand, "Hand model JSON (accepted for symmetry, unused)");
    ply->add_option("--pose", o.pose_id, "Only this pose id");
    ply->add_option("--out", o.out, "Output directory")->required();
    common_flags(ply, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : fsgkit::app::kExitSchema;
    }

    try {
        if (*autows) return fsgkit::app::run_autows(o);
        if (*synth) return fsgkit::app::run_synth(o);
        if (*augment) return fsgkit::app::run_augment(o);
        if (*eval) return fsgkit::app::run_eval(o);
        if (*ply) return fsgkit::app::run_export_ply(o);
    } catch (const fsgkit::Error& e) {
        std::cerr << "error: " << fsgkit::to_string(e.kind()) << ": " << e.what() << '\n';
        return fsgkit::app::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return fsgkit::app::kExitFailure;
    }
    return fsgkit::app::kExitFailure;
}
