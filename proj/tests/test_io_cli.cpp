#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fsgkit/app/commands.hpp"
#include "fsgkit/geometry/ply.hpp"

using namespace fsgkit;
namespace fs = std::filesystem;

namespace {

const fs::path kAssets(FSGKIT_ASSET_DIR);
const fs::path kHands = kAssets / "hands";

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("fsgkit_io_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

// Runs the fsgkit executable and returns its exit status.
int cli(const std::string& args) {
    const std::string cmd = std::string(FSGKIT_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<SurfacePoint> read_ply_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return read_ply(in);
}

app::CommandOptions quiet(std::ostream& sink) {
    app::CommandOptions o;
    o.log = &sink;
    o.out_stream = &sink;
    o.threads = 1;
    return o;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

// One synth run on the cube shared by the dataset tests.
const fs::path& cube_run() {
    static const fs::path dir = [] {
        const auto d = scratch("cube_run");
        std::ostringstream sink;
        auto o = quiet(sink);
        o.hand = kHands / "toy_gripper.json";
        o.ranges = kHands / "toy_gripper_ranges.json";
        o.objects = kAssets / "objects" / "cube.json";
        o.out = d;
        o.seed = 4;
        o.trace = true;
        if (app::run_synth(o) != 0) throw std::runtime_error("cube synth failed: " + sink.str());
        return d;
    }();
    return dir;
}

}  // namespace

// --- records and files -----------------------------------------------------

TEST(Records, RoundTripIsExact) {
    DatasetRecord r;
    r.pose_id = "cube/3";
    r.object = "cube";
    r.demo = "pinch";
    r.palm_xyz = {0.1, -1.0 / 3.0, 2e-17};
    r.palm_quat_wxyz = {std::sqrt(0.5), 0, std::sqrt(0.5), 0};
    r.joint_angles_deg = {{"thumb", {12.5, 1.0 / 7.0}}, {"ff", {0.0}}};
    r.fingers_used = {"thumb", "ff"};
    r.contacts = {{0.02, 0.01, -0.003, 1, 0, 0}, {-0.02, 0.0101, 0.0, -1, 0, 0}};
    r.contact_indices = {3, 99};
    r.q1 = 0.123456789012345678;
    r.gws_volume = 1e-9;
    r.provenance = {42, 1, 17, 3};
    const auto line = serialize_record(r);
    const auto back = record_from_json(nlohmann::json::parse(line));
    EXPECT_EQ(serialize_record(back), line);
    EXPECT_EQ(back.q1, r.q1);
    EXPECT_EQ(back.palm_xyz, r.palm_xyz);
}

TEST(Records, SynthesizedDatasetRoundTrips) {
    const auto path = cube_run() / "dataset.jsonl";
    std::ifstream in(path);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        EXPECT_EQ(serialize_record(record_from_json(nlohmann::json::parse(line))), line);
        ++n;
    }
    EXPECT_GE(n, 10u);
}

TEST(Records, MissingFieldIsSchemaError) {
    const auto dir = scratch("bad_record");
    write_text(dir / "d.jsonl", "{\"pose_id\": \"a\"}\n");
    try {
        read_dataset(dir / "d.jsonl");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SchemaError);
        EXPECT_NE(std::string(e.what()).find(":1:"), std::string::npos);
    }
}

TEST(Config, KeysApplyAndUnknownKeysFail) {
    RunConfig c;
    apply_config(c,
                 nlohmann::json{{"outer_iterations", 12}, {"nor_tolerance", 0.9}, {"ordering_axis", "x"},
                                {"face_shape", "rect"}, {"seed", 5}},
                 "cfg");
    EXPECT_EQ(c.fsg.outer_iterations, 12);
    EXPECT_EQ(c.fsg.nor_tolerance, 0.9);
    EXPECT_EQ(c.fsg.ordering_axis, 0);
    EXPECT_EQ(c.autows.face_shape, FaceShape::rect);
    EXPECT_EQ(c.fsg.seed, 5u);
    EXPECT_EQ(c.object.seed, 5u);
    for (const auto& bad : {nlohmann::json{{"outer_iteration", 3}}, nlohmann::json{{"pose_target", "ten"}},
                            nlohmann::json{{"ordering_axis", "w"}}, nlohmann::json::array()}) {
        try {
            apply_config(c, bad, "cfg");
            FAIL() << bad.dump();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::SchemaError);
        }
    }
}

TEST(Config, CommandLineOverridesFile) {
    const auto dir = scratch("config");
    write_text(dir / "c.json", R"({"pose_target": 3, "seed": 9, "finger_iteration": true})");
    app::CommandOptions o;
    o.config = dir / "c.json";
    o.seed = 11;
    o.no_finger_iter = true;
    const auto c = app::resolve_config(o);
    EXPECT_EQ(c.fsg.pose_target, 3);
    EXPECT_EQ(c.fsg.seed, 11u);
    EXPECT_FALSE(c.fsg.finger_iteration);
}

TEST(Demonstration, LoadsAndReportsErrors) {
    const auto d = load_demonstration(kAssets / "demos" / "cube_pinch.json");
    EXPECT_EQ(d.id, "cube_pinch");
    EXPECT_EQ(d.demo.object, "cube_4cm");
    EXPECT_NEAR(d.demo.joint_angles.at("thumb").angles[1], deg2rad(18), 1e-15);
    EXPECT_EQ(d.demo.contacts.size(), 2u);
    const auto dir = scratch("demo");
    write_text(dir / "d.json", R"({"joint_angles_deg": {}, "contacts": {}})");
    try {
        load_demonstration(dir / "d.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SchemaError);
    }
    try {
        load_demonstration(dir / "missing.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::AssetMissing);
    }
}

// --- autows ----------------------------------------------------------------

TEST(CliAutows, GripperRangesGiveTwoFilesDeterministically) {
    const auto a = scratch("ws_a"), b = scratch("ws_b");
    const std::string common = "autows --hand " + (kHands / "toy_gripper.json").string() + " --ranges " +
                               (kHands / "toy_gripper_ranges.json").string() + " --seed 3 --out ";
    ASSERT_EQ(cli(common + a.string() + " --threads 1"), 0);
    ASSERT_EQ(cli(common + b.string() + " --threads 2"), 0);
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    EXPECT_EQ(names, (std::vector<std::string>{"finger.fsgws", "thumb.fsgws"}));
    for (const auto& n : names) EXPECT_EQ(slurp(a / n), slurp(b / n)) << n;
}

TEST(CliAutows, FiveFingerDemoKeepsContactedFingers) {
    const auto dir = scratch("ws_demo");
    std::ostringstream sink;
    auto o = quiet(sink);
    o.hand = kHands / "toy_5finger.json";
    o.demos = {kAssets / "demos" / "cube_pinch.json"};
    o.out = dir;
    o.json_dump = true;
    ASSERT_EQ(app::run_autows(o), 0);
    EXPECT_TRUE(fs::exists(dir / "thumb.fsgws"));
    EXPECT_TRUE(fs::exists(dir / "ff.fsgws"));
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir)) files += e.path().extension() == ".fsgws";
    EXPECT_EQ(files, 2u);
    const auto dump = read_json(dir / "thumb.json");
    EXPECT_EQ(dump.at("finger"), "thumb");
}

TEST(CliAutows, MissingInputsAreSchemaOrAssetErrors) {
    const auto dir = scratch("ws_err");
    EXPECT_EQ(cli("autows --hand " + (kHands / "nope.json").string() + " --ranges x --out " + dir.string()), 4);
    EXPECT_EQ(cli("autows --out " + dir.string()), 4);
    write_text(dir / "r.json", R"({"ranges_deg": {"pinky": [[0, 10]]}})");
    EXPECT_EQ(cli("autows --hand " + (kHands / "toy_gripper.json").string() + " --ranges " + (dir / "r.json").string() +
                  " --out " + dir.string()),
              4);
}

// --- synth -----------------------------------------------------------------

TEST(CliSynth, CubeDatasetSortedWithConsistentSummary) {
    const auto& dir = cube_run();
    const auto records = read_dataset(dir / "dataset.jsonl");
    ASSERT_GE(records.size(), 10u);
    for (std::size_t i = 1; i < records.size(); ++i) EXPECT_GE(records[i - 1].q1, records[i].q1);
    for (const auto& r : records) {
        EXPECT_GT(r.q1, 0.0);
        EXPECT_EQ(r.object, "cube_4cm");
        EXPECT_EQ(r.joint_angles_deg.size(), 2u);
    }
    const auto summary = read_json(dir / "summary.json").at("objects").at(0);
    EXPECT_EQ(summary.at("status"), "ok");
    EXPECT_EQ(summary.at("valid_poses").get<std::size_t>(), records.size());
    const auto& c = summary.at("counters");
    std::size_t sum = 0;
    for (const auto* k : {"accepted", "palm_collision", "table_collision", "no_contact", "ordering", "q1", "penetration"}) {
        sum += c.at(k).get<std::size_t>();
    }
    EXPECT_EQ(sum, c.at("attempts").get<std::size_t>());
    EXPECT_TRUE(fs::exists(dir / "summary.txt"));
    EXPECT_TRUE(read_json(dir / "timing.json").at("objects").at(0).contains("seconds_per_valid_pose"));
    EXPECT_FALSE(summary.contains("seconds"));
}

TEST(CliSynth, TraceRecountMatchesCounters) {
    const auto& dir = cube_run();
    std::map<std::string, std::size_t> recount;
    std::size_t lines = 0;
    std::ifstream in(dir / "trace.jsonl");
    std::string line;
    while (std::getline(in, line)) {
        ++recount[nlohmann::json::parse(line).at("outcome").get<std::string>()];
        ++lines;
    }
    const auto c = read_json(dir / "summary.json").at("objects").at(0).at("counters");
    EXPECT_EQ(lines, c.at("attempts").get<std::size_t>());
    for (const auto& [k, v] : c.items()) {
        if (k == "attempts") continue;
        EXPECT_EQ(recount[k], v.get<std::size_t>()) << k;
    }
}

TEST(CliSynth, EmptyManifestWarns) {
    const auto dir = scratch("empty");
    EXPECT_EQ(cli("synth --hand " + (kHands / "toy_gripper.json").string() + " --ranges " +
                  (kHands / "toy_gripper_ranges.json").string() + " --objects " +
                  (kAssets / "objects" / "empty.json").string() + " --out " + dir.string()),
              2);
    EXPECT_TRUE(fs::exists(dir / "dataset.jsonl"));
    EXPECT_EQ(fs::file_size(dir / "dataset.jsonl"), 0u);
}

TEST(CliSynth, ExitCodesForFailedAndPartialRuns) {
    const auto dir = scratch("failing");
    write_text(dir / "cfg.json", R"({"outer_iterations": 30})");
    const std::string base = "synth --hand " + (kHands / "toy_3finger.json").string() + " --ranges " +
                             (kHands / "toy_3finger_ranges.json").string() + " --config " + (dir / "cfg.json").string() +
                             " --no-finger-iter --threads 1 ";
    EXPECT_EQ(cli(base + "--objects " + (kAssets / "objects" / "cube.json").string() + " --out " + (dir / "a").string()),
              3);
    const auto summary = read_json(dir / "a" / "summary.json").at("objects").at(0);
    EXPECT_EQ(summary.at("status"), "failed");
    EXPECT_NE(summary.at("error").get<std::string>().find("NoGraspFound"), std::string::npos);

    // one object fails to load, the cube succeeds with finger iteration
    write_text(dir / "mixed.json", R"({"objects": [
        {"name": "ghost", "mesh_path": "missing.obj", "on_table": false},
        {"name": "cube_4cm", "mesh_path": ")" + (kAssets / "meshes" / "cube_4cm.obj").string() + R"(", "on_table": false}]})");
    const std::string iter = "synth --hand " + (kHands / "toy_3finger.json").string() + " --ranges " +
                             (kHands / "toy_3finger_ranges.json").string() + " --config " +
                             (dir / "cfg.json").string() + " --threads 1 ";
    EXPECT_EQ(cli(iter + "--objects " + (dir / "mixed.json").string() + " --out " + (dir / "b").string()), 2);
    EXPECT_FALSE(read_dataset(dir / "b" / "dataset.jsonl").empty());
}

TEST(CliSynth, RerunIsByteIdentical) {
    const auto dir = scratch("rerun");
    const std::string args = "synth --hand " + (kHands / "toy_gripper.json").string() + " --ranges " +
                             (kHands / "toy_gripper_ranges.json").string() + " --objects " +
                             (kAssets / "objects" / "cube.json").string() + " --seed 4 --out ";
    ASSERT_EQ(cli(args + (dir / "a").string() + " --threads 1"), 0);
    ASSERT_EQ(cli(args + (dir / "b").string() + " --threads 3"), 0);
    EXPECT_EQ(slurp(dir / "a" / "dataset.jsonl"), slurp(dir / "b" / "dataset.jsonl"));
    EXPECT_EQ(slurp(dir / "a" / "summary.json"), slurp(dir / "b" / "summary.json"));
    EXPECT_EQ(slurp(dir / "a" / "dataset.jsonl"), slurp(cube_run() / "dataset.jsonl"));
}

// --- augment ---------------------------------------------------------------

TEST(CliAugment, PosesStayNearDemonstration) {
    const auto dir = scratch("augment");
    std::ostringstream sink;
    auto o = quiet(sink);
    o.hand = kHands / "toy_5finger.json";
    o.objects = kAssets / "objects" / "cube.json";
    o.demos = {kAssets / "demos" / "cube_pinch.json"};
    o.out = dir;
    o.seed = 2;
    ASSERT_EQ(app::run_augment(o), 0) << sink.str();
    const auto records = read_dataset(dir / "dataset.jsonl");
    ASSERT_FALSE(records.empty());
    const auto demo = load_demonstration(kAssets / "demos" / "cube_pinch.json");
    for (const auto& r : records) {
        EXPECT_EQ(r.demo, std::optional<std::string>("cube_pinch"));
        for (const auto& f : r.fingers_used) EXPECT_TRUE(f == "thumb" || f == "ff") << f;
        for (const auto& f : {"thumb", "ff"}) {
            const auto& got = r.joint_angles_deg.at(f);
            const auto& want = demo.demo.joint_angles.at(f).angles;
            ASSERT_EQ(got.size(), want.size());
            for (std::size_t k = 0; k < got.size(); ++k) EXPECT_LE(std::abs(got[k] - rad2deg(want[k])), 10 + 1e-9);
        }
        for (const auto& f : {"mf", "rf", "lf"}) {
            for (double a : r.joint_angles_deg.at(f)) EXPECT_EQ(a, 0.0);
        }
    }
    const auto hist = read_json(dir / "summary.json").at("objects").at(0).at("finger_histogram");
    EXPECT_EQ(hist.size(), 1u);
    EXPECT_EQ(hist.at("2").get<std::size_t>(), records.size());
}

TEST(CliAugment, ObjectWithoutDemoIsPartial) {
    const auto dir = scratch("augment_nodemo");
    write_text(dir / "objects.json", R"({"objects": [
        {"name": "cube_4cm", "mesh_path": ")" + (kAssets / "meshes" / "cube_4cm.obj").string() + R"("},
        {"name": "c_section", "mesh_path": ")" + (kAssets / "meshes" / "c_section.obj").string() + R"("}]})");
    std::ostringstream sink;
    auto o = quiet(sink);
    o.hand = kHands / "toy_5finger.json";
    o.objects = dir / "objects.json";
    o.demos = {kAssets / "demos" / "cube_pinch.json"};
    o.out = dir / "out";
    EXPECT_EQ(app::run_augment(o), 2);
    EXPECT_NE(sink.str().find("c_section"), std::string::npos);
}

// --- eval and export -------------------------------------------------------

TEST(CliEval, RescoreMatchesStoredQ1) {
    const auto& dir = cube_run();
    std::ostringstream csv, sink;
    auto o = quiet(sink);
    o.out_stream = &csv;
    o.dataset = dir / "dataset.jsonl";
    o.objects = kAssets / "objects" / "cube.json";
    ASSERT_EQ(app::run_eval(o), 0);
    const auto records = read_dataset(o.dataset);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "object,pose_id,q1,volume,force_closure");
    for (const auto& r : records) {
        ASSERT_TRUE(std::getline(in, line));
        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        ASSERT_EQ(cells.size(), 5u);
        EXPECT_EQ(cells[1], r.pose_id);
        EXPECT_NEAR(std::stod(cells[2]), r.q1, 1e-8);
        EXPECT_EQ(cells[4], "true");
    }
}

TEST(CliExportPly, PalmCloudAndContacts) {
    const auto& run = cube_run();
    const auto dir = scratch("ply");
    std::ostringstream sink;
    auto o = quiet(sink);
    o.dataset = run / "dataset.jsonl";
    o.objects = kAssets / "objects" / "cube.json";
    o.out = dir;
    ASSERT_EQ(app::run_export_ply(o), 0);
    const auto records = read_dataset(o.dataset);
    const auto palms = read_ply_file(dir / "palms.ply");
    ASSERT_EQ(palms.size(), records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(palms[i].position[k], records[i].palm_xyz[k], 1e-7);
        const auto contacts = read_ply_file(dir / ("contacts_" + app::file_safe(records[i].pose_id) + ".ply"));
        ASSERT_EQ(contacts.size(), records[i].contacts.size());
        for (std::size_t j = 0; j < contacts.size(); ++j) {
            for (int k = 0; k < 3; ++k) EXPECT_NEAR(contacts[j].position[k], records[i].contacts[j][k], 1e-7);
        }
    }
    EXPECT_GT(read_ply_file(dir / "cube_4cm_cloud.ply").size(), 500u);
}

TEST(CliExportPly, EmptyDatasetGivesValidHeader) {
    const auto dir = scratch("ply_empty");
    write_text(dir / "d.jsonl", "");
    std::ostringstream sink;
    auto o = quiet(sink);
    o.dataset = dir / "d.jsonl";
    o.objects = kAssets / "objects" / "cube.json";
    o.out = dir / "out";
    ASSERT_EQ(app::run_export_ply(o), 0);
    EXPECT_TRUE(read_ply_file(dir / "out" / "palms.ply").empty());
    EXPECT_NE(slurp(dir / "out" / "palms.ply").find("element vertex 0\n"), std::string::npos);
}

TEST(CliExportPly, MissingPoseAndBadDataset) {
    const auto& run = cube_run();
    const auto dir = scratch("ply_err");
    const std::string objects = " --objects " + (kAssets / "objects" / "cube.json").string();
    EXPECT_EQ(cli("export-ply --dataset " + (run / "dataset.jsonl").string() + objects + " --pose nope --out " +
                  dir.string()),
              3);
    std::ostringstream sink;
    auto o = quiet(sink);
    o.dataset = run / "dataset.jsonl";
    o.objects = kAssets / "objects" / "cube.json";
    o.out = dir;
    o.pose_id = "missing";
    try {
        app::run_export_ply(o);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotFound);
    }
    write_text(dir / "bad.jsonl", "{not json}\n");
    EXPECT_EQ(cli("export-ply --dataset " + (dir / "bad.jsonl").string() + objects + " --out " + dir.string()), 4);
}
