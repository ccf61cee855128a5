#include <gtest/gtest.h>

#include <random>

#include "fsgkit/hand/hand_model.hpp"

using namespace fsgkit;
using nlohmann::json;

namespace {

const std::filesystem::path kHands = std::filesystem::path(FSGKIT_ASSET_DIR) / "hands";

json joint(const std::string& name, json origin_xyz, double lo = -180, double hi = 180) {
    return {{"name", name}, {"axis", {0, 0, 1}}, {"limits_deg", {lo, hi}}, {"origin", {{"xyz", origin_xyz}}}};
}

// Planar chain in the xy-plane: joints rotate about z, links point along +x.
json planar_hand(const std::vector<double>& lengths, double lo = -180, double hi = 180) {
    json joints = json::array();
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        const double prev = i == 0 ? 0.0 : lengths[i - 1];
        joints.push_back(joint("j" + std::to_string(i + 1), {prev, 0, 0}, lo, hi));
    }
    json finger = {{"name", "f"},
                   {"priority", 1},
                   {"tip_width_m", 0.02},
                   {"tip_mesh", "../meshes/pad_20mm.obj"},
                   {"v_f", {0, 1, 0}},
                   {"v_u", {1, 0, 0}},
                   {"tip_origin", {{"xyz", {lengths.back(), 0, 0}}}},
                   {"joints", joints}};
    return {{"name", "planar"},
            {"palm_box", {{"min", {-0.01, -0.01, -0.01}}, {"max", {0.01, 0.01, 0.01}}}},
            {"fingers", json::array({finger})}};
}

HandModel parse(const json& doc) { return parse_hand_model(doc, kHands); }

ErrorKind parse_error(const json& doc) {
    try {
        parse(doc);
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorKind::IoError;
}

std::vector<double> degrees(const JointCombination& c) {
    std::vector<double> out;
    for (double a : c.angles) out.push_back(std::round(rad2deg(a) * 1e6) / 1e6);
    return out;
}

}  // namespace

TEST(HandModelLoad, BundledGripper) {
    const auto hand = load_hand_model(kHands / "toy_gripper.json");
    ASSERT_EQ(hand.fingers.size(), 2u);
    for (const auto& f : hand.fingers) {
        EXPECT_EQ(f.joints.size(), 1u);
        EXPECT_NEAR(f.v_f.dot(f.v_u), 0.0, 1e-3);
        EXPECT_NEAR(f.v_f.norm(), 1.0, 1e-12);
        EXPECT_FALSE(f.tip_mesh.empty());
    }
    EXPECT_NE(hand.fingers[0].priority, hand.fingers[1].priority);
}

TEST(HandModelLoad, AllBundledHandsParse) {
    for (const char* name : {"toy_gripper.json", "toy_3finger.json", "toy_5finger.json", "toy_pincer.json"}) {
        EXPECT_NO_THROW(load_hand_model(kHands / name)) << name;
    }
}

TEST(HandModelLoad, InvertedLimitsRejected) {
    auto doc = planar_hand({0.05});
    doc["fingers"][0]["joints"][0]["limits_deg"] = {30, 10};
    EXPECT_EQ(parse_error(doc), ErrorKind::SchemaError);
}

TEST(HandModelLoad, CouplingCycleRejected) {
    auto doc = planar_hand({0.03, 0.03});
    doc["fingers"][0]["joints"][0]["coupled_to"] = "j2";
    doc["fingers"][0]["joints"][1]["coupled_to"] = "j1";
    EXPECT_EQ(parse_error(doc), ErrorKind::SchemaError);
}

TEST(HandModelLoad, MissingMeshIsAssetMissing) {
    auto doc = planar_hand({0.05});
    doc["fingers"][0]["tip_mesh"] = "../meshes/does_not_exist.obj";
    EXPECT_EQ(parse_error(doc), ErrorKind::AssetMissing);
}

TEST(HandModelLoad, OtherSchemaViolations) {
    auto dup = planar_hand({0.05});
    dup["fingers"].push_back(dup["fingers"][0]);
    dup["fingers"][1]["name"] = "g";
    EXPECT_EQ(parse_error(dup), ErrorKind::SchemaError);

    auto flat = planar_hand({0.05});
    flat["palm_box"]["max"] = {0.01, -0.01, 0.01};
    EXPECT_EQ(parse_error(flat), ErrorKind::SchemaError);

    auto skew = planar_hand({0.05});
    skew["fingers"][0]["v_u"] = {0, 1, 0.5};
    EXPECT_EQ(parse_error(skew), ErrorKind::SchemaError);

    EXPECT_THROW(load_hand_model(kHands / "nope.json"), Error);
}

TEST(ForwardKinematics, ZeroConfigurationIsRestTransform) {
    const auto hand = load_hand_model(kHands / "toy_gripper.json");
    for (const auto& f : hand.fingers) {
        const auto fk = forward_kinematics(hand, f.name, f.zero_combination());
        RigidTransform rest = hand.palm_alignment;
        for (const auto& j : f.joints) rest = rest * j.origin;
        rest = rest * f.tip_offset;
        EXPECT_TRUE(fk.rotation.isApprox(rest.rotation, 1e-12));
        EXPECT_TRUE(fk.translation.isApprox(rest.translation, 1e-12));
    }
}

TEST(ForwardKinematics, PlanarOneJointRightAngle) {
    const auto hand = parse(planar_hand({0.05}));
    const Vec3 rest = forward_kinematics(hand, "f", {{0.0}}).translation;
    const Vec3 bent = forward_kinematics(hand, "f", {{deg2rad(90)}}).translation;
    EXPECT_NEAR(rest.x(), 0.05, 1e-12);
    EXPECT_NEAR(bent.x(), 0.0, 1e-12);
    EXPECT_NEAR(bent.y(), 0.05, 1e-12);
    EXPECT_NEAR(bent.dot(rest), 0.0, 1e-12);
}

TEST(ForwardKinematics, ThreeJointPlanarMatchesSymbolicOracle) {
    const std::vector<double> l{0.045, 0.03, 0.022};
    const auto hand = parse(planar_hand(l));
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> ang(-M_PI, M_PI);
    for (int trial = 0; trial < 200; ++trial) {
        JointCombination c{{ang(gen), ang(gen), ang(gen)}};
        double x = 0, y = 0, sum = 0;
        for (int i = 0; i < 3; ++i) {
            sum += c.angles[i];
            x += l[i] * std::cos(sum);
            y += l[i] * std::sin(sum);
        }
        const auto fk = forward_kinematics(hand, "f", c);
        EXPECT_NEAR(fk.translation.x(), x, 1e-12);
        EXPECT_NEAR(fk.translation.y(), y, 1e-12);
        EXPECT_NEAR(fk.translation.z(), 0.0, 1e-12);
        EXPECT_NEAR(std::atan2(fk.rotation(1, 0), fk.rotation(0, 0)), std::remainder(sum, 2 * M_PI), 1e-9);
    }
}

TEST(ForwardKinematics, OutOfLimitThrowsJointLimit) {
    const auto hand = load_hand_model(kHands / "toy_gripper.json");
    try {
        forward_kinematics(hand, "thumb", {{deg2rad(60)}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::JointLimit);
    }
}

TEST(ForwardKinematics, CoupledJointMirrorsSource) {
    auto coupled_doc = planar_hand({0.04, 0.03});
    coupled_doc["fingers"][0]["joints"][0]["coupled_to"] = "j2";
    const auto coupled = parse(coupled_doc);
    const auto free = parse(planar_hand({0.04, 0.03}));
    ASSERT_EQ(coupled.finger("f").independent_count(), 1u);
    for (double a : {-1.0, -0.2, 0.0, 0.4, 1.3}) {
        const auto lhs = forward_kinematics(coupled, "f", {{a}});
        const auto rhs = forward_kinematics(free, "f", {{a, a}});
        EXPECT_TRUE(lhs.translation.isApprox(rhs.translation, 1e-12));
        EXPECT_TRUE(lhs.rotation.isApprox(rhs.rotation, 1e-12));
    }
}

TEST(EnumerateCombinations, FiveDegreeTwoSteps) {
    const auto hand = parse(planar_hand({0.05}));
    const auto combos = enumerate_joint_combinations(hand, "f", {deg2rad(20)}, deg2rad(5), 2);
    std::vector<std::vector<double>> got;
    for (const auto& c : combos) got.push_back(degrees(c));
    EXPECT_EQ(got, (std::vector<std::vector<double>>{{10}, {15}, {20}, {25}, {30}}));
}

TEST(EnumerateCombinations, ZeroStepsIsCenter) {
    const auto hand = parse(planar_hand({0.03, 0.03}));
    const auto combos = enumerate_joint_combinations(hand, "f", {0.1, -0.2}, deg2rad(5), 0);
    ASSERT_EQ(combos.size(), 1u);
    EXPECT_EQ(combos[0].angles, (std::vector<double>{0.1, -0.2}));
}

TEST(EnumerateCombinations, ClippedProductMatchesOracle) {
    const auto hand = parse(planar_hand({0.03, 0.03}, 0, 90));
    const auto combos = enumerate_joint_combinations(hand, "f", {deg2rad(5), deg2rad(5)}, deg2rad(5), 2);
    ASSERT_EQ(combos.size(), 16u);
    // nested loops over the clamped grid
    std::set<std::vector<double>> oracle;
    for (int a = -2; a <= 2; ++a) {
        for (int b = -2; b <= 2; ++b) oracle.insert({std::clamp(5.0 + 5 * a, 0.0, 90.0), std::clamp(5.0 + 5 * b, 0.0, 90.0)});
    }
    std::set<std::vector<double>> got;
    for (const auto& c : combos) got.insert(degrees(c));
    EXPECT_EQ(got, oracle);
}

TEST(EnumerateCombinations, SortedUniqueWithinLimits) {
    const auto hand = load_hand_model(kHands / "toy_5finger.json");
    std::mt19937_64 gen(3);
    for (const auto& f : hand.fingers) {
        std::vector<double> centers;
        for (std::size_t k = 0; k < f.independent_count(); ++k) {
            const auto j = f.independent[k];
            std::uniform_real_distribution<double> d(f.joints[j].lower, f.joints[j].upper);
            centers.push_back(d(gen));
        }
        const auto combos = enumerate_joint_combinations(hand, f.name, centers, deg2rad(7), 3);
        const std::size_t bound = static_cast<std::size_t>(std::pow(7, f.independent_count()));
        EXPECT_LE(combos.size(), bound);
        EXPECT_TRUE(std::is_sorted(combos.begin(), combos.end()));
        EXPECT_EQ(std::adjacent_find(combos.begin(), combos.end()), combos.end());
        for (const auto& c : combos) EXPECT_NO_THROW(f.resolve(c));
    }
}

TEST(EnumerateCombinations, BadArguments) {
    const auto hand = parse(planar_hand({0.05}));
    EXPECT_THROW(enumerate_joint_combinations(hand, "f", {0.0}, 0.0, 2), Error);
    EXPECT_THROW(enumerate_joint_combinations(hand, "f", {0.0, 0.0}, 0.1, 2), Error);
}

TEST(LinkSkeleton, ZeroConfigurationCollinear) {
    const auto hand = parse(planar_hand({0.04, 0.03, 0.02}));
    const auto pts = link_skeleton(hand, "f", {{0, 0, 0}});
    ASSERT_GE(pts.size(), 3u);
    for (const auto& p : pts) {
        EXPECT_NEAR(p.y(), 0.0, 1e-12);
        EXPECT_NEAR(p.z(), 0.0, 1e-12);
    }
    EXPECT_NEAR(pts.front().x(), 0.0, 1e-12);
    EXPECT_NEAR(pts.back().x(), 0.07, 1e-12);
    for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_LE((pts[i] - pts[i - 1]).norm(), 0.005 + 1e-12);
}

TEST(LinkSkeleton, RightAngleAtJoint) {
    const auto hand = parse(planar_hand({0.04, 0.03, 0.02}));
    const auto pts = link_skeleton(hand, "f", {{0, deg2rad(90), 0}});
    const Vec3 corner(0.04, 0, 0);
    std::size_t at = pts.size();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if ((pts[i] - corner).norm() < 1e-12) at = i;
    }
    ASSERT_LT(at, pts.size() - 1);
    ASSERT_GT(at, 0u);
    const Vec3 in = (pts[at] - pts[at - 1]).normalized();
    const Vec3 out = (pts[at + 1] - pts[at]).normalized();
    EXPECT_NEAR(in.dot(out), 0.0, 1e-12);
    EXPECT_TRUE(pts.back().isApprox(Vec3(0.04, 0.03, 0), 1e-12));
}

TEST(LinkSkeleton, PointsLieOnFkJointOrigins) {
    const auto hand = load_hand_model(kHands / "toy_5finger.json");
    std::mt19937_64 gen(11);
    for (const auto& f : hand.fingers) {
        for (int trial = 0; trial < 20; ++trial) {
            JointCombination c;
            for (std::size_t k = 0; k < f.independent_count(); ++k) {
                const auto [lo, hi] = f.effective_limits(k);
                std::uniform_real_distribution<double> d(lo, hi);
                c.angles.push_back(d(gen));
            }
            const auto full = f.resolve(c);
            // per-joint FK oracle built directly from the joint specs
            std::vector<Vec3> origins;
            RigidTransform t = hand.palm_alignment;
            for (std::size_t j = 0; j < f.joints.size(); ++j) {
                t = t * f.joints[j].origin;
                origins.push_back(t.translation);
                t = t * RigidTransform::from_axis_angle(f.joints[j].axis, full[j]);
            }
            const auto pts = link_skeleton(hand, f.name, c);
            EXPECT_LT((pts.front() - origins.front()).norm(), 1e-9);
            EXPECT_LT((pts.back() - origins.back()).norm(), 1e-9);
            for (const auto& o : origins) {
                double best = 1e9;
                for (const auto& p : pts) best = std::min(best, (p - o).norm());
                EXPECT_LT(best, 1e-9);
            }
        }
    }
}

TEST(PalmBox, ClosedCountMatchesBruteForce) {
    const auto hand = load_hand_model(kHands / "toy_gripper.json");
    EXPECT_EQ(palm_box_contains(hand, SurfaceCloud{}), 0u);

    const SurfaceCloud corner({{hand.palm_box.max, Vec3::UnitX()}, {hand.palm_box.min, Vec3::UnitX()}}, FrameTag::palm);
    EXPECT_EQ(palm_box_contains(hand, corner), 2u);

    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-0.06, 0.06);
    std::vector<SurfacePoint> pts;
    std::size_t expected = 0;
    for (int i = 0; i < 100; ++i) {
        const Vec3 p(u(gen), u(gen), u(gen));
        pts.push_back({p, Vec3::UnitZ()});
        bool in = true;
        for (int k = 0; k < 3; ++k) in = in && p[k] >= hand.palm_box.min[k] && p[k] <= hand.palm_box.max[k];
        expected += in;
    }
    EXPECT_GT(expected, 0u);
    EXPECT_EQ(palm_box_contains(hand, SurfaceCloud(pts, FrameTag::palm)), expected);
}
