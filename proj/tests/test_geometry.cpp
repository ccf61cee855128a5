#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fsgkit/geometry/contact_face.hpp"
#include "fsgkit/geometry/hidden_points.hpp"
#include "fsgkit/geometry/hull.hpp"
#include "fsgkit/geometry/kdtree.hpp"
#include "fsgkit/geometry/mesh.hpp"
#include "fsgkit/geometry/planar.hpp"
#include "fsgkit/geometry/ply.hpp"
#include "fsgkit/geometry/primitives.hpp"
#include "fsgkit/geometry/sampling.hpp"
#include "support/oracles.hpp"

using namespace fsgkit;

namespace {

RigidTransform random_transform(std::mt19937_64& gen) {
    std::normal_distribution<double> nd;
    Eigen::Quaterniond q(nd(gen), nd(gen), nd(gen), nd(gen));
    q.normalize();
    return RigidTransform::from(q.toRotationMatrix(), Vec3(nd(gen), nd(gen), nd(gen)));
}

std::vector<Vec3> positions(const SurfaceCloud& c) {
    std::vector<Vec3> out;
    for (const auto& p : c) out.push_back(p.position);
    return out;
}

}  // namespace

TEST(Transform, ComposeWithInverseIsIdentity) {
    std::mt19937_64 gen(7);
    for (int i = 0; i < 200; ++i) {
        const auto t = random_transform(gen);
        EXPECT_TRUE(t.is_proper());
        const auto id = t * t.inverse();
        EXPECT_LT((id.rotation - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LT(id.translation.cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(Transform, CloudRoundTrip) {
    std::mt19937_64 gen(11);
    const auto cloud = poisson_disk_sample(primitives::icosphere(2), 200, 3);
    for (int i = 0; i < 20; ++i) {
        const auto t = random_transform(gen);
        const auto back = cloud.transformed(t, FrameTag::palm).transformed(t.inverse(), FrameTag::obj);
        ASSERT_EQ(back.size(), cloud.size());
        for (std::size_t k = 0; k < cloud.size(); ++k) {
            EXPECT_LT((back[k].position - cloud[k].position).cwiseAbs().maxCoeff(), 1e-9);
            EXPECT_LT((back[k].normal - cloud[k].normal).cwiseAbs().maxCoeff(), 1e-9);
        }
    }
}

TEST(Transform, QuaternionRoundTrip) {
    std::mt19937_64 gen(5);
    for (int i = 0; i < 50; ++i) {
        const auto t = random_transform(gen);
        const auto q = t.quaternion_wxyz();
        EXPECT_GE(q[0], 0.0);
        const auto back = RigidTransform::from_xyz_quat(t.translation, q);
        EXPECT_LT((back.rotation - t.rotation).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(SurfaceCloud, RejectsNonUnitNormal) {
    EXPECT_THROW(SurfaceCloud({{Vec3::Zero(), Vec3(0, 0, 2)}}, FrameTag::obj), Error);
}

TEST(PoissonDisk, CubeGivesAxisAlignedNormalsOnFaces) {
    const auto mesh = primitives::cube(1.0);
    const auto cloud = poisson_disk_sample(mesh, 1024, 42);
    EXPECT_GE(cloud.size(), 768u);
    EXPECT_LE(cloud.size(), 1280u);
    for (const auto& p : cloud) {
        EXPECT_NEAR(p.position.cwiseAbs().maxCoeff(), 0.5, 1e-12);
        EXPECT_NEAR(p.normal.cwiseAbs().maxCoeff(), 1.0, 1e-12);
        Eigen::Index axis;
        p.normal.cwiseAbs().maxCoeff(&axis);
        EXPECT_NEAR(std::abs(p.position[axis]), 0.5, 1e-12);
        EXPECT_GT(p.normal[axis] * p.position[axis], 0.0);
    }
}

TEST(PoissonDisk, SingleTriangle) {
    const TriangleMesh tri({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {{0, 1, 2}});
    const auto cloud = poisson_disk_sample(tri, 4, 1);
    ASSERT_GE(cloud.size(), 1u);
    for (const auto& p : cloud) EXPECT_LT((p.normal - Vec3::UnitZ()).norm(), 1e-12);
}

TEST(PoissonDisk, IcosphereMinimumSpacing) {
    const auto mesh = primitives::icosphere(3);
    ASSERT_EQ(mesh.triangles().size(), 1280u);
    const auto cloud = poisson_disk_sample(mesh, 256, 9);
    const double r = pds_radius(mesh.surface_area(), 256);
    EXPECT_GE(oracle::min_pairwise_distance(positions(cloud)), 0.75 * r);
    EXPECT_GE(cloud.size(), 192u);
    EXPECT_LE(cloud.size(), 320u);
}

TEST(PoissonDisk, BlueNoiseAcrossSeeds) {
    const auto mesh = primitives::box(Vec3(0.3, 0.1, 0.05));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto cloud = poisson_disk_sample(mesh, 300, seed);
        EXPECT_GE(oracle::min_pairwise_distance(positions(cloud)), 0.75 * pds_radius(mesh.surface_area(), 300));
    }
}

TEST(PoissonDisk, SameSeedSameCloud) {
    const auto mesh = primitives::icosphere(2);
    const auto a = poisson_disk_sample(mesh, 128, 77);
    const auto b = poisson_disk_sample(mesh, 128, 77);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(a[i] == b[i]);
}

TEST(PoissonDisk, InvalidMeshes) {
    EXPECT_THROW(poisson_disk_sample(TriangleMesh(), 16, 0), Error);
    const TriangleMesh flat({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)}, {{0, 1, 2}});
    try {
        poisson_disk_sample(flat, 16, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidMesh);
    }
}

TEST(HiddenPoints, HemisphereFromPoleKeepsEverything) {
    const auto mesh = primitives::spherical_cap(1.0, M_PI / 2 * 0.9, 12, 36);
    const auto cloud = poisson_disk_sample(mesh, 300, 4);
    const auto kept = visible_point_indices(cloud, Vec3(0, 0, 50));
    EXPECT_EQ(kept.size(), cloud.size());
}

TEST(HiddenPoints, SphereMatchesRayCastingOracle) {
    const auto mesh = primitives::icosphere(3);
    const auto cloud = poisson_disk_sample(mesh, 512, 12);
    const Vec3 view(0, 0, 10);
    const auto kept = visible_point_indices(cloud, view);
    std::vector<bool> is_kept(cloud.size(), false);
    for (auto i : kept) is_kept[i] = true;

    int back = 0, back_removed = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vec3& p = cloud[i].position;
        // lift slightly along the normal so the point's own facet does not occlude it
        const bool ray_visible =
            oracle::visible(view, p + 1e-6 * cloud[i].normal, mesh.vertices(), mesh.triangles());
        if (p.z() > 0.3) {
            EXPECT_TRUE(ray_visible);
            EXPECT_TRUE(is_kept[i]) << "front point " << i << " removed";
        }
        if (p.z() < -0.1) {
            EXPECT_FALSE(ray_visible);
            ++back;
            back_removed += !is_kept[i];
        }
    }
    ASSERT_GT(back, 0);
    EXPECT_GE(back_removed, 0.95 * back);
}

TEST(HiddenPoints, ParallelPlanesBottomRemoved) {
    std::vector<SurfacePoint> pts;
    for (int i = -10; i <= 10; ++i) {
        for (int j = -10; j <= 10; ++j) pts.push_back({Vec3(0.1 * i, 0.1 * j, 1.0), Vec3::UnitZ()});
    }
    const std::size_t top = pts.size();
    for (int i = -5; i <= 5; ++i) {
        for (int j = -5; j <= 5; ++j) pts.push_back({Vec3(0.1 * i + 0.03, 0.1 * j + 0.03, 0.0), Vec3::UnitZ()});
    }
    const SurfaceCloud cloud(pts, FrameTag::obj);
    const Vec3 view(0, 0, 3);
    const std::vector<Vec3> quad = {Vec3(-1, -1, 1), Vec3(1, -1, 1), Vec3(1, 1, 1), Vec3(-1, 1, 1)};
    const std::vector<std::array<int, 3>> tris = {{0, 1, 2}, {0, 2, 3}};
    const auto kept = visible_point_indices(cloud, view);
    for (auto i : kept) {
        if (i >= top) ADD_FAILURE() << "bottom point " << i << " kept";
    }
    for (std::size_t i = top; i < pts.size(); ++i) EXPECT_FALSE(oracle::visible(view, pts[i].position, quad, tris));
    EXPECT_GT(kept.size(), top / 2);
}

TEST(HiddenPoints, OutputIsSubsetInOrder) {
    const auto cloud = poisson_disk_sample(primitives::box(Vec3(0.2, 0.1, 0.3)), 400, 8);
    const auto out = remove_hidden_points(cloud, Vec3(1, 2, 3));
    std::size_t cursor = 0;
    for (const auto& p : out) {
        while (cursor < cloud.size() && !(cloud[cursor] == p)) ++cursor;
        ASSERT_LT(cursor, cloud.size());
        ++cursor;
    }
}

TEST(HiddenPoints, ViewpointOnCloudIsDegenerate) {
    const auto cloud = poisson_disk_sample(primitives::cube(1.0), 64, 1);
    try {
        visible_point_indices(cloud, cloud[3].position);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::HPRDegenerate);
    }
}

TEST(KdTree, CollinearExactHit) {
    const NeighborIndex idx({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)});
    const auto h = idx.nearest(Vec3(0, 0, 0));
    EXPECT_EQ(h.index, 0u);
    EXPECT_EQ(h.distance, 0.0);
}

TEST(KdTree, MatchesLinearScan) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Vec3> pts(1000);
    for (auto& p : pts) p = Vec3(u(gen), u(gen), u(gen));
    const NeighborIndex idx(pts);
    for (int q = 0; q < 100; ++q) {
        const Vec3 query(u(gen), u(gen), u(gen));
        const auto h = idx.nearest(query);
        const auto [bi, bd] = oracle::linear_nearest(pts, query);
        EXPECT_EQ(h.index, bi);
        EXPECT_DOUBLE_EQ(h.distance, bd);
        const double r = 0.2;
        std::vector<std::size_t> expect;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if ((pts[i] - query).norm() <= r) expect.push_back(i);
        }
        std::vector<std::size_t> got;
        for (const auto& hit : idx.within_radius(query, r)) got.push_back(hit.index);
        std::sort(got.begin(), got.end());
        EXPECT_EQ(got, expect);
    }
}

TEST(KdTree, ThousandRandomConfigurations) {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> u(-1, 1);
    std::uniform_int_distribution<int> count(1, 60);
    for (int cfg = 0; cfg < 1000; ++cfg) {
        std::vector<Vec3> pts(static_cast<std::size_t>(count(gen)));
        // coarse lattice coordinates so exact ties occur
        for (auto& p : pts) p = Vec3(std::round(u(gen) * 4), std::round(u(gen) * 4), std::round(u(gen) * 4)) / 4;
        const NeighborIndex idx(pts);
        for (int q = 0; q < 5; ++q) {
            const Vec3 query(u(gen), u(gen), u(gen));
            const auto h = idx.nearest(query);
            const auto [bi, bd] = oracle::linear_nearest(pts, query);
            ASSERT_EQ(h.index, bi);
            ASSERT_DOUBLE_EQ(h.distance, bd);
        }
        const auto knn = idx.k_nearest(pts[0], 3);
        ASSERT_EQ(knn.size(), std::min<std::size_t>(3, pts.size()));
        EXPECT_EQ(knn.front().distance, 0.0);
    }
}

TEST(KdTree, ZeroRadiusOnlyExactMatches) {
    const NeighborIndex idx({Vec3(0, 0, 0), Vec3(1e-9, 0, 0), Vec3(1, 1, 1)});
    const auto hits = idx.within_radius(Vec3(0, 0, 0), 0.0);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0].index, 0u);
}

TEST(KdTree, EmptyCloudThrows) {
    try {
        build_kdtree(SurfaceCloud());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyCloud);
    }
}

TEST(ConvexHull, SquareWithCenter) {
    const std::vector<VecN<2>> pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
    const auto hull = convex_hull<2>(pts);
    EXPECT_EQ(hull.vertices, (std::vector<std::size_t>{0, 1, 2, 3}));
    EXPECT_EQ(hull.facets.size(), 4u);
    EXPECT_NEAR(hull.volume, 1.0, 1e-12);
}

TEST(ConvexHull, DiskPointsContained) {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<VecN<2>> pts;
    for (int i = 0; i < 50; ++i) {
        const double r = std::sqrt(u(gen)), a = 2 * M_PI * u(gen);
        pts.emplace_back(r * std::cos(a), r * std::sin(a));
    }
    const auto hull = convex_hull<2>(pts);
    for (const auto& p : pts) EXPECT_TRUE(hull.contains(p, 1e-9));
    for (auto v : hull.vertices) EXPECT_LT(v, pts.size());
}

TEST(ConvexHull, CrossPolytopeFacetDistance) {
    std::vector<VecN<6>> pts;
    std::vector<oracle::V6> plain;
    for (int i = 0; i < 6; ++i) {
        for (double s : {1.0, -1.0}) {
            VecN<6> e = VecN<6>::Zero();
            e[i] = s;
            pts.push_back(e);
            plain.push_back(e);
        }
    }
    const auto hull = convex_hull<6>(pts);
    EXPECT_EQ(hull.facets.size(), 64u);
    EXPECT_NEAR(hull.depth(VecN<6>::Zero()), 1.0 / std::sqrt(6.0), 1e-12);
    EXPECT_NEAR(oracle::brute_force_inner_radius(plain), 1.0 / std::sqrt(6.0), 1e-12);
    EXPECT_GT(oracle::origin_interior_margin(plain), 0.0);
    EXPECT_NEAR(hull.volume, std::pow(2.0, 6) / 720.0, 1e-12);
}

TEST(ConvexHull, Random6DContainment) {
    std::mt19937_64 gen(4);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<VecN<6>> pts(60);
        for (auto& p : pts) {
            for (int k = 0; k < 6; ++k) p[k] = nd(gen);
        }
        const auto hull = convex_hull<6>(pts);
        for (const auto& p : pts) EXPECT_TRUE(hull.contains(p, 1e-9));
        for (const auto& f : hull.facets) EXPECT_NEAR(f.normal.norm(), 1.0, 1e-9);
    }
}

TEST(ConvexHull, DuplicateAndCoplanarInput6D) {
    // friction-cone style input: many points sharing hyperplanes
    std::vector<VecN<6>> pts;
    for (int i = 0; i < 6; ++i) {
        for (double s : {1.0, -1.0}) {
            VecN<6> e = VecN<6>::Zero();
            e[i] = s;
            pts.push_back(e);
            pts.push_back(e);
            VecN<6> mid = e;
            mid[(i + 1) % 6] = 0.0;
            pts.push_back(0.5 * e);
        }
    }
    const auto hull = convex_hull<6>(pts);
    for (const auto& p : pts) EXPECT_TRUE(hull.contains(p, 1e-9));
    EXPECT_NEAR(hull.depth(VecN<6>::Zero()), 1.0 / std::sqrt(6.0), 1e-9);
}

TEST(ConvexHull, DegenerateInputReportsRank) {
    std::vector<VecN<6>> pts;
    for (int i = 0; i < 10; ++i) {
        VecN<6> p = VecN<6>::Zero();
        p[0] = i;
        p[1] = i * i;
        pts.push_back(p);
    }
    try {
        convex_hull<6>(pts);
        FAIL();
    } catch (const DegenerateHullError& e) {
        EXPECT_EQ(e.rank(), 2);
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateHull);
    }
    const std::vector<VecN<2>> line = {{0, 0}, {1, 1}, {2, 2}};
    EXPECT_THROW(convex_hull<2>(line), DegenerateHullError);
}

TEST(InscribedCircle, Examples) {
    const std::vector<Vec2> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const auto c = largest_inscribed_circle(std::span<const Vec2>(square));
    EXPECT_NEAR(c.radius, 0.5, 1e-9);
    EXPECT_NEAR((c.center - Vec2(0.5, 0.5)).norm(), 0.0, 1e-9);

    const std::vector<Vec2> rect = {{0, 0}, {2, 0}, {2, 1}, {0, 1}};
    EXPECT_NEAR(largest_inscribed_circle(std::span<const Vec2>(rect)).radius, 0.5, 1e-9);

    const std::vector<Vec2> tri = {{0, 0}, {1, 0}, {0, 1}};
    const double a = 1, b = 1, hyp = std::sqrt(2.0);
    const auto t = largest_inscribed_circle(std::span<const Vec2>(tri));
    EXPECT_NEAR(t.radius, (a + b - hyp) / 2, 1e-9);
}

TEST(InscribedCircle, DegenerateThrows) {
    const std::vector<Vec2> seg = {{0, 0}, {1, 0}, {2, 0}};
    EXPECT_THROW(largest_inscribed_circle(std::span<const Vec2>(seg)), DegenerateHullError);
}

TEST(InscribedCircle, CircleTouchesBoundaryAndStaysInside) {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Vec2> pts(12);
        for (auto& p : pts) p = Vec2(u(gen), 0.5 * u(gen));
        const auto poly = ConvexPolygon::from_points(pts);
        const auto c = largest_inscribed_circle(poly);
        EXPECT_NEAR(poly.clearance(c.center), c.radius, 1e-9);
        // no better centre on a fine grid
        for (double x = -1; x <= 1; x += 0.05) {
            for (double y = -0.5; y <= 0.5; y += 0.05) EXPECT_LE(poly.clearance(Vec2(x, y)), c.radius + 1e-9);
        }
    }
}

TEST(InscribedRect, Examples) {
    const std::vector<Vec2> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const auto r = largest_inscribed_axis_rect(std::span<const Vec2>(square));
    EXPECT_NEAR(r.area(), 1.0, 0.02);

    std::vector<Vec2> disk;
    for (int i = 0; i < 64; ++i) disk.emplace_back(std::cos(2 * M_PI * i / 64), std::sin(2 * M_PI * i / 64));
    EXPECT_NEAR(largest_inscribed_axis_rect(std::span<const Vec2>(disk)).area(), 2.0, 0.04);

    const std::vector<Vec2> bar = {{0, 0}, {3, 0}, {3, 1}, {0, 1}};
    const auto b = largest_inscribed_axis_rect(std::span<const Vec2>(bar));
    EXPECT_NEAR(b.area(), 3.0, 0.06);
    EXPECT_NEAR(b.corner_min.x(), 0.0, 0.03);
    EXPECT_NEAR(b.corner_max.y(), 1.0, 0.03);
}

TEST(InscribedRect, StaysInsidePolygon) {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Vec2> pts(9);
        for (auto& p : pts) p = Vec2(u(gen), u(gen));
        const auto poly = ConvexPolygon::from_points(pts);
        const auto r = largest_inscribed_axis_rect(poly);
        for (const Vec2& c : {r.corner_min, r.corner_max, Vec2(r.corner_min.x(), r.corner_max.y()),
                              Vec2(r.corner_max.x(), r.corner_min.y())}) {
            EXPECT_GE(poly.clearance(c), -1e-9);
        }
        EXPECT_GT(r.area(), 0.0);
    }
}

TEST(ProjectToPlane, Examples) {
    const std::vector<SurfacePoint> flat = {{Vec3(1, 2, 0), Vec3::UnitZ()}, {Vec3(-3, 0.5, 0), Vec3::UnitZ()}};
    const auto p = project_to_plane(flat, Vec3::Zero(), Vec3::UnitZ());
    EXPECT_NEAR((p[0] - p[1]).norm(), (flat[0].position - flat[1].position).norm(), 1e-12);
    EXPECT_NEAR(p[0].norm(), flat[0].position.norm(), 1e-12);

    const std::vector<SurfacePoint> up = {{Vec3(0, 0, 5), Vec3::UnitZ()}};
    EXPECT_LT(project_to_plane(up, Vec3::Zero(), Vec3::UnitZ())[0].norm(), 1e-12);
}

TEST(ProjectToPlane, NeverIncreasesDistances) {
    std::mt19937_64 gen(17);
    std::normal_distribution<double> nd;
    std::vector<SurfacePoint> pts(60);
    for (auto& p : pts) p = {Vec3(nd(gen), nd(gen), nd(gen)), Vec3::UnitX()};
    const Vec3 n = Vec3(nd(gen), nd(gen), nd(gen)).normalized();
    const auto q = project_to_plane(pts, Vec3(nd(gen), nd(gen), nd(gen)), n);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            EXPECT_LE((q[i] - q[j]).norm(), (pts[i].position - pts[j].position).norm() + 1e-12);
        }
    }
}

TEST(ContactFace, InvariantsSurviveRigidMotion) {
    std::mt19937_64 gen(2);
    const auto face = ContactFace::rectangle({Vec3(0, 0, 0), Vec3::UnitZ()}, Vec3(0.01, 0, 0), Vec3(0, 0.004, 0));
    ASSERT_TRUE(face.is_valid());
    for (int i = 0; i < 20; ++i) {
        const auto moved = face.transformed(random_transform(gen));
        EXPECT_TRUE(moved.is_valid());
        EXPECT_NEAR(moved.area(), face.area(), 1e-15);
    }
    EXPECT_NEAR(face.area(), 4 * 0.01 * 0.004, 1e-15);
    EXPECT_TRUE(face.contains(Vec3(0.0099, 0.0039, 0.0001), 0.001));
    EXPECT_FALSE(face.contains(Vec3(0.0101, 0, 0), 0.001));
    EXPECT_FALSE(face.contains(Vec3(0, 0, 0.002), 0.001));
}

TEST(MeshIo, ObjAndStlRoundTrip) {
    const auto mesh = primitives::box(Vec3(0.1, 0.2, 0.3));
    std::stringstream obj;
    write_obj(obj, mesh);
    const auto a = load_obj(obj);
    EXPECT_EQ(a.triangles().size(), mesh.triangles().size());
    EXPECT_NEAR(a.surface_area(), mesh.surface_area(), 1e-12);
    std::stringstream stl;
    write_stl_binary(stl, mesh);
    const auto b = load_stl_binary(stl);
    EXPECT_EQ(b.triangles().size(), mesh.triangles().size());
    EXPECT_NEAR(b.surface_area(), mesh.surface_area(), 1e-6);
}

TEST(Ply, RoundTripFloat32) {
    const auto cloud = poisson_disk_sample(primitives::cube(0.04), 100, 5);
    std::stringstream ss;
    write_ply(ss, cloud);
    const auto back = read_ply(ss);
    ASSERT_EQ(back.size(), cloud.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        EXPECT_EQ(back[i].position.x(), static_cast<double>(static_cast<float>(cloud[i].position.x())));
        EXPECT_LT((back[i].normal - cloud[i].normal).norm(), 1e-6);
    }
}
