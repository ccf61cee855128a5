#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fsgkit/errors.hpp"
#include "fsgkit/geometry/contact_face.hpp"
#include "fsgkit/geometry/hidden_points.hpp"
#include "fsgkit/geometry/kdtree.hpp"
#include "fsgkit/geometry/planar.hpp"
#include "fsgkit/geometry/sampling.hpp"
#include "fsgkit/hand/hand_model.hpp"
#include "fsgkit/parallel.hpp"

namespace fsgkit {

enum class FaceShape { circle, rect, automatic };

inline FaceShape parse_face_shape(const std::string& s) {
    if (s == "circle") return FaceShape::circle;
    if (s == "rect") return FaceShape::rect;
    if (s == "auto") return FaceShape::automatic;
    throw Error(ErrorKind::SchemaError, "face_shape must be circle, rect or auto (got '" + s + "')");
}

inline std::string to_string(FaceShape s) {
    switch (s) {
        case FaceShape::circle: return "circle";
        case FaceShape::rect: return "rect";
        case FaceShape::automatic: return "auto";
    }
    return "?";
}

/// Candidate contact face on the fingertip, everything in frame_tip.
struct FaceCandidate {
    SurfacePoint center;  // cloud_f point the face was grown from
    ContactFace face;
    double area = 0;
};

struct WorkspacePoint {
    Vec3 position = Vec3::Zero();  // frame_palm
    Vec3 normal = Vec3::UnitY();
    JointCombination joint_angles;
    ContactFace face;  // frame_palm
    std::uint32_t face_index = 0;
    std::uint32_t combo_index = 0;
};

enum class OppositionGroup : std::uint8_t { A = 0, B = 1 };

struct WorkspaceCloud {
    std::string finger;
    int priority = 1;
    std::vector<WorkspacePoint> points;
    Vec3 nor_ave = Vec3::Zero();
    OppositionGroup group = OppositionGroup::A;
    std::vector<FaceCandidate> faces;              // frame_tip, indexed by face_index
    std::vector<JointCombination> combos;          // indexed by combo_index
    std::vector<std::vector<Vec3>> skeletons;      // frame_palm polyline per combo

    Vec3 mean_position() const {
        Vec3 c = Vec3::Zero();
        for (const auto& p : points) c += p.position;
        return points.empty() ? c : Vec3(c / static_cast<double>(points.size()));
    }

    SurfaceCloud as_surface_cloud() const {
        std::vector<SurfacePoint> pts;
        pts.reserve(points.size());
        for (const auto& p : points) pts.push_back({p.position, p.normal});
        return SurfaceCloud(std::move(pts), FrameTag::palm);
    }

    void refresh_summary() {
        Vec3 s = Vec3::Zero();
        for (const auto& p : points) s += p.normal;
        nor_ave = s.norm() > 0 ? Vec3(s.normalized()) : s;
        group = nor_ave.y() > 0 ? OppositionGroup::A : OppositionGroup::B;
    }
};

/// Recorded grasp used to condition workspace generation.
struct Demonstration {
    std::string object;
    RigidTransform palm_pose;  // palm frame expressed in frame_obj
    std::map<std::string, JointCombination> joint_angles;
    std::map<std::string, std::vector<Vec3>> contacts;  // frame_tip, per finger
};

struct AutowsOptions {
    double thre_pos = 0.002;
    double thre_nor = 0.9;
    std::size_t tip_samples = 512;
    FaceShape face_shape = FaceShape::circle;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

inline Vec3 fingertip_viewpoint(const TriangleMesh& mesh, const Vec3& v_f, const Vec3& v_u) {
    const double d = mesh.bbox_diagonal();
    if (!(d > 0)) throw Error(ErrorKind::InvalidMesh, "fingertip mesh has a zero bounding box");
    return mesh.centroid() + 100.0 * d * v_f + 50.0 * d * v_u;
}

/// PDS cloud of the fingertip mesh with points hidden from the pulp-side viewpoint removed.
inline SurfaceCloud fingertip_cloud(const FingerChain& finger, std::size_t samples, std::uint64_t seed) {
    const auto cloud = poisson_disk_sample(finger.tip_mesh, samples, seed, FrameTag::tip);
    return remove_hidden_points(cloud, fingertip_viewpoint(finger.tip_mesh, finger.v_f, finger.v_u));
}

namespace detail {

inline std::optional<FaceCandidate> fit_face(const SurfaceCloud& cloud_f, const SurfacePoint& c, double thre_pos,
                                             double thre_nor, FaceShape shape, const std::optional<Vec3>& up) {
    std::vector<SurfacePoint> selected;
    for (const auto& p : cloud_f) {
        if (std::abs((p.position - c.position).dot(c.normal)) < thre_pos && p.normal.dot(c.normal) > thre_nor) {
            selected.push_back(p);
        }
    }
    if (selected.size() < 3) return std::nullopt;
    const auto plane = PlaneFrame::make(c.position, c.normal, up);
    const auto projected = project_to_plane(selected, plane);
    ConvexPolygon poly;
    try {
        poly = ConvexPolygon::from_points(projected);
    } catch (const DegenerateHullError&) {
        return std::nullopt;
    }
    if (poly.vertices.size() < 3 || !(poly.area() > 0)) return std::nullopt;

    std::optional<ContactFace> circle, rect;
    if (shape != FaceShape::rect) {
        const auto ci = largest_inscribed_circle(poly);
        if (ci.radius > 0) circle = ContactFace::circle({plane.to_space(ci.center), c.normal}, ci.radius);
    }
    if (shape != FaceShape::circle) {
        const auto r = largest_inscribed_axis_rect(poly);
        const Vec2 h = r.half_extents();
        if (h.x() > 0 && h.y() > 0) {
            rect = ContactFace::rectangle({plane.to_space(r.center()), c.normal}, h.x() * plane.axis_u,
                                          h.y() * plane.axis_v);
        }
    }
    std::optional<ContactFace> best;
    if (circle && rect) best = circle->area() >= rect->area() ? circle : rect;
    else best = circle ? circle : rect;
    if (!best || !(best->area() > 0)) return std::nullopt;
    return FaceCandidate{c, *best, best->area()};
}

}  // namespace detail

/// Grows a planar face around the cloud_f point nearest to q_init: points
/// close to it along its normal and with similar normals are projected onto
/// its tangent plane, and the largest inscribed circle and/or axis-aligned
/// rectangle of their hull becomes the face. `up` orients the rectangle axes.
inline FaceCandidate approximate_contact_face(const SurfaceCloud& cloud_f, const Vec3& q_init, double thre_pos,
                                              double thre_nor, FaceShape shape = FaceShape::automatic,
                                              const std::optional<Vec3>& up = std::nullopt) {
    if (cloud_f.empty()) throw Error(ErrorKind::EmptyCloud, "fingertip cloud is empty");
    if (!(thre_pos > 0) || thre_nor < -1 || thre_nor > 1) {
        throw Error(ErrorKind::InvalidArgument, "thre_pos must be > 0 and thre_nor in [-1, 1]");
    }
    const auto index = build_kdtree(cloud_f);
    const auto& c = cloud_f[index.nearest(q_init).index];
    auto face = detail::fit_face(cloud_f, c, thre_pos, thre_nor, shape, up);
    if (!face) throw Error(ErrorKind::FaceDegenerate, "fewer than three usable points around the face center");
    return *face;
}

/// The first face plus up to three faces re-grown from the cloud points
/// nearest to the first face's centre shifted one face extent up, left and
/// right. Faces under a quarter of the first face's area are dropped.
inline std::vector<FaceCandidate> expand_face_candidates(const SurfaceCloud& cloud_f, const FaceCandidate& first,
                                                         double thre_pos, double thre_nor, const Vec3& v_u,
                                                         FaceShape shape = FaceShape::automatic) {
    std::vector<FaceCandidate> out{first};
    const auto& f = first.face;
    const auto plane = PlaneFrame::make(f.center.position, f.center.normal, v_u);
    double ext_u = f.radius, ext_v = f.radius;
    if (f.kind == FaceKind::rectangle) {
        ext_u = std::abs(f.edge_u.dot(plane.axis_u)) + std::abs(f.edge_v.dot(plane.axis_u));
        ext_v = std::abs(f.edge_u.dot(plane.axis_v)) + std::abs(f.edge_v.dot(plane.axis_v));
    }
    const auto index = build_kdtree(cloud_f);
    const std::array<Vec3, 3> targets = {f.center.position + ext_v * plane.axis_v,
                                         f.center.position - ext_u * plane.axis_u,
                                         f.center.position + ext_u * plane.axis_u};
    for (const auto& t : targets) {
        const auto& c = cloud_f[index.nearest(t).index];
        auto face = detail::fit_face(cloud_f, c, thre_pos, thre_nor, shape, v_u);
        if (face && face->area >= first.area / 4.0) out.push_back(*face);
    }
    return out;
}

/// One point per (face, combo), ordered face-major. Face centres and
/// descriptors are carried to frame_palm by forward kinematics.
inline WorkspaceCloud generate_workspace_cloud(const HandModel& hand, const std::string& finger,
                                               const std::vector<FaceCandidate>& faces,
                                               const std::vector<JointCombination>& combos, unsigned threads = 1) {
    if (faces.empty() || combos.empty()) throw Error(ErrorKind::InvalidArgument, "faces and combos must be non-empty");
    const auto& chain = hand.finger(finger);
    WorkspaceCloud ws;
    ws.finger = finger;
    ws.priority = chain.priority;
    ws.faces = faces;
    ws.combos = combos;
    ws.skeletons.resize(combos.size());
    std::vector<RigidTransform> tip(combos.size());
    parallel_for(combos.size(), threads, [&](std::size_t k) {
        tip[k] = forward_kinematics(hand, finger, combos[k]);
        ws.skeletons[k] = link_skeleton(hand, finger, combos[k]);
    });
    ws.points.resize(faces.size() * combos.size());
    parallel_for(ws.points.size(), threads, [&](std::size_t i) {
        const std::size_t fi = i / combos.size(), k = i % combos.size();
        WorkspacePoint& p = ws.points[i];
        p.face = faces[fi].face.transformed(tip[k]);
        p.position = p.face.center.position;
        p.normal = p.face.center.normal;
        p.joint_angles = combos[k];
        p.face_index = static_cast<std::uint32_t>(fi);
        p.combo_index = static_cast<std::uint32_t>(k);
    });
    ws.refresh_summary();
    return ws;
}

/// Drops points whose normal points against the cloud's dominant palm-frame y direction.
inline WorkspaceCloud filter_workspace(const WorkspaceCloud& cloud) {
    WorkspaceCloud out = cloud;
    out.points.clear();
    const bool facing = cloud.nor_ave.y() > 0;
    for (const auto& p : cloud.points) {
        const bool drop = facing ? p.normal.y() < -0.001 : p.normal.y() > 0.001;
        if (!drop) out.points.push_back(p);
    }
    if (out.points.empty()) throw Error(ErrorKind::EmptyWorkspace, "every point of " + cloud.finger + " was filtered");
    out.refresh_summary();
    return out;
}

namespace detail {

inline std::uint64_t finger_seed(std::uint64_t seed, std::size_t finger_index) {
    return Rng({seed, 0x7769ULL, finger_index}).next_u64();
}

inline std::size_t finger_index(const HandModel& hand, const std::string& name) {
    for (std::size_t i = 0; i < hand.fingers.size(); ++i) {
        if (hand.fingers[i].name == name) return i;
    }
    throw Error(ErrorKind::NotFound, "no finger " + name);
}

inline WorkspaceCloud workspace_for(const HandModel& hand, const std::string& finger, const Vec3& q_init,
                                    bool q_is_centroid, const std::vector<JointCombination>& combos,
                                    const AutowsOptions& opt) {
    const auto& chain = hand.finger(finger);
    const auto cloud_f = fingertip_cloud(chain, opt.tip_samples, finger_seed(opt.seed, finger_index(hand, finger)));
    const Vec3 q = q_is_centroid ? cloud_f.centroid() : q_init;
    const auto first = approximate_contact_face(cloud_f, q, opt.thre_pos, opt.thre_nor, opt.face_shape, chain.v_u);
    const auto faces = expand_face_candidates(cloud_f, first, opt.thre_pos, opt.thre_nor, chain.v_u, opt.face_shape);
    return filter_workspace(generate_workspace_cloud(hand, finger, faces, combos, opt.threads));
}

}  // namespace detail

/// Clouds for the demonstrated fingers (those with recorded contacts), in hand order.
inline std::vector<WorkspaceCloud> autows_from_demonstration(const HandModel& hand, const Demonstration& demo,
                                                             double step, int steps_each_way,
                                                             const AutowsOptions& opt) {
    for (const auto& [name, _] : demo.contacts) {
        if (!hand.has_finger(name)) throw Error(ErrorKind::SchemaError, "demonstration names unknown finger " + name);
    }
    for (const auto& [name, _] : demo.joint_angles) {
        if (!hand.has_finger(name)) throw Error(ErrorKind::SchemaError, "demonstration names unknown finger " + name);
    }
    std::vector<WorkspaceCloud> out;
    for (const auto& chain : hand.fingers) {
        auto it = demo.contacts.find(chain.name);
        if (it == demo.contacts.end() || it->second.empty()) continue;
        auto angles = demo.joint_angles.find(chain.name);
        if (angles == demo.joint_angles.end()) {
            throw Error(ErrorKind::SchemaError, "demonstration has contacts but no joint angles for " + chain.name);
        }
        chain.resolve(angles->second);  // validates the demonstrated angles
        Vec3 q = Vec3::Zero();
        for (const auto& c : it->second) q += c;
        q /= static_cast<double>(it->second.size());
        const auto combos = enumerate_joint_combinations(hand, chain.name, angles->second.angles, step, steps_each_way);
        out.push_back(detail::workspace_for(hand, chain.name, q, false, combos, opt));
    }
    return out;
}

/// Per-finger, per-independent-joint [min, max] in degrees.
using JointRanges = std::map<std::string, std::vector<std::pair<double, double>>>;

/// Inclusive grid over [lo, hi] (degrees) at `step_deg`, returned in radians.
inline std::vector<double> range_grid(double lo_deg, double hi_deg, double step_deg) {
    std::vector<double> out;
    if (!(step_deg > 0)) throw Error(ErrorKind::InvalidArgument, "range step must be positive");
    const auto n = static_cast<long>(std::floor((hi_deg - lo_deg) / step_deg + 1e-9));
    for (long k = 0; k <= n; ++k) out.push_back(deg2rad(lo_deg + static_cast<double>(k) * step_deg));
    if (hi_deg - (lo_deg + static_cast<double>(n) * step_deg) > 1e-9) out.push_back(deg2rad(hi_deg));
    return out;
}

inline std::vector<JointCombination> range_combinations(const HandModel& hand, const std::string& finger,
                                                        const std::vector<std::pair<double, double>>& ranges,
                                                        double step_deg) {
    const auto& chain = hand.finger(finger);
    if (ranges.size() != chain.independent_count()) {
        throw Error(ErrorKind::SchemaError, "finger " + finger + ": one range per independent joint required");
    }
    std::vector<JointCombination> out{{}};
    for (std::size_t k = 0; k < ranges.size(); ++k) {
        const auto& js = chain.joints[chain.independent[k]];
        const auto [lo, hi] = ranges[k];
        const auto [lower, upper] = chain.effective_limits(k);
        constexpr double tol = 1e-9;
        if (lo > hi || deg2rad(lo) < lower - tol || deg2rad(hi) > upper + tol) {
            throw Error(ErrorKind::JointLimit, "range for joint " + js.name + " outside its limits");
        }
        std::vector<JointCombination> next;
        for (const auto& prefix : out) {
            for (double v : range_grid(lo, hi, step_deg)) {
                JointCombination c = prefix;
                c.angles.push_back(std::clamp(v, lower, upper));
                next.push_back(std::move(c));
            }
        }
        out = std::move(next);
    }
    return out;
}

/// Clouds for every finger listed in `ranges`, faces seeded from the cloud_f centroid.
inline std::vector<WorkspaceCloud> autows_from_ranges(const HandModel& hand, const JointRanges& ranges,
                                                      double step_deg, const AutowsOptions& opt) {
    for (const auto& [name, _] : ranges) {
        if (!hand.has_finger(name)) throw Error(ErrorKind::SchemaError, "ranges name unknown finger " + name);
    }
    std::vector<WorkspaceCloud> out;
    for (const auto& chain : hand.fingers) {
        auto it = ranges.find(chain.name);
        if (it == ranges.end()) continue;
        const auto combos = range_combinations(hand, chain.name, it->second, step_deg);
        out.push_back(detail::workspace_for(hand, chain.name, Vec3::Zero(), true, combos, opt));
    }
    return out;
}

}  // namespace fsgkit
