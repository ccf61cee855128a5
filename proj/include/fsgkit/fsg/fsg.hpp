#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fsgkit/autows/autows.hpp"
#include "fsgkit/errors.hpp"
#include "fsgkit/geometry/kdtree.hpp"
#include "fsgkit/hand/hand_model.hpp"
#include "fsgkit/object/object_processing.hpp"
#include "fsgkit/parallel.hpp"
#include "fsgkit/quality/grasp_quality.hpp"
#include "fsgkit/rng.hpp"

namespace fsgkit {

struct FsgConfig {
    int outer_iterations = 200;
    int inner_rotations = 15;
    int pose_target = 10;
    double pos_tolerance = 0.005;
    double nor_tolerance = 0.85;
    double table_clearance = 0.005;
    int palm_points_max = 0;
    double q1_min = 0.0;
    bool use_affordance = false;
    bool finger_iteration = true;
    bool link_penetration = true;
    std::uint64_t seed = 0;
    int threads = 0;  // 0: FSGKIT_THREADS or hardware concurrency
    int ordering_axis = 1;
    QualityParams quality;
    double dedup_translation = 0.005;
    double dedup_rotation_deg = 5.0;
    bool trace = false;

    void validate() const {
        if (outer_iterations < 1 || inner_rotations < 1 || pose_target < 1) {
            throw Error(ErrorKind::InvalidArgument, "outer_iterations, inner_rotations and pose_target must be >= 1");
        }
        if (ordering_axis < 0 || ordering_axis > 2) throw Error(ErrorKind::InvalidArgument, "ordering_axis must be 0, 1 or 2");
        if (!(pos_tolerance > 0)) throw Error(ErrorKind::InvalidArgument, "pos_tolerance must be positive");
    }
};

enum class Outcome : std::uint8_t { accepted, palm_collision, table_collision, no_contact, ordering, q1, penetration };

inline std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::accepted: return "accepted";
        case Outcome::palm_collision: return "palm_collision";
        case Outcome::table_collision: return "table_collision";
        case Outcome::no_contact: return "no_contact";
        case Outcome::ordering: return "ordering";
        case Outcome::q1: return "q1";
        case Outcome::penetration: return "penetration";
    }
    return "?";
}

struct RejectionCounters {
    std::size_t attempts = 0;
    std::size_t accepted = 0;
    std::size_t palm_collision = 0;
    std::size_t table_collision = 0;
    std::size_t no_contact = 0;
    std::size_t ordering = 0;
    std::size_t q1 = 0;
    std::size_t penetration = 0;

    void add(Outcome o) {
        ++attempts;
        switch (o) {
            case Outcome::accepted: ++accepted; break;
            case Outcome::palm_collision: ++palm_collision; break;
            case Outcome::table_collision: ++table_collision; break;
            case Outcome::no_contact: ++no_contact; break;
            case Outcome::ordering: ++ordering; break;
            case Outcome::q1: ++q1; break;
            case Outcome::penetration: ++penetration; break;
        }
    }

    std::size_t outcome_sum() const {
        return accepted + palm_collision + table_collision + no_contact + ordering + q1 + penetration;
    }

    RejectionCounters& operator+=(const RejectionCounters& o) {
        attempts += o.attempts;
        accepted += o.accepted;
        palm_collision += o.palm_collision;
        table_collision += o.table_collision;
        no_contact += o.no_contact;
        ordering += o.ordering;
        q1 += o.q1;
        penetration += o.penetration;
        return *this;
    }
};

struct Provenance {
    std::uint64_t seed = 0;
    int round = 0;
    int outer = 0;
    int inner = 0;
};

/// One finger's matched pair: object point (cloud_full index) and workspace point.
struct FingerContact {
    std::string finger;
    std::size_t object_index = 0;
    std::size_t ws_index = 0;
    OppositionGroup group = OppositionGroup::A;
    SurfacePoint palm_point;  // p_obj in frame_palm at match time
    ContactFace face;         // frame_palm
};

struct GraspPose {
    std::string object;
    RigidTransform palm_pose;  // frame_palm expressed in frame_obj
    std::map<std::string, JointCombination> joint_angles;
    std::vector<std::string> fingers_used;  // priority order
    std::vector<SurfacePoint> contacts;     // frame_obj, points of cloud_full
    std::vector<std::size_t> contact_indices;
    std::vector<std::string> contact_fingers;
    double q1 = 0;
    double gws_volume = 0;
    Provenance provenance;
    std::vector<FingerContact> assignment;  // anchor first
    SurfacePoint anchor_object;             // frame_obj
    SurfacePoint anchor_contact;            // sampled point on the anchor face, frame_palm

    RigidTransform obj_to_palm() const { return palm_pose.inverse(); }
};

struct PalmPoseCandidate {
    RigidTransform obj_to_palm;
    std::size_t anchor_cloud = 0;  // index into the workspace list
    std::size_t anchor_ws_index = 0;
    std::size_t anchor_part_index = 0;
    SurfacePoint anchor_object;   // frame_obj
    SurfacePoint anchor_contact;  // frame_palm
    int inner = 0;
};

struct TraceEntry {
    Provenance where;
    Outcome outcome;
};

struct SynthesisResult {
    std::vector<GraspPose> poses;
    RejectionCounters counters;
    std::size_t duplicates = 0;
    std::size_t truncated = 0;
    std::vector<std::vector<std::string>> rounds;  // active fingers per finger-iteration round
    std::vector<TraceEntry> trace;
};

/// Points of `cloud` outside the exclusion band of p_obj: the band
/// is |x - x_con| <= w_tip |n_x| / sqrt(n_x^2 + n_z^2) with normals agreeing
/// with p_obj's. Nothing is removed when n_x = n_z = 0.
inline std::vector<bool> neighbor_keep_mask(const std::vector<SurfacePoint>& cloud, const SurfacePoint& p_obj,
                                            double w_tip) {
    std::vector<bool> keep(cloud.size(), true);
    const Vec3& n = p_obj.normal;
    const double denom = std::sqrt(n.x() * n.x() + n.z() * n.z());
    if (denom == 0) return keep;
    const double half = w_tip * std::abs(n.x()) / denom;
    const double x_con = p_obj.position.x();
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double x = cloud[i].position.x();
        if (x >= x_con - half && x <= x_con + half && cloud[i].normal.dot(n) > 0) keep[i] = false;
    }
    return keep;
}

inline SurfaceCloud filter_neighbor_points(const SurfaceCloud& cloud, const SurfacePoint& p_obj, double w_tip) {
    if (!(w_tip > 0)) throw Error(ErrorKind::InvalidArgument, "w_tip must be positive");
    const auto keep = neighbor_keep_mask(cloud.points(), p_obj, w_tip);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i]) idx.push_back(i);
    }
    return cloud.subset(idx);
}

/// Penetration test along one skeleton (frame_obj): consecutive
/// samples whose signed offsets from their nearest object points change sign.
inline bool skeleton_penetrates(const std::vector<Vec3>& skeleton_obj, const SurfaceCloud& cloud_full,
                                const NeighborIndex& index) {
    if (skeleton_obj.size() < 2) return false;
    std::size_t prev = index.nearest(skeleton_obj[0]).index;
    for (std::size_t k = 0; k + 1 < skeleton_obj.size(); ++k) {
        const std::size_t next = index.nearest(skeleton_obj[k + 1]).index;
        const Vec3& nor_n = cloud_full[prev].normal;
        const double a = (skeleton_obj[k] - cloud_full[prev].position).dot(nor_n);
        const double b = (skeleton_obj[k + 1] - cloud_full[next].position).dot(nor_n);
        if (a * b < 0) return true;
        prev = next;
    }
    return false;
}

/// Read-only state shared by every candidate evaluation.
class FsgContext {
public:
    FsgContext(const HandModel& hand, const std::vector<WorkspaceCloud>& ws, const ObjectAsset& asset,
               const FsgConfig& cfg)
        : hand_(hand), ws_(ws), asset_(asset), cfg_(cfg), full_index_(positions(asset.cloud_full)) {
        cfg.validate();
        if (ws.size() < 2) throw Error(ErrorKind::InvalidArgument, "synthesis needs at least two workspace clouds");
        if (asset.cloud_part.empty()) throw Error(ErrorKind::EmptyCloud, "object has an empty graspable part");
        for (const auto& c : ws) {
            if (c.points.empty()) throw Error(ErrorKind::EmptyWorkspace, "workspace of " + c.finger + " is empty");
            std::vector<Vec3> p;
            for (const auto& w : c.points) p.push_back(w.position);
            Vec3 lo = p.front(), hi = p.front();
            for (const auto& q : p) {
                lo = lo.cwiseMin(q);
                hi = hi.cwiseMax(q);
            }
            bounds_.push_back({lo.array() - cfg.pos_tolerance, hi.array() + cfg.pos_tolerance});
            ws_index_.emplace_back(std::move(p));
            mean_.push_back(c.mean_position());
            tip_width_.push_back(hand.finger(c.finger).tip_width);
        }
        centroid_ = asset.mesh.empty() ? asset.cloud_full.centroid() : asset.mesh.centroid();
        char_len_ = asset.characteristic_length > 0 ? asset.characteristic_length : 1.0;
    }

    const FsgConfig& config() const { return cfg_; }
    const std::vector<WorkspaceCloud>& clouds() const { return ws_; }

    /// Workspace indices sorted by priority (most important first).
    std::vector<std::size_t> by_priority() const {
        std::vector<std::size_t> order(ws_.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return ws_[a].priority < ws_[b].priority; });
        return order;
    }

    /// Fewest-point cloud among `active`, ties to the higher priority.
    std::size_t anchor_cloud(const std::vector<std::size_t>& active) const {
        std::size_t best = active.front();
        for (auto i : active) {
            const auto n = ws_[i].points.size(), nb = ws_[best].points.size();
            if (n < nb || (n == nb && ws_[i].priority < ws_[best].priority)) best = i;
        }
        return best;
    }

    /// Palm candidates of one outer iteration plus the outcome of each
    /// candidate dropped by the palm filters (in inner order).
    std::vector<PalmPoseCandidate> palm_candidates(const std::vector<std::size_t>& active, int round, int outer,
                                                   std::vector<std::pair<int, Outcome>>* dropped = nullptr) const {
        Rng rng({cfg_.seed, static_cast<std::uint64_t>(round), static_cast<std::uint64_t>(outer)});
        const std::size_t a = anchor_cloud(active);
        const auto& cloud = ws_[a];
        const std::size_t part_i = rng.below(asset_.cloud_part.size());
        const std::size_t ws_i = rng.below(cloud.points.size());
        const auto& o = asset_.cloud_part[part_i];
        const auto& w = cloud.points[ws_i];
        const SurfacePoint s{w.face.sample(rng), w.normal};
        const double phase = rng.uniform(0.0, 2.0 * M_PI);
        const Mat3 r0 = rotation_between(o.normal, -w.normal);

        std::vector<PalmPoseCandidate> out;
        for (int k = 0; k < cfg_.inner_rotations; ++k) {
            const double phi = phase + 2.0 * M_PI * k / cfg_.inner_rotations;
            const Mat3 r = Eigen::AngleAxisd(phi, -w.normal).toRotationMatrix() * r0;
            PalmPoseCandidate c;
            c.obj_to_palm = RigidTransform::from(r, s.position - r * o.position);
            c.anchor_cloud = a;
            c.anchor_ws_index = ws_i;
            c.anchor_part_index = part_i;
            c.anchor_object = o;
            c.anchor_contact = s;
            c.inner = k;
            const auto verdict = palm_filter(c.obj_to_palm);
            if (verdict == Outcome::accepted) {
                out.push_back(c);
            } else if (dropped) {
                dropped->push_back({k, verdict});
            }
        }
        return out;
    }

    Outcome palm_filter(const RigidTransform& obj_to_palm) const {
        std::size_t inside = 0;
        for (const auto& p : asset_.cloud_full) {
            if (hand_.palm_box.contains(obj_to_palm.apply(p.position))) {
                if (++inside > static_cast<std::size_t>(std::max(0, cfg_.palm_points_max))) {
                    return Outcome::palm_collision;
                }
            }
        }
        if (asset_.on_table) {
            const auto palm_to_obj = obj_to_palm.inverse();
            for (const auto& corner : hand_.palm_box.corners()) {
                if (palm_to_obj.apply(corner).y() < cfg_.table_clearance) return Outcome::table_collision;
            }
        }
        return Outcome::accepted;
    }

    struct ContactSearch {
        Outcome outcome = Outcome::no_contact;
        std::vector<FingerContact> assignment;  // anchor first, then priority order
    };

    /// Pair search for every active finger after the anchor, neighbour
    /// filtering, crossing check and face reconstruction with final contacts.
    ContactSearch find_contacts(const PalmPoseCandidate& cand, const std::vector<std::size_t>& active) const {
        ContactSearch result;
        const auto& part = asset_.cloud_part;
        std::vector<SurfacePoint> moved;
        moved.reserve(part.size());
        for (const auto& p : part) moved.push_back(p.transformed(cand.obj_to_palm));
        std::vector<bool> remaining(moved.size(), true);
        auto apply_band = [&](const SurfacePoint& p_obj, double w_tip) {
            const auto keep = neighbor_keep_mask(moved, p_obj, w_tip);
            for (std::size_t i = 0; i < keep.size(); ++i) remaining[i] = remaining[i] && keep[i];
        };

        const auto& anchor_ws = ws_[cand.anchor_cloud];
        FingerContact first;
        first.finger = anchor_ws.finger;
        first.object_index = asset_.part_indices[cand.anchor_part_index];
        first.ws_index = cand.anchor_ws_index;
        first.group = anchor_ws.group;
        first.palm_point = moved[cand.anchor_part_index];
        first.face = anchor_ws.points[cand.anchor_ws_index].face;
        result.assignment.push_back(first);
        apply_band(first.palm_point, tip_width_[cand.anchor_cloud]);

        const double tol2 = cfg_.pos_tolerance * cfg_.pos_tolerance;
        std::vector<std::size_t> matched{cand.anchor_cloud};
        for (auto ci : active) {
            if (ci == cand.anchor_cloud) continue;
            const auto& cloud = ws_[ci];
            const auto& box = bounds_[ci];
            double best_d2 = std::numeric_limits<double>::infinity();
            std::size_t best_part = 0, best_ws = 0;
            bool found = false;
            for (std::size_t i = 0; i < moved.size(); ++i) {
                if (!remaining[i]) continue;
                const Vec3& q = moved[i].position;
                if ((q.array() < box.first).any() || (q.array() > box.second).any()) continue;
                ws_index_[ci].for_each_within(q, cfg_.pos_tolerance, [&](std::size_t j, double d2) {
                    if (d2 > tol2 || cloud.points[j].normal.dot(moved[i].normal) > -cfg_.nor_tolerance) return;
                    if (d2 < best_d2 || (d2 == best_d2 && (i < best_part || (i == best_part && j < best_ws)))) {
                        best_d2 = d2;
                        best_part = i;
                        best_ws = j;
                        found = true;
                    }
                });
            }
            if (!found) {
                result.outcome = Outcome::no_contact;
                return result;
            }
            FingerContact fc;
            fc.finger = cloud.finger;
            fc.object_index = asset_.part_indices[best_part];
            fc.ws_index = best_ws;
            fc.group = cloud.group;
            fc.palm_point = moved[best_part];
            fc.face = cloud.points[best_ws].face;
            result.assignment.push_back(fc);
            matched.push_back(ci);
            apply_band(fc.palm_point, tip_width_[ci]);
        }

        // crossing check: within a group, contact order must follow cloud order
        const int ax = cfg_.ordering_axis;
        for (std::size_t a = 0; a < matched.size(); ++a) {
            for (std::size_t b = 0; b < matched.size(); ++b) {
                if (a == b || ws_[matched[a]].group != ws_[matched[b]].group) continue;
                if (mean_[matched[a]][ax] < mean_[matched[b]][ax] - 1e-9 &&
                    result.assignment[a].palm_point.position[ax] > result.assignment[b].palm_point.position[ax]) {
                    result.outcome = Outcome::ordering;
                    return result;
                }
            }
        }
        result.outcome = Outcome::accepted;
        return result;
    }

    /// cloud_full indices lying in `face` (frame_palm) within pos_tolerance of its plane, facing it.
    std::vector<std::size_t> face_contacts(const ContactFace& face, const RigidTransform& obj_to_palm) const {
        const auto palm_to_obj = obj_to_palm.inverse();
        const double reach =
            (face.kind == FaceKind::circle ? face.radius : (face.edge_u + face.edge_v).norm()) + cfg_.pos_tolerance;
        std::vector<std::size_t> out;
        full_index_.for_each_within(palm_to_obj.apply(face.center.position), reach, [&](std::size_t i, double) {
            const auto p = asset_.cloud_full[i].transformed(obj_to_palm);
            if (p.normal.dot(face.center.normal) < 0 && face.contains(p.position, cfg_.pos_tolerance)) out.push_back(i);
        });
        std::sort(out.begin(), out.end());
        return out;
    }

    bool face_hits_table(const ContactFace& face, const RigidTransform& obj_to_palm) const {
        if (!asset_.on_table) return false;
        const auto palm_to_obj = obj_to_palm.inverse();
        for (const auto& v : face.outline()) {
            if (palm_to_obj.apply(v).y() < cfg_.table_clearance) return true;
        }
        return false;
    }

    bool penetrates(const GraspPose& pose) const {
        const auto palm_to_obj = pose.palm_pose;
        for (const auto& fc : pose.assignment) {
            const auto& cloud = cloud_named(fc.finger);
            const auto& sk = cloud.skeletons.at(cloud.points[fc.ws_index].combo_index);
            std::vector<Vec3> obj;
            obj.reserve(sk.size());
            for (const auto& p : sk) obj.push_back(palm_to_obj.apply(p));
            if (skeleton_penetrates(obj, asset_.cloud_full, full_index_)) return true;
        }
        return false;
    }

    const WorkspaceCloud& cloud_named(const std::string& finger) const {
        for (const auto& c : ws_) {
            if (c.finger == finger) return c;
        }
        throw Error(ErrorKind::NotFound, "no workspace for finger " + finger);
    }

    /// Full evaluation of one palm candidate that passed the palm filters.
    Outcome evaluate(const PalmPoseCandidate& cand, const std::vector<std::size_t>& active, const Provenance& where,
                     std::optional<GraspPose>& pose_out) const {
        auto search = find_contacts(cand, active);
        if (search.outcome != Outcome::accepted) return search.outcome;
        for (const auto& fc : search.assignment) {
            if (face_hits_table(fc.face, cand.obj_to_palm)) return Outcome::table_collision;
        }
        GraspPose pose;
        pose.object = asset_.name;
        pose.palm_pose = cand.obj_to_palm.inverse();
        pose.provenance = where;
        pose.anchor_object = cand.anchor_object;
        pose.anchor_contact = cand.anchor_contact;
        for (const auto& c : ws_) pose.joint_angles[c.finger] = JointCombination{std::vector<double>(c.combos.empty() ? 0 : c.combos.front().angles.size(), 0.0)};
        std::vector<std::pair<std::size_t, std::string>> tagged;
        for (const auto& fc : search.assignment) {
            const auto idx = face_contacts(fc.face, cand.obj_to_palm);
            if (idx.empty()) return Outcome::no_contact;
            for (auto i : idx) tagged.push_back({i, fc.finger});
            const auto& cloud = cloud_named(fc.finger);
            pose.joint_angles[fc.finger] = cloud.points[fc.ws_index].joint_angles;
        }
        std::sort(tagged.begin(), tagged.end());
        tagged.erase(std::unique(tagged.begin(), tagged.end(),
                                 [](const auto& a, const auto& b) { return a.first == b.first; }),
                     tagged.end());
        for (const auto& [i, f] : tagged) {
            pose.contacts.push_back(asset_.cloud_full[i]);
            pose.contact_indices.push_back(i);
            pose.contact_fingers.push_back(f);
        }
        // priority order for fingers_used
        std::vector<const FingerContact*> by_prio;
        for (const auto& fc : search.assignment) by_prio.push_back(&fc);
        std::stable_sort(by_prio.begin(), by_prio.end(), [&](const FingerContact* a, const FingerContact* b) {
            return cloud_named(a->finger).priority < cloud_named(b->finger).priority;
        });
        for (const auto* fc : by_prio) pose.fingers_used.push_back(fc->finger);
        pose.assignment = std::move(search.assignment);

        const auto report = evaluate_contacts(pose.contacts, centroid_, char_len_, cfg_.quality);
        if (!report.force_closure || !(report.q1 > cfg_.q1_min)) return Outcome::q1;
        pose.q1 = report.q1;
        pose.gws_volume = report.gws_volume;
        if (cfg_.link_penetration && penetrates(pose)) return Outcome::penetration;
        pose_out = std::move(pose);
        return Outcome::accepted;
    }

private:
    static std::vector<Vec3> positions(const SurfaceCloud& c) {
        std::vector<Vec3> out;
        out.reserve(c.size());
        for (const auto& p : c) out.push_back(p.position);
        if (out.empty()) throw Error(ErrorKind::EmptyCloud, "object cloud is empty");
        return out;
    }

    const HandModel& hand_;
    const std::vector<WorkspaceCloud>& ws_;
    const ObjectAsset& asset_;
    FsgConfig cfg_;
    NeighborIndex full_index_;
    std::vector<NeighborIndex> ws_index_;
    std::vector<std::pair<Eigen::Array3d, Eigen::Array3d>> bounds_;
    std::vector<Vec3> mean_;
    std::vector<double> tip_width_;
    Vec3 centroid_ = Vec3::Zero();
    double char_len_ = 1.0;
};

/// Two poses are duplicates when their palms are within the translation and
/// rotation thresholds and they use the same fingers.
inline bool is_duplicate(const GraspPose& a, const GraspPose& b, const FsgConfig& cfg) {
    return a.fingers_used == b.fingers_used &&
           (a.palm_pose.translation - b.palm_pose.translation).norm() < cfg.dedup_translation &&
           rotation_angle_between(a.palm_pose.rotation, b.palm_pose.rotation) < deg2rad(cfg.dedup_rotation_deg);
}

/// Sorted by q1 descending (ties by provenance), duplicates removed keeping the better pose.
inline std::vector<GraspPose> rank_and_deduplicate(std::vector<GraspPose> poses, const FsgConfig& cfg,
                                                   std::size_t* removed = nullptr) {
    std::stable_sort(poses.begin(), poses.end(), [](const GraspPose& a, const GraspPose& b) {
        if (a.q1 != b.q1) return a.q1 > b.q1;
        const auto& p = a.provenance;
        const auto& q = b.provenance;
        return std::tie(p.round, p.outer, p.inner) < std::tie(q.round, q.outer, q.inner);
    });
    std::vector<GraspPose> kept;
    for (auto& p : poses) {
        bool dup = false;
        for (const auto& k : kept) {
            if (is_duplicate(p, k, cfg)) {
                dup = true;
                break;
            }
        }
        if (!dup) kept.push_back(std::move(p));
    }
    if (removed) *removed = poses.size() - kept.size();
    return kept;
}

/// Candidates of one outer iteration for the given active fingers.
inline std::vector<PalmPoseCandidate> generate_palm_candidates(const FsgContext& ctx,
                                                               const std::vector<std::size_t>& active, int outer,
                                                               int round = 0) {
    return ctx.palm_candidates(active, round, outer);
}

/// Full synthesis loop with finger iteration. Throws NoGraspFound when no
/// valid pose exists at any finger count.
inline SynthesisResult synthesize_detailed(const HandModel& hand, const std::vector<WorkspaceCloud>& ws,
                                           const ObjectAsset& asset, const FsgConfig& cfg) {
    const FsgContext ctx(hand, ws, asset, cfg);
    const unsigned threads = resolve_thread_count(cfg.threads);
    SynthesisResult result;
    std::vector<GraspPose> pool;
    auto active = ctx.by_priority();
    const auto target = static_cast<std::size_t>(cfg.pose_target);

    // The pose target is checked after every outer iteration; inner candidates
    // run in parallel, so where the run stops never depends on thread count.
    bool done = false;
    for (int round = 0; !done; ++round) {
        std::vector<std::string> names;
        for (auto i : active) names.push_back(ws[i].finger);
        result.rounds.push_back(names);
        for (int outer = 0; outer < cfg.outer_iterations && !done; ++outer) {
            std::vector<std::pair<int, Outcome>> dropped;
            const auto cands = ctx.palm_candidates(active, round, outer, &dropped);
            std::vector<Outcome> outcomes(cands.size());
            std::vector<std::optional<GraspPose>> found(cands.size());
            parallel_for(cands.size(), threads, [&](std::size_t k) {
                const Provenance where{cfg.seed, round, outer, cands[k].inner};
                outcomes[k] = ctx.evaluate(cands[k], active, where, found[k]);
            });
            std::vector<TraceEntry> entries;
            for (const auto& [inner, o] : dropped) entries.push_back({{cfg.seed, round, outer, inner}, o});
            for (std::size_t k = 0; k < cands.size(); ++k) {
                entries.push_back({{cfg.seed, round, outer, cands[k].inner}, outcomes[k]});
                if (found[k]) pool.push_back(std::move(*found[k]));
            }
            std::sort(entries.begin(), entries.end(),
                      [](const TraceEntry& a, const TraceEntry& b) { return a.where.inner < b.where.inner; });
            for (const auto& t : entries) {
                result.counters.add(t.outcome);
                if (cfg.trace) result.trace.push_back(t);
            }
            if (rank_and_deduplicate(pool, cfg).size() >= target) done = true;
        }
        if (done || !cfg.finger_iteration || active.size() <= 2) break;
        active.pop_back();  // least important active finger
    }

    result.poses = rank_and_deduplicate(std::move(pool), cfg, &result.duplicates);
    if (result.poses.empty()) {
        throw Error(ErrorKind::NoGraspFound, "no valid grasp for " + asset.name + " after " +
                                                 std::to_string(result.rounds.size()) + " finger round(s)");
    }
    if (result.poses.size() > target) {
        result.truncated = result.poses.size() - target;
        result.poses.resize(target);
    }
    return result;
}

inline std::vector<GraspPose> synthesize(const HandModel& hand, const std::vector<WorkspaceCloud>& ws,
                                         const ObjectAsset& asset, const FsgConfig& cfg) {
    return synthesize_detailed(hand, ws, asset, cfg).poses;
}

inline bool check_link_penetration(const GraspPose& pose, const FsgContext& ctx) { return ctx.penetrates(pose); }

inline QualityReport evaluate_pose(const GraspPose& pose, const ObjectAsset& asset, const QualityParams& params = {}) {
    if (pose.contacts.empty()) throw Error(ErrorKind::InvalidArgument, "pose has no contacts");
    const Vec3 centroid = asset.mesh.empty() ? asset.cloud_full.centroid() : asset.mesh.centroid();
    return evaluate_contacts(pose.contacts, centroid, asset.characteristic_length, params);
}

}  // namespace fsgkit
