#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "fsgkit/autows/autows.hpp"

namespace fsgkit {

namespace detail {

inline constexpr char kWorkspaceMagic[8] = {'F', 'S', 'G', 'W', 'S', '0', '1', '\0'};

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::istream& in) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw Error(ErrorKind::IoError, "truncated workspace file");
    return v;
}

inline void put_vec3(std::ostream& out, const Vec3& v) {
    for (int k = 0; k < 3; ++k) put<float>(out, static_cast<float>(v[k]));
}

inline Vec3 take_vec3(std::istream& in) {
    Vec3 v;
    for (int k = 0; k < 3; ++k) v[k] = take<float>(in);
    return v;
}

}  // namespace detail

/// Binary layout (little endian): magic, finger name, priority, opposition
/// group, independent joint count J, point count; per point float32
/// position[3], normal[3], joints[J], face kind byte, face params
/// (radius | edge_u[3] edge_v[3]), combo and face index; then the skeleton table
/// keyed by combo index.
inline void write_workspace(std::ostream& out, const WorkspaceCloud& ws) {
    using detail::put;
    out.write(detail::kWorkspaceMagic, sizeof(detail::kWorkspaceMagic));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(ws.finger.size()));
    out.write(ws.finger.data(), static_cast<std::streamsize>(ws.finger.size()));
    put<std::int32_t>(out, ws.priority);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(ws.group));
    const std::uint32_t joints = ws.combos.empty() ? 0 : static_cast<std::uint32_t>(ws.combos.front().angles.size());
    put<std::uint32_t>(out, joints);
    put<std::uint64_t>(out, ws.points.size());
    for (const auto& p : ws.points) {
        detail::put_vec3(out, p.position);
        detail::put_vec3(out, p.normal);
        for (double a : p.joint_angles.angles) put<float>(out, static_cast<float>(a));
        put<std::uint8_t>(out, static_cast<std::uint8_t>(p.face.kind));
        if (p.face.kind == FaceKind::circle) {
            put<float>(out, static_cast<float>(p.face.radius));
        } else {
            detail::put_vec3(out, p.face.edge_u);
            detail::put_vec3(out, p.face.edge_v);
        }
        put<std::uint32_t>(out, p.combo_index);
        put<std::uint32_t>(out, p.face_index);
    }
    put<std::uint32_t>(out, static_cast<std::uint32_t>(ws.skeletons.size()));
    for (const auto& sk : ws.skeletons) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(sk.size()));
        for (const auto& p : sk) detail::put_vec3(out, p);
    }
    if (!out) throw Error(ErrorKind::IoError, "failed writing workspace data");
}

/// Inverse of write_workspace (values come back at float32 precision).
inline WorkspaceCloud read_workspace(std::istream& in) {
    using detail::take;
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, detail::kWorkspaceMagic, 8) != 0) {
        throw Error(ErrorKind::IoError, "not a workspace file");
    }
    WorkspaceCloud ws;
    ws.finger.resize(take<std::uint32_t>(in));
    in.read(ws.finger.data(), static_cast<std::streamsize>(ws.finger.size()));
    ws.priority = take<std::int32_t>(in);
    ws.group = static_cast<OppositionGroup>(take<std::uint8_t>(in));
    const auto joints = take<std::uint32_t>(in);
    const auto count = take<std::uint64_t>(in);
    for (std::uint64_t i = 0; i < count; ++i) {
        WorkspacePoint p;
        p.position = detail::take_vec3(in);
        p.normal = detail::take_vec3(in);
        for (std::uint32_t j = 0; j < joints; ++j) p.joint_angles.angles.push_back(take<float>(in));
        const auto kind = take<std::uint8_t>(in);
        if (kind == static_cast<std::uint8_t>(FaceKind::circle)) {
            p.face = ContactFace::circle({p.position, p.normal}, take<float>(in));
        } else {
            const Vec3 u = detail::take_vec3(in);
            const Vec3 v = detail::take_vec3(in);
            p.face = ContactFace::rectangle({p.position, p.normal}, u, v);
        }
        p.combo_index = take<std::uint32_t>(in);
        p.face_index = take<std::uint32_t>(in);
        ws.points.push_back(std::move(p));
    }
    ws.skeletons.resize(take<std::uint32_t>(in));
    for (auto& sk : ws.skeletons) {
        sk.resize(take<std::uint32_t>(in));
        for (auto& p : sk) p = detail::take_vec3(in);
    }
    ws.combos.resize(ws.skeletons.size());
    for (const auto& p : ws.points) {
        if (p.combo_index < ws.combos.size()) ws.combos[p.combo_index] = p.joint_angles;
    }
    Vec3 s = Vec3::Zero();
    for (const auto& p : ws.points) s += p.normal;
    ws.nor_ave = s.norm() > 0 ? Vec3(s.normalized()) : s;
    return ws;
}

/// Debug dump of the same content as write_workspace (angles in degrees).
inline nlohmann::ordered_json workspace_to_json(const WorkspaceCloud& ws) {
    using nlohmann::ordered_json;
    auto vec = [](const Vec3& v) { return ordered_json::array({v.x(), v.y(), v.z()}); };
    ordered_json j;
    j["finger"] = ws.finger;
    j["priority"] = ws.priority;
    j["opposition_group"] = ws.group == OppositionGroup::A ? "A" : "B";
    j["nor_ave"] = vec(ws.nor_ave);
    j["points"] = ordered_json::array();
    for (const auto& p : ws.points) {
        ordered_json e;
        e["position"] = vec(p.position);
        e["normal"] = vec(p.normal);
        ordered_json deg = ordered_json::array();
        for (double a : p.joint_angles.angles) deg.push_back(rad2deg(a));
        e["joints_deg"] = deg;
        if (p.face.kind == FaceKind::circle) {
            e["face"] = {{"kind", "circle"}, {"radius", p.face.radius}};
        } else {
            e["face"] = {{"kind", "rectangle"}, {"edge_u", vec(p.face.edge_u)}, {"edge_v", vec(p.face.edge_v)}};
        }
        e["face_index"] = p.face_index;
        e["combo_index"] = p.combo_index;
        j["points"].push_back(std::move(e));
    }
    j["skeletons"] = ordered_json::array();
    for (const auto& sk : ws.skeletons) {
        ordered_json poly = ordered_json::array();
        for (const auto& p : sk) poly.push_back(vec(p));
        j["skeletons"].push_back(std::move(poly));
    }
    return j;
}

}  // namespace fsgkit
