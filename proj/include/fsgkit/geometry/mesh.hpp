#pragma once

#include <array>
#include <cctype>
#include <limits>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "fsgkit/errors.hpp"
#include "fsgkit/geometry/transform.hpp"

namespace fsgkit {

/// Indexed triangle mesh. Zero-area triangles are dropped at construction,
/// so every stored triangle has positive area and a unit normal.
class TriangleMesh {
public:
    using Triangle = std::array<std::uint32_t, 3>;

    TriangleMesh() = default;

    /// `vertex_normals` is optional; when given it must match `vertices`.
    TriangleMesh(std::vector<Vec3> vertices, const std::vector<Triangle>& triangles,
                 std::vector<Vec3> vertex_normals = {})
        : vertices_(std::move(vertices)), vertex_normals_(std::move(vertex_normals)) {
        if (!vertex_normals_.empty() && vertex_normals_.size() != vertices_.size()) {
            throw Error(ErrorKind::InvalidMesh, "vertex normal count does not match vertex count");
        }
        for (auto& n : vertex_normals_) {
            const double len = n.norm();
            if (len <= 0) throw Error(ErrorKind::InvalidMesh, "zero-length vertex normal");
            n /= len;
        }
        for (const auto& t : triangles) {
            for (auto idx : t) {
                if (idx >= vertices_.size()) {
                    throw Error(ErrorKind::InvalidMesh, "triangle index out of range");
                }
            }
            const Vec3 c = (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]);
            const double twice_area = c.norm();
            if (!(twice_area > 1e-18)) continue;
            triangles_.push_back(t);
            normals_.push_back(c / twice_area);
            areas_.push_back(0.5 * twice_area);
        }
    }

    const std::vector<Vec3>& vertices() const noexcept { return vertices_; }
    const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
    const std::vector<Vec3>& normals() const noexcept { return normals_; }
    const std::vector<Vec3>& vertex_normals() const noexcept { return vertex_normals_; }
    const std::vector<double>& areas() const noexcept { return areas_; }
    bool empty() const noexcept { return triangles_.empty(); }

    double surface_area() const {
        double a = 0;
        for (double x : areas_) a += x;
        return a;
    }

    std::pair<Vec3, Vec3> bounds() const {
        Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
        Vec3 hi = -lo;
        for (const auto& t : triangles_) {
            for (auto idx : t) {
                lo = lo.cwiseMin(vertices_[idx]);
                hi = hi.cwiseMax(vertices_[idx]);
            }
        }
        return {lo, hi};
    }

    double bbox_diagonal() const {
        if (empty()) return 0.0;
        auto [lo, hi] = bounds();
        return (hi - lo).norm();
    }

    /// Area-weighted centroid of the surface.
    Vec3 centroid() const {
        Vec3 c = Vec3::Zero();
        double total = 0;
        for (std::size_t i = 0; i < triangles_.size(); ++i) {
            const auto& t = triangles_[i];
            c += areas_[i] * (vertices_[t[0]] + vertices_[t[1]] + vertices_[t[2]]) / 3.0;
            total += areas_[i];
        }
        return total > 0 ? Vec3(c / total) : c;
    }

    /// Surface normal at barycentric (u, v, w) of triangle `tri`.
    Vec3 normal_at(std::size_t tri, double u, double v, double w) const {
        if (vertex_normals_.empty()) return normals_[tri];
        const auto& t = triangles_[tri];
        Vec3 n = u * vertex_normals_[t[0]] + v * vertex_normals_[t[1]] + w * vertex_normals_[t[2]];
        const double len = n.norm();
        return len > 1e-12 ? Vec3(n / len) : normals_[tri];
    }

    TriangleMesh transformed(const RigidTransform& t, double scale = 1.0) const {
        std::vector<Vec3> v;
        v.reserve(vertices_.size());
        for (const auto& p : vertices_) v.push_back(t.apply(scale * p));
        std::vector<Vec3> vn;
        for (const auto& n : vertex_normals_) vn.push_back(t.rotate(n));
        return TriangleMesh(std::move(v), triangles_, std::move(vn));
    }

private:
    std::vector<Vec3> vertices_;
    std::vector<Vec3> vertex_normals_;
    std::vector<Triangle> triangles_;
    std::vector<Vec3> normals_;
    std::vector<double> areas_;
};

namespace detail {

inline int parse_obj_index(const std::string& token, std::size_t count) {
    const int raw = std::stoi(token);
    return raw < 0 ? static_cast<int>(count) + raw : raw - 1;
}

}  // namespace detail

/// Wavefront OBJ: `v`, `vn`, and polygonal `f` records (fan-triangulated).
/// Vertices referenced with distinct normals are split so normals stay per vertex.
inline TriangleMesh load_obj(std::istream& in) {
    std::vector<Vec3> positions;
    std::vector<Vec3> normals;
    std::map<std::pair<int, int>, std::uint32_t> remap;
    std::vector<Vec3> out_vertices;
    std::vector<Vec3> out_normals;
    std::vector<TriangleMesh::Triangle> triangles;
    bool any_normals = false;
    bool missing_normals = false;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        try {
            if (tag == "v") {
                Vec3 p;
                if (!(ls >> p.x() >> p.y() >> p.z())) throw std::runtime_error("bad vertex");
                positions.push_back(p);
            } else if (tag == "vn") {
                Vec3 n;
                if (!(ls >> n.x() >> n.y() >> n.z())) throw std::runtime_error("bad normal");
                normals.push_back(n);
            } else if (tag == "f") {
                std::vector<std::uint32_t> poly;
                std::string corner;
                while (ls >> corner) {
                    const auto s1 = corner.find('/');
                    const int vi = detail::parse_obj_index(corner.substr(0, s1), positions.size());
                    int ni = -1;
                    if (s1 != std::string::npos) {
                        const auto s2 = corner.find('/', s1 + 1);
                        if (s2 != std::string::npos && s2 + 1 < corner.size()) {
                            ni = detail::parse_obj_index(corner.substr(s2 + 1), normals.size());
                        }
                    }
                    if (vi < 0 || static_cast<std::size_t>(vi) >= positions.size()) {
                        throw std::runtime_error("vertex index out of range");
                    }
                    if (ni >= static_cast<int>(normals.size())) throw std::runtime_error("normal index out of range");
                    if (ni >= 0) any_normals = true; else missing_normals = true;
                    auto key = std::make_pair(vi, ni);
                    auto it = remap.find(key);
                    if (it == remap.end()) {
                        it = remap.emplace(key, static_cast<std::uint32_t>(out_vertices.size())).first;
                        out_vertices.push_back(positions[vi]);
                        out_normals.push_back(ni >= 0 ? normals[ni] : Vec3::Zero());
                    }
                    poly.push_back(it->second);
                }
                for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
                    triangles.push_back({poly[0], poly[k], poly[k + 1]});
                }
            }
        } catch (const std::exception& e) {
            throw Error(ErrorKind::InvalidMesh, "OBJ line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!any_normals || missing_normals) out_normals.clear();
    return TriangleMesh(std::move(out_vertices), triangles, std::move(out_normals));
}

/// Binary STL (80-byte header, uint32 count, 50-byte records).
inline TriangleMesh load_stl_binary(std::istream& in) {
    char header[80];
    if (!in.read(header, 80)) throw Error(ErrorKind::InvalidMesh, "STL header truncated");
    std::uint32_t count = 0;
    if (!in.read(reinterpret_cast<char*>(&count), 4)) throw Error(ErrorKind::InvalidMesh, "STL count truncated");
    std::vector<Vec3> vertices;
    std::vector<TriangleMesh::Triangle> triangles;
    std::map<std::tuple<float, float, float>, std::uint32_t> dedup;
    for (std::uint32_t i = 0; i < count; ++i) {
        float rec[12];
        std::uint16_t attr;
        if (!in.read(reinterpret_cast<char*>(rec), sizeof rec) || !in.read(reinterpret_cast<char*>(&attr), 2)) {
            throw Error(ErrorKind::InvalidMesh, "STL record " + std::to_string(i) + " truncated");
        }
        TriangleMesh::Triangle tri{};
        for (int k = 0; k < 3; ++k) {
            auto key = std::make_tuple(rec[3 + 3 * k], rec[4 + 3 * k], rec[5 + 3 * k]);
            auto it = dedup.find(key);
            if (it == dedup.end()) {
                it = dedup.emplace(key, static_cast<std::uint32_t>(vertices.size())).first;
                vertices.emplace_back(std::get<0>(key), std::get<1>(key), std::get<2>(key));
            }
            tri[k] = it->second;
        }
        triangles.push_back(tri);
    }
    return TriangleMesh(std::move(vertices), triangles);
}

/// Loads .obj or .stl (binary) by extension.
inline TriangleMesh load_mesh(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::AssetMissing, "cannot open mesh " + path.string());
    std::string ext = path.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".obj") return load_obj(in);
    if (ext == ".stl") return load_stl_binary(in);
    throw Error(ErrorKind::InvalidMesh, "unsupported mesh format " + path.string());
}

inline void write_obj(std::ostream& out, const TriangleMesh& mesh) {
    out.precision(17);
    for (const auto& v : mesh.vertices()) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const auto& t : mesh.triangles()) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

inline void write_stl_binary(std::ostream& out, const TriangleMesh& mesh) {
    char header[80] = {};
    std::strncpy(header, "fsgkit binary stl", sizeof header - 1);
    out.write(header, 80);
    const auto count = static_cast<std::uint32_t>(mesh.triangles().size());
    out.write(reinterpret_cast<const char*>(&count), 4);
    for (std::size_t i = 0; i < mesh.triangles().size(); ++i) {
        float rec[12];
        const Vec3& n = mesh.normals()[i];
        rec[0] = static_cast<float>(n.x());
        rec[1] = static_cast<float>(n.y());
        rec[2] = static_cast<float>(n.z());
        for (int k = 0; k < 3; ++k) {
            const Vec3& v = mesh.vertices()[mesh.triangles()[i][k]];
            rec[3 + 3 * k] = static_cast<float>(v.x());
            rec[4 + 3 * k] = static_cast<float>(v.y());
            rec[5 + 3 * k] = static_cast<float>(v.z());
        }
        const std::uint16_t attr = 0;
        out.write(reinterpret_cast<const char*>(rec), sizeof rec);
        out.write(reinterpret_cast<const char*>(&attr), 2);
    }
}

}  // namespace fsgkit
