#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fsgkit/errors.hpp"
#include "fsgkit/geometry/surface.hpp"

namespace fsgkit {

/// Binary little-endian PLY with float32 x, y, z, nx, ny, nz per vertex.
inline void write_ply(std::ostream& out, const std::vector<SurfacePoint>& points) {
    out << "ply\nformat binary_little_endian 1.0\n"
        << "element vertex " << points.size() << "\n"
        << "property float x\nproperty float y\nproperty float z\n"
        << "property float nx\nproperty float ny\nproperty float nz\n"
        << "end_header\n";
    for (const auto& p : points) {
        const float row[6] = {static_cast<float>(p.position.x()), static_cast<float>(p.position.y()),
                              static_cast<float>(p.position.z()), static_cast<float>(p.normal.x()),
                              static_cast<float>(p.normal.y()), static_cast<float>(p.normal.z())};
        out.write(reinterpret_cast<const char*>(row), sizeof(row));
    }
    if (!out) throw Error(ErrorKind::IoError, "failed writing PLY data");
}

inline void write_ply(std::ostream& out, const SurfaceCloud& cloud) { write_ply(out, cloud.points()); }

/// Reads files produced by write_ply. Normals are returned as stored.
inline std::vector<SurfacePoint> read_ply(std::istream& in) {
    std::string line;
    std::size_t count = 0;
    int properties = 0;
    bool binary = false;
    if (!std::getline(in, line) || line != "ply") throw Error(ErrorKind::IoError, "not a PLY stream");
    while (std::getline(in, line)) {
        if (line == "end_header") break;
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word == "format") {
            std::string fmt;
            ls >> fmt;
            binary = fmt == "binary_little_endian";
        } else if (word == "element") {
            std::string name;
            ls >> name >> count;
        } else if (word == "property") {
            std::string type;
            ls >> type;
            if (type != "float") throw Error(ErrorKind::IoError, "unsupported PLY property type " + type);
            ++properties;
        }
    }
    if (!binary || properties != 6) throw Error(ErrorKind::IoError, "expected binary float32 x,y,z,nx,ny,nz");
    std::vector<SurfacePoint> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        float row[6];
        if (!in.read(reinterpret_cast<char*>(row), sizeof(row))) throw Error(ErrorKind::IoError, "truncated PLY body");
        out.push_back({Vec3(row[0], row[1], row[2]), Vec3(row[3], row[4], row[5])});
    }
    return out;
}

}  // namespace fsgkit
