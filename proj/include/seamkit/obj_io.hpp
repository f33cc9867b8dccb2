#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "mesh.hpp"

namespace seamkit {

// Wavefront OBJ subset: v / vt / f records, 1-based and negative (relative)
// indices, polygons fan-triangulated. Everything else (vn, g, usemtl, ...) is
// ignored. Files mixing textured and untextured faces are rejected.

namespace detail {

inline int resolve_index(long raw, size_t count, const std::string& where, int line_no) {
    long idx = raw > 0 ? raw - 1 : long(count) + raw;
    if (raw == 0 || idx < 0 || idx >= long(count))
        throw ValidationError(where + ":" + std::to_string(line_no) + ": index " +
                              std::to_string(raw) + " out of range");
    return int(idx);
}

inline long parse_long(const std::string& tok, const std::string& where, int line_no) {
    size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(tok, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != tok.size())
        throw ValidationError(where + ":" + std::to_string(line_no) + ": malformed index '" +
                              tok + "'");
    return v;
}

inline std::string format_g9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

} // namespace detail

inline TriMesh load_obj_stream(std::istream& in, const std::string& where) {
    TriMesh mesh;
    std::vector<Vec2> texcoords;
    bool any_textured = false, any_untextured = false;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;

        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z))
                throw ValidationError(where + ":" + std::to_string(line_no) +
                                      ": malformed vertex");
            mesh.vertices.emplace_back(x, y, z);
        } else if (tag == "vt") {
            double u, v;
            if (!(ls >> u >> v))
                throw ValidationError(where + ":" + std::to_string(line_no) +
                                      ": malformed texture coordinate");
            texcoords.emplace_back(u, v);
        } else if (tag == "f") {
            std::vector<int> vi, ti;
            std::string corner;
            while (ls >> corner) {
                size_t s1 = corner.find('/');
                std::string vs = corner.substr(0, s1);
                vi.push_back(detail::resolve_index(detail::parse_long(vs, where, line_no),
                                                   mesh.vertices.size(), where, line_no));
                int tex = -1;
                if (s1 != std::string::npos) {
                    size_t s2 = corner.find('/', s1 + 1);
                    std::string ts = corner.substr(s1 + 1, s2 == std::string::npos
                                                               ? std::string::npos
                                                               : s2 - s1 - 1);
                    if (!ts.empty())
                        tex = detail::resolve_index(detail::parse_long(ts, where, line_no),
                                                    texcoords.size(), where, line_no);
                }
                ti.push_back(tex);
            }
            if (vi.size() < 3)
                throw ValidationError(where + ":" + std::to_string(line_no) +
                                      ": face with fewer than 3 corners");
            bool textured = ti[0] >= 0;
            for (int t : ti)
                if ((t >= 0) != textured)
                    throw ValidationError(where + ":" + std::to_string(line_no) +
                                          ": face mixes textured and untextured corners");
            (textured ? any_textured : any_untextured) = true;

            for (size_t i = 1; i + 1 < vi.size(); ++i) {
                int a = vi[0], b = vi[i], c = vi[i + 1];
                if (a == b || b == c || a == c)
                    throw ValidationError(where + ":" + std::to_string(line_no) +
                                          ": degenerate face corner");
                mesh.faces.push_back({a, b, c});
                if (textured) {
                    mesh.uv_corners.push_back(texcoords[ti[0]]);
                    mesh.uv_corners.push_back(texcoords[ti[i]]);
                    mesh.uv_corners.push_back(texcoords[ti[i + 1]]);
                }
            }
        }
        // other directives ignored
    }

    if (any_textured && any_untextured)
        throw ValidationError(where + ": file mixes textured and untextured faces");
    if (mesh.vertices.empty() || mesh.faces.empty())
        throw ValidationError(where + ": empty mesh (no faces)");
    mesh.validate();
    return mesh;
}

inline TriMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "' for reading");
    return load_obj_stream(in, path);
}

inline TriMesh load_obj_string(const std::string& text, const std::string& where = "<string>") {
    std::istringstream in(text);
    return load_obj_stream(in, where);
}

inline std::string save_obj_string(const TriMesh& mesh) {
    mesh.validate();
    std::string out;
    out.reserve(mesh.vertices.size() * 32 + mesh.faces.size() * 24);
    for (const Vec3& v : mesh.vertices) {
        out += "v ";
        out += detail::format_g9(v.x);
        out += ' ';
        out += detail::format_g9(v.y);
        out += ' ';
        out += detail::format_g9(v.z);
        out += '\n';
    }

    if (!mesh.has_uvs()) {
        for (const auto& f : mesh.faces) {
            out += "f " + std::to_string(f[0] + 1) + ' ' + std::to_string(f[1] + 1) + ' ' +
                   std::to_string(f[2] + 1) + '\n';
        }
        return out;
    }

    // Deduplicate bit-identical UV pairs in first-encounter order so output is
    // deterministic and round-trips exactly.
    struct PairHash {
        size_t operator()(const std::pair<double, double>& p) const {
            auto h1 = std::hash<double>()(p.first), h2 = std::hash<double>()(p.second);
            return h1 ^ (h2 * 0x9e3779b97f4a7c15ull + (h1 << 6));
        }
    };
    std::unordered_map<std::pair<double, double>, int, PairHash> uv_id;
    std::vector<int> corner_uv(mesh.uv_corners.size());
    std::vector<Vec2> unique_uvs;
    for (size_t i = 0; i < mesh.uv_corners.size(); ++i) {
        const Vec2& t = mesh.uv_corners[i];
        auto [it, inserted] = uv_id.try_emplace({t.x, t.y}, int(unique_uvs.size()));
        if (inserted) unique_uvs.push_back(t);
        corner_uv[i] = it->second;
    }
    for (const Vec2& t : unique_uvs) {
        out += "vt ";
        out += detail::format_g9(t.x);
        out += ' ';
        out += detail::format_g9(t.y);
        out += '\n';
    }
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        out += 'f';
        for (int c = 0; c < 3; ++c) {
            out += ' ';
            out += std::to_string(mesh.faces[f][c] + 1);
            out += '/';
            out += std::to_string(corner_uv[3 * f + c] + 1);
        }
        out += '\n';
    }
    return out;
}

inline void save_obj(const TriMesh& mesh, const std::string& path) {
    std::string text = save_obj_string(mesh);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    out.write(text.data(), std::streamsize(text.size()));
    if (!out) throw ValidationError("failed writing '" + path + "'");
}

} // namespace seamkit
