#include "meshlabel/mesh.hpp"

#include "meshlabel/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

namespace meshlabel {

std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c)
{
    return 0.5 * (b - a).cross(c - a).norm();
}

std::string TopologyReport::describe() const
{
    std::ostringstream os;
    if (!indices_valid) os << "face index out of range; ";
    if (!closed) os << "open boundary edges; ";
    if (!edge_manifold) os << "non-manifold edges; ";
    if (!bad_edges.empty()) {
        os << "offending edges:";
        for (size_t i = 0; i < std::min<size_t>(bad_edges.size(), 8); ++i)
            os << " (" << bad_edges[i][0] << "," << bad_edges[i][1] << ")";
        os << "; ";
    }
    if (!vertex_manifold) {
        os << "non-manifold vertices:";
        for (size_t i = 0; i < std::min<size_t>(bad_vertices.size(), 8); ++i)
            os << " " << bad_vertices[i];
        os << "; ";
    }
    if (!connected) os << "mesh is not connected; ";
    if (!degenerate_faces.empty()) {
        os << "degenerate triangles:";
        for (size_t i = 0; i < std::min<size_t>(degenerate_faces.size(), 8); ++i)
            os << " " << degenerate_faces[i];
        os << "; ";
    }
    return os.str();
}

std::vector<std::array<int, 2>> unique_edges(std::span<const Face> faces)
{
    std::vector<std::array<int, 2>> edges;
    edges.reserve(faces.size() * 3);
    for (const auto& f : faces) {
        for (int k = 0; k < 3; ++k) {
            int a = f[k], b = f[(k + 1) % 3];
            edges.push_back({std::min(a, b), std::max(a, b)});
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

TopologyReport check_topology(std::span<const Vec3> vertices, std::span<const Face> faces)
{
    TopologyReport rep;
    const int nv = static_cast<int>(vertices.size());
    for (const auto& f : faces) {
        for (int idx : f) {
            if (idx < 0 || idx >= nv) rep.indices_valid = false;
        }
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) rep.indices_valid = false;
    }
    if (!rep.indices_valid || faces.empty()) {
        rep.indices_valid = false;
        return rep;
    }

    // Directed half-edge counts; a closed oriented manifold has every directed edge once
    // and its twin once.
    std::map<std::array<int, 2>, int> directed;
    for (const auto& f : faces) {
        for (int k = 0; k < 3; ++k) ++directed[{f[k], f[(k + 1) % 3]}];
    }
    for (const auto& [e, count] : directed) {
        auto twin = directed.find({e[1], e[0]});
        int twins = twin == directed.end() ? 0 : twin->second;
        if (count != 1 || twins != 1) {
            if (twins == 0 && count == 1) {
                rep.closed = false;
            } else {
                rep.edge_manifold = false;
            }
            std::array<int, 2> ue{std::min(e[0], e[1]), std::max(e[0], e[1])};
            if (std::find(rep.bad_edges.begin(), rep.bad_edges.end(), ue) == rep.bad_edges.end())
                rep.bad_edges.push_back(ue);
        }
    }

    // Vertex manifoldness: the faces around each vertex form a single fan.
    std::vector<std::vector<int>> vfaces(nv);
    for (int fi = 0; fi < static_cast<int>(faces.size()); ++fi)
        for (int idx : faces[fi]) vfaces[idx].push_back(fi);
    for (int v = 0; v < nv; ++v) {
        const auto& inc = vfaces[v];
        if (inc.empty()) {
            rep.connected = false;
            continue;
        }
        // walk the fan: next face shares the edge (v, next-vertex)
        std::map<int, int> next_of;  // "from" vertex -> "to" vertex around v
        for (int fi : inc) {
            const auto& f = faces[fi];
            int k = static_cast<int>(std::find(f.begin(), f.end(), v) - f.begin());
            next_of[f[(k + 1) % 3]] = f[(k + 2) % 3];
        }
        int start = next_of.begin()->first;
        int cur = start;
        size_t steps = 0;
        do {
            auto it = next_of.find(cur);
            if (it == next_of.end()) break;
            cur = it->second;
            ++steps;
        } while (cur != start && steps <= inc.size());
        if (steps != inc.size() || cur != start) {
            rep.vertex_manifold = false;
            rep.bad_vertices.push_back(v);
        }
    }

    // Connectivity over faces.
    std::vector<int> parent(nv);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& f : faces) {
        parent[find(f[1])] = find(f[0]);
        parent[find(f[2])] = find(f[0]);
    }
    int root = find(faces[0][0]);
    for (int v = 0; v < nv; ++v) {
        if (find(v) != root) rep.connected = false;
    }

    for (int fi = 0; fi < static_cast<int>(faces.size()); ++fi) {
        const auto& f = faces[fi];
        if (!(triangle_area(vertices[f[0]], vertices[f[1]], vertices[f[2]]) > kMinTriangleArea))
            rep.degenerate_faces.push_back(fi);
    }

    const auto edges = unique_edges(faces);
    rep.euler_characteristic = nv - static_cast<int>(edges.size()) + static_cast<int>(faces.size());
    return rep;
}

void require_closed_manifold(std::span<const Vec3> vertices, std::span<const Face> faces)
{
    auto rep = check_topology(vertices, faces);
    if (!rep.ok()) throw DataError("invalid mesh: " + rep.describe());
}

TriMesh loop_subdivide(const TriMesh& mesh, std::vector<LoopStencil>* stencils)
{
    const int nv = static_cast<int>(mesh.vertices.size());
    const auto edges = unique_edges(mesh.faces);
    std::map<std::array<int, 2>, int> edge_index;
    for (int i = 0; i < static_cast<int>(edges.size()); ++i) edge_index[edges[i]] = i;

    std::vector<std::vector<int>> opposite(edges.size());
    std::vector<std::vector<int>> neighbors(nv);
    for (const auto& f : mesh.faces) {
        for (int k = 0; k < 3; ++k) {
            int a = f[k], b = f[(k + 1) % 3], c = f[(k + 2) % 3];
            opposite[edge_index.at({std::min(a, b), std::max(a, b)})].push_back(c);
        }
    }
    for (const auto& e : edges) {
        neighbors[e[0]].push_back(e[1]);
        neighbors[e[1]].push_back(e[0]);
    }

    std::vector<LoopStencil> st(nv + edges.size());
    for (int v = 0; v < nv; ++v) {
        const auto& nb = neighbors[v];
        const double n = static_cast<double>(nb.size());
        const double c = 3.0 / 8.0 + 0.25 * std::cos(2.0 * std::numbers::pi / n);
        const double beta = (5.0 / 8.0 - c * c) / n;
        st[v].terms.emplace_back(v, 1.0 - n * beta);
        for (int u : nb) st[v].terms.emplace_back(u, beta);
    }
    for (size_t e = 0; e < edges.size(); ++e) {
        auto& terms = st[nv + e].terms;
        if (opposite[e].size() != 2) throw DataError("loop_subdivide requires a closed manifold mesh");
        terms.emplace_back(edges[e][0], 3.0 / 8.0);
        terms.emplace_back(edges[e][1], 3.0 / 8.0);
        terms.emplace_back(opposite[e][0], 1.0 / 8.0);
        terms.emplace_back(opposite[e][1], 1.0 / 8.0);
    }

    TriMesh out;
    out.vertices.resize(st.size());
    for (size_t i = 0; i < st.size(); ++i) {
        Vec3 p = Vec3::Zero();
        for (auto [j, w] : st[i].terms) p += w * mesh.vertices[j];
        out.vertices[i] = p;
    }
    out.faces.reserve(mesh.faces.size() * 4);
    auto mid = [&](int a, int b) { return nv + edge_index.at({std::min(a, b), std::max(a, b)}); };
    for (const auto& f : mesh.faces) {
        int a = f[0], b = f[1], c = f[2];
        int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
        out.faces.push_back({a, ab, ca});
        out.faces.push_back({b, bc, ab});
        out.faces.push_back({c, ca, bc});
        out.faces.push_back({ab, bc, ca});
    }
    if (stencils) *stencils = std::move(st);
    return out;
}

TriMesh regular_tetrahedron(double edge_length)
{
    // Alternate cube corners give edge length 2*sqrt(2).
    const double s = edge_length / (2.0 * std::sqrt(2.0));
    TriMesh m;
    m.vertices = {Vec3(1, 1, 1) * s, Vec3(1, -1, -1) * s, Vec3(-1, 1, -1) * s, Vec3(-1, -1, 1) * s};
    m.faces = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
    return m;
}

TriMesh icosphere(int subdivisions, double radius)
{
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    TriMesh m;
    m.vertices = {Vec3(-1, t, 0), Vec3(1, t, 0),  Vec3(-1, -t, 0), Vec3(1, -t, 0),
                  Vec3(0, -1, t), Vec3(0, 1, t),  Vec3(0, -1, -t), Vec3(0, 1, -t),
                  Vec3(t, 0, -1), Vec3(t, 0, 1),  Vec3(-t, 0, -1), Vec3(-t, 0, 1)};
    m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
               {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
               {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (auto& v : m.vertices) v = v.normalized() * radius;
    for (int level = 0; level < subdivisions; ++level) {
        std::map<std::array<int, 2>, int> mids;
        std::vector<Face> faces;
        auto mid = [&](int a, int b) {
            std::array<int, 2> key{std::min(a, b), std::max(a, b)};
            auto it = mids.find(key);
            if (it != mids.end()) return it->second;
            int idx = static_cast<int>(m.vertices.size());
            m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized() * radius);
            mids[key] = idx;
            return idx;
        };
        for (const auto& f : m.faces) {
            int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            faces.push_back({f[0], ab, ca});
            faces.push_back({f[1], bc, ab});
            faces.push_back({f[2], ca, bc});
            faces.push_back({ab, bc, ca});
        }
        m.faces = std::move(faces);
    }
    return m;
}

void write_obj(const std::filesystem::path& path, const TriMesh& mesh)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open for writing: " + path.string());
    for (const auto& v : mesh.vertices)
        os << "v " << format_double(v.x()) << ' ' << format_double(v.y()) << ' '
           << format_double(v.z()) << '\n';
    for (const auto& f : mesh.faces)
        os << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
    if (!os) throw DataError("write failed: " + path.string());
}

TriMesh read_obj(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) throw DataError("cannot open OBJ: " + path.string());
    TriMesh mesh;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z))
                throw DataError(path.string() + ":" + std::to_string(lineno) + ": bad vertex");
            mesh.vertices.emplace_back(x, y, z);
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string tok;
            while (ls >> tok) {
                int idx = 0;
                auto slash = tok.find('/');
                auto head = tok.substr(0, slash);
                auto [p, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
                if (ec != std::errc{} || idx == 0)
                    throw DataError(path.string() + ":" + std::to_string(lineno) + ": bad face index");
                idx = idx > 0 ? idx - 1 : static_cast<int>(mesh.vertices.size()) + idx;
                poly.push_back(idx);
            }
            if (poly.size() < 3)
                throw DataError(path.string() + ":" + std::to_string(lineno) + ": face with < 3 vertices");
            for (size_t k = 1; k + 1 < poly.size(); ++k) mesh.faces.push_back({poly[0], poly[k], poly[k + 1]});
        }
    }
    for (const auto& f : mesh.faces)
        for (int idx : f)
            if (idx < 0 || idx >= static_cast<int>(mesh.vertices.size()))
                throw DataError(path.string() + ": face index out of range");
    return mesh;
}

} // namespace meshlabel
