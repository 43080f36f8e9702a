#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace meshlabel {

using Vec3 = Eigen::Vector3d;
using Face = std::array<int, 3>;
using Points = std::vector<Vec3, Eigen::aligned_allocator<Vec3>>;

/// Indexed triangle mesh.
struct TriMesh {
    Points vertices;
    std::vector<Face> faces;
};

/// Result of a topology check. `ok()` is true when the mesh is a closed,
/// connected, edge-manifold triangle mesh without degenerate faces.
struct TopologyReport {
    bool indices_valid = true;
    bool closed = true;
    bool edge_manifold = true;
    bool vertex_manifold = true;
    bool connected = true;
    std::vector<std::array<int, 2>> bad_edges;
    std::vector<int> bad_vertices;
    std::vector<int> degenerate_faces;
    int euler_characteristic = 0;

    bool ok() const
    {
        return indices_valid && closed && edge_manifold && vertex_manifold && connected &&
               degenerate_faces.empty();
    }
    std::string describe() const;
};

/// Triangles with area at or below this (m^2) are degenerate.
inline constexpr double kMinTriangleArea = 1e-12;

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

TopologyReport check_topology(std::span<const Vec3> vertices, std::span<const Face> faces);

/// Throws DataError describing the first failures if the mesh is not a valid closed manifold.
void require_closed_manifold(std::span<const Vec3> vertices, std::span<const Face> faces);

/// Unique undirected edges, each as (min, max), sorted.
std::vector<std::array<int, 2>> unique_edges(std::span<const Face> faces);

/// One level of Loop subdivision on a closed triangle mesh. Every face is split 1-to-4.
/// `stencils` (optional) receives, for every new vertex, the affine combination of old
/// vertices that produced it; weights are non-negative and sum to 1.
struct LoopStencil {
    std::vector<std::pair<int, double>> terms;
};
TriMesh loop_subdivide(const TriMesh& mesh, std::vector<LoopStencil>* stencils = nullptr);

TriMesh regular_tetrahedron(double edge_length = 1.0);
TriMesh icosphere(int subdivisions, double radius = 1.0);

/// Wavefront OBJ (v/f records only). Writing uses shortest round-trip decimal formatting.
void write_obj(const std::filesystem::path& path, const TriMesh& mesh);
TriMesh read_obj(const std::filesystem::path& path);

/// Shortest decimal representation of `v` that parses back to the same double.
std::string format_double(double v);

} // namespace meshlabel
