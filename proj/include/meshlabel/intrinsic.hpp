#pragma once

#include "meshlabel/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace meshlabel {

/// Symmetric sparse matrix in full (both triangles) column-major storage.
using SparseSymmetricMatrix = Eigen::SparseMatrix<double>;

struct Laplacian {
    SparseSymmetricMatrix L;  ///< positive semi-definite cotangent stiffness
    Eigen::VectorXd mass;     ///< barycentric lumped vertex areas
};

/// Off-diagonal L_ij = -(cot a_ij + cot b_ij) / 2, diagonal = -(sum of off-diagonals).
/// Throws DataError naming degenerate triangles or non-manifold edges.
Laplacian cotangent_laplacian(std::span<const Vec3> vertices, std::span<const Face> faces);

enum class EigenMethod { Auto, Dense, Iterative };

struct EigenDiagnostics {
    std::string method;
    int iterations = 0;
    double max_residual = 0.0;
    bool near_degenerate = false;  ///< colors depend on solver order within an eigenspace
};

struct EigenBasis {
    std::vector<double> eigenvalues;           ///< ascending, > 0
    std::vector<Eigen::VectorXd> eigenvectors; ///< mass-orthonormal, sign-canonical
    Eigen::VectorXd mass;
    EigenDiagnostics diagnostics;
};

struct EigenOptions {
    EigenMethod method = EigenMethod::Auto;
    int dense_threshold = 500;  ///< Auto uses the dense solver below this vertex count
    double tolerance = 1e-9;    ///< on ||L phi - lambda M phi|| / ||M phi||
    int max_iterations = 1000;
};

/// Solves L phi = lambda M phi (M = diag(mass)) and returns the `k` smallest eigenpairs
/// after the constant mode. Throws NumericalError on non-convergence or when the kernel
/// is more than one-dimensional.
EigenBasis smallest_nontrivial_eigvecs(const SparseSymmetricMatrix& L, const Eigen::VectorXd& mass,
                                       int k = 3, const EigenOptions& options = {});

/// Flips `v` so its entry of largest magnitude is positive (lowest index wins ties).
void canonicalize_sign(Eigen::VectorXd& v);

using Rgb = std::array<double, 3>;

/// Per-vertex RGB in [0, 1].
struct IntrinsicColorMap {
    std::vector<Rgb> colors;
};

/// Min-max normalizes each of the first three eigenvectors into one color channel.
IntrinsicColorMap eigvecs_to_colors(const EigenBasis& basis);

/// Digest of vertex positions and faces; stored in "EIGB/1" caches.
uint64_t mesh_digest(std::span<const Vec3> vertices, std::span<const Face> faces);

/// "EIGB/1" binary sidecar holding an EigenBasis and its color map.
struct EigenCache {
    uint64_t mesh_digest = 0;
    EigenBasis basis;
    IntrinsicColorMap colors;
};
void write_eigen_cache(const std::filesystem::path& path, const EigenCache& cache);
EigenCache read_eigen_cache(const std::filesystem::path& path);

} // namespace meshlabel
