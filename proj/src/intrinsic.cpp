#include "meshlabel/intrinsic.hpp"

#include "meshlabel/binary_io.hpp"
#include "meshlabel/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace meshlabel {

Laplacian cotangent_laplacian(std::span<const Vec3> vertices, std::span<const Face> faces)
{
    require_closed_manifold(vertices, faces);
    const int n = static_cast<int>(vertices.size());

    std::map<std::array<int, 2>, double> cot_sum;
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(n);
    for (const auto& f : faces) {
        const Vec3& a = vertices[f[0]];
        const Vec3& b = vertices[f[1]];
        const Vec3& c = vertices[f[2]];
        const double area = triangle_area(a, b, c);
        for (int v : f) mass[v] += area / 3.0;
        for (int k = 0; k < 3; ++k) {
            const int i = f[k], j = f[(k + 1) % 3], o = f[(k + 2) % 3];
            const Vec3 u = vertices[i] - vertices[o];
            const Vec3 w = vertices[j] - vertices[o];
            const double cot = u.dot(w) / u.cross(w).norm();
            cot_sum[{std::min(i, j), std::max(i, j)}] += cot;
        }
    }

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(cot_sum.size() * 2 + n);
    std::vector<double> diag(n, 0.0);
    for (const auto& [e, cs] : cot_sum) {
        const double w = -0.5 * cs;
        trips.emplace_back(e[0], e[1], w);
        trips.emplace_back(e[1], e[0], w);
        diag[e[0]] -= w;
        diag[e[1]] -= w;
    }
    for (int i = 0; i < n; ++i) trips.emplace_back(i, i, diag[i]);
    Laplacian out;
    out.L.resize(n, n);
    out.L.setFromTriplets(trips.begin(), trips.end());
    out.L.makeCompressed();
    out.mass = std::move(mass);
    return out;
}

void canonicalize_sign(Eigen::VectorXd& v)
{
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[best])) best = i;
    if (v.size() > 0 && v[best] < 0) v = -v;
}

namespace {

// Deterministic pseudo-random start vectors, independent of the standard library.
double hash_unit(uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    x ^= x >> 31;
    return static_cast<double>(x >> 11) * 0x1.0p-53 - 0.5;
}

double residual_ratio(const SparseSymmetricMatrix& L, const Eigen::VectorXd& mass, const Eigen::VectorXd& phi,
                      double lambda)
{
    const Eigen::VectorXd mphi = mass.cwiseProduct(phi);
    return (L * phi - lambda * mphi).norm() / mphi.norm();
}

void finalize(EigenBasis& basis, const SparseSymmetricMatrix& L, const Eigen::VectorXd& mass)
{
    double worst = 0.0;
    for (size_t i = 0; i < basis.eigenvectors.size(); ++i) {
        canonicalize_sign(basis.eigenvectors[i]);
        worst = std::max(worst, residual_ratio(L, mass, basis.eigenvectors[i], basis.eigenvalues[i]));
    }
    basis.diagnostics.max_residual = worst;
    for (size_t i = 1; i < basis.eigenvalues.size(); ++i)
        if (std::abs(basis.eigenvalues[i] - basis.eigenvalues[i - 1]) < 1e-9 * basis.eigenvalues[i])
            basis.diagnostics.near_degenerate = true;
    basis.mass = mass;
}

void check_kernel(double lambda0, double lambda1, double scale)
{
    if (!(std::abs(lambda0) <= 1e-8 * scale))
        throw NumericalError("smallest eigenvalue " + std::to_string(lambda0) +
                             " is not the constant mode; Laplacian is not valid");
    if (!(lambda1 > 1e-8 * scale))
        throw NumericalError("Laplacian kernel is more than one-dimensional (mesh not connected?)");
}

EigenBasis solve_dense(const SparseSymmetricMatrix& L, const Eigen::VectorXd& mass, int k)
{
    const Eigen::VectorXd inv_sqrt = mass.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd A = inv_sqrt.asDiagonal() * Eigen::MatrixXd(L) * inv_sqrt.asDiagonal();
    A = 0.5 * (A + A.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed to converge");
    const auto& vals = es.eigenvalues();
    check_kernel(vals[0], vals[1], vals[vals.size() - 1]);
    EigenBasis basis;
    for (int i = 1; i <= k; ++i) {
        basis.eigenvalues.push_back(vals[i]);
        basis.eigenvectors.push_back(inv_sqrt.cwiseProduct(es.eigenvectors().col(i)));
    }
    basis.diagnostics.method = "dense";
    return basis;
}

// Shift-invert subspace iteration with Rayleigh-Ritz, deflating the constant mode.
EigenBasis solve_iterative(const SparseSymmetricMatrix& L, const Eigen::VectorXd& mass, int k,
                           const EigenOptions& opt)
{
    const Eigen::Index n = L.rows();
    const int p = static_cast<int>(std::min<Eigen::Index>(std::max(2 * k, k + 5), n - 1));
    const double scale = (L.diagonal().array() / mass.array()).maxCoeff();
    const double shift = 1e-6 * scale;

    SparseSymmetricMatrix A = L;
    for (Eigen::Index i = 0; i < n; ++i) A.coeffRef(i, i) += shift * mass[i];
    Eigen::SimplicialLDLT<SparseSymmetricMatrix> ldlt(A);
    if (ldlt.info() != Eigen::Success) throw NumericalError("factorization of shifted Laplacian failed");

    const double total_mass = mass.sum();
    auto deflate_and_orthonormalize = [&](Eigen::MatrixXd& X) {
        for (int pass = 0; pass < 2; ++pass) {
            for (int c = 0; c < X.cols(); ++c) {
                auto col = X.col(c);
                col.array() -= mass.dot(col) / total_mass;
                for (int d = 0; d < c; ++d) col -= X.col(d).dot(mass.cwiseProduct(col)) * X.col(d);
                const double nrm = std::sqrt(col.dot(mass.cwiseProduct(col)));
                if (!(nrm > 0.0)) throw NumericalError("subspace collapsed during eigen iteration");
                col /= nrm;
            }
        }
    };

    Eigen::MatrixXd X(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (int c = 0; c < p; ++c) X(i, c) = hash_unit(static_cast<uint64_t>(i) * 131 + c);
    deflate_and_orthonormalize(X);

    std::vector<double> residuals(k, 0.0);
    Eigen::VectorXd ritz;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        Eigen::MatrixXd Y = ldlt.solve(mass.asDiagonal() * X);
        deflate_and_orthonormalize(Y);
        Eigen::MatrixXd H = Y.transpose() * (L * Y);
        H = 0.5 * (H + H.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(H);
        ritz = small.eigenvalues();
        X = Y * small.eigenvectors();

        double worst = 0.0;
        for (int i = 0; i < k; ++i) {
            residuals[i] = residual_ratio(L, mass, X.col(i), ritz[i]);
            worst = std::max(worst, residuals[i]);
        }
        if (worst < opt.tolerance) {
            if (!(ritz[0] > 1e-8 * scale))
                throw NumericalError("Laplacian kernel is more than one-dimensional (mesh not connected?)");
            EigenBasis basis;
            for (int i = 0; i < k; ++i) {
                basis.eigenvalues.push_back(ritz[i]);
                basis.eigenvectors.push_back(X.col(i));
            }
            basis.diagnostics.method = "shift-invert subspace iteration";
            basis.diagnostics.iterations = it;
            return basis;
        }
    }
    std::ostringstream os;
    os << "eigensolver did not converge after " << opt.max_iterations << " iterations; residuals:";
    for (double r : residuals) os << ' ' << r;
    os << "; tolerance " << opt.tolerance;
    throw NumericalError(os.str());
}

} // namespace

EigenBasis smallest_nontrivial_eigvecs(const SparseSymmetricMatrix& L, const Eigen::VectorXd& mass, int k,
                                       const EigenOptions& opt)
{
    const Eigen::Index n = L.rows();
    if (k < 1) throw ConfigError("eigenvector count must be positive");
    if (L.cols() != n || mass.size() != n) throw DataError("Laplacian and mass sizes disagree");
    if (n < k + 1)
        throw NumericalError("need at least " + std::to_string(k + 1) + " modes but mesh has " +
                             std::to_string(n) + " vertices");
    if (!(mass.array() > 0.0).all()) throw DataError("mass vector must be strictly positive");

    const bool dense = opt.method == EigenMethod::Dense ||
                       (opt.method == EigenMethod::Auto && n < opt.dense_threshold) ||
                       n <= std::max(2 * k, k + 5) + 1;
    EigenBasis basis = dense ? solve_dense(L, mass, k) : solve_iterative(L, mass, k, opt);
    finalize(basis, L, mass);
    return basis;
}

IntrinsicColorMap eigvecs_to_colors(const EigenBasis& basis)
{
    if (basis.eigenvectors.size() < 3) throw DataError("color map needs three eigenvectors");
    const Eigen::Index n = basis.eigenvectors[0].size();
    IntrinsicColorMap out;
    out.colors.assign(n, Rgb{0, 0, 0});
    for (int c = 0; c < 3; ++c) {
        Eigen::VectorXd v = basis.eigenvectors[c];
        if (v.size() != n) throw DataError("eigenvectors differ in length");
        canonicalize_sign(v);
        const double lo = v.minCoeff();
        const double hi = v.maxCoeff();
        if (!(hi - lo > 0.0)) throw NumericalError("eigenvector " + std::to_string(c) + " is constant");
        for (Eigen::Index i = 0; i < n; ++i) out.colors[i][c] = (v[i] - lo) / (hi - lo);
    }
    return out;
}

uint64_t mesh_digest(std::span<const Vec3> vertices, std::span<const Face> faces)
{
    binio::Fnv1a h;
    h.update(static_cast<uint64_t>(vertices.size()));
    for (const auto& v : vertices) {
        h.update(v.x());
        h.update(v.y());
        h.update(v.z());
    }
    h.update(static_cast<uint64_t>(faces.size()));
    for (const auto& f : faces)
        for (int i : f) h.update(static_cast<int32_t>(i));
    return h.digest();
}

void write_eigen_cache(const std::filesystem::path& path, const EigenCache& cache)
{
    const auto& b = cache.basis;
    const uint32_t n = static_cast<uint32_t>(b.mass.size());
    const uint32_t k = static_cast<uint32_t>(b.eigenvalues.size());
    if (b.eigenvectors.size() != k || cache.colors.colors.size() != n)
        throw DataError("inconsistent eigen cache contents");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open for writing: " + path.string());
    os.write("EIGB/1", 6);
    binio::put<uint32_t>(os, n);
    binio::put<uint32_t>(os, k);
    binio::put<uint64_t>(os, cache.mesh_digest);
    for (double v : b.eigenvalues) binio::put<double>(os, v);
    for (const auto& vec : b.eigenvectors) {
        if (vec.size() != n) throw DataError("eigenvector length mismatch");
        for (Eigen::Index i = 0; i < vec.size(); ++i) binio::put<double>(os, vec[i]);
    }
    for (Eigen::Index i = 0; i < b.mass.size(); ++i) binio::put<double>(os, b.mass[i]);
    for (const auto& rgb : cache.colors.colors)
        for (double c : rgb) binio::put<double>(os, c);
    if (!os) throw DataError("write failed: " + path.string());
}

EigenCache read_eigen_cache(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open eigen cache: " + path.string());
    binio::expect_magic(is, "EIGB/1", "EIGB/1");
    EigenCache cache;
    const uint32_t n = binio::get<uint32_t>(is, "vertex count");
    const uint32_t k = binio::get<uint32_t>(is, "mode count");
    if (k > 64 || n > (1u << 26)) throw DataError("implausible EIGB/1 header");
    cache.mesh_digest = binio::get<uint64_t>(is, "digest");
    auto& b = cache.basis;
    for (uint32_t i = 0; i < k; ++i) b.eigenvalues.push_back(binio::get<double>(is, "eigenvalue"));
    for (uint32_t i = 0; i < k; ++i) {
        Eigen::VectorXd v(n);
        for (uint32_t j = 0; j < n; ++j) v[j] = binio::get<double>(is, "eigenvector");
        b.eigenvectors.push_back(std::move(v));
    }
    b.mass.resize(n);
    for (uint32_t j = 0; j < n; ++j) b.mass[j] = binio::get<double>(is, "mass");
    cache.colors.colors.resize(n);
    for (auto& rgb : cache.colors.colors)
        for (double& c : rgb) c = binio::get<double>(is, "color");
    if (is.peek() != std::char_traits<char>::eof()) throw DataError("trailing bytes in EIGB/1 file");
    b.diagnostics.method = "cache";
    return cache;
}

} // namespace meshlabel
