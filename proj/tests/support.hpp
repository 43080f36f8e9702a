#pragma once

#include "meshlabel/body_model.hpp"
#include "meshlabel/image.hpp"
#include "meshlabel/intrinsic.hpp"
#include "meshlabel/render.hpp"
#include "meshlabel/sequence.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testing {

using namespace meshlabel;

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

std::vector<unsigned char> read_bytes(const std::filesystem::path& path);
uint64_t file_digest(const std::filesystem::path& path);
/// Digest over every regular file under `dir` (relative names and contents, sorted by name).
uint64_t tree_digest(const std::filesystem::path& dir);

/// Deterministic walking-like motion: limbs swing sinusoidally, root drifts along x.
MotionSequence synthetic_motion(const BodyTemplate& tmpl, int frames, uint64_t seed, double amplitude = 0.5);

PoseParams random_pose(int joints, std::mt19937_64& rng, double max_angle);
ShapeParams random_shape(int k, std::mt19937_64& rng, double max_abs);

/// Generalized eigenvalues of (L, diag(mass)) from a dense solver, ascending, all of them.
std::vector<double> dense_generalized_eigenvalues(const Laplacian& lap);

/// Per-pixel brute-force rasterizer: every pixel tests every face in order.
RasterImage oracle_rasterize(std::span<const ProjectedPoint> verts, std::span<const Face> faces,
                             std::span<const Rgb> colors, int width, int height, bool perspective);

/// Direct SSIM: explicit 2-D Gaussian window at every valid position.
double oracle_ssim(const RasterImage& a, const RasterImage& b);

/// Distance from p to segment ab.
double point_segment_distance(double px, double py, double ax, double ay, double bx, double by);

/// Gray test pattern with smooth gradients and a few rectangles, values in [0, 1].
RasterImage test_pattern(int w, int h, int variant);

} // namespace testing
