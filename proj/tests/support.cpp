#include "support.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>

#include <unistd.h>

namespace testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag)
{
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("meshlabel_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
}

TempDir::~TempDir()
{
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::vector<unsigned char> read_bytes(const fs::path& path)
{
    std::ifstream is(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

namespace {

uint64_t fnv(uint64_t h, const unsigned char* p, size_t n)
{
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

constexpr uint64_t kFnvBasis = 1469598103934665603ull;

} // namespace

uint64_t file_digest(const fs::path& path)
{
    const auto b = read_bytes(path);
    return fnv(kFnvBasis, b.data(), b.size());
}

uint64_t tree_digest(const fs::path& dir)
{
    std::map<std::string, fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) files[fs::relative(e.path(), dir).generic_string()] = e.path();
    uint64_t h = kFnvBasis;
    for (const auto& [name, p] : files) {
        h = fnv(h, reinterpret_cast<const unsigned char*>(name.data()), name.size());
        const auto b = read_bytes(p);
        h = fnv(h, b.data(), b.size());
    }
    return h;
}

MotionSequence synthetic_motion(const BodyTemplate& tmpl, int frames, uint64_t seed, double amplitude)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    const double ph = phase(rng);
    auto idx = [&](const char* name) {
        const auto it = std::find(tmpl.joint_names.begin(), tmpl.joint_names.end(), name);
        return it == tmpl.joint_names.end() ? -1 : static_cast<int>(it - tmpl.joint_names.begin());
    };
    MotionSequence seq;
    seq.frame_rate = 30.0;
    seq.shape_count = tmpl.shape_count();
    for (int t = 0; t < frames; ++t) {
        PoseParams p = PoseParams::zeros(tmpl.joint_count());
        const double s = std::sin(2.0 * M_PI * t / 30.0 + ph);
        const double c = std::cos(2.0 * M_PI * t / 30.0 + ph);
        auto set = [&](const char* name, Vec3 v) {
            const int j = idx(name);
            if (j >= 0) p.theta[j] = v;
        };
        set("l_hip", Vec3(amplitude * s, 0, 0));
        set("r_hip", Vec3(-amplitude * s, 0, 0));
        set("l_knee", Vec3(amplitude * std::max(0.0, c), 0, 0));
        set("r_knee", Vec3(amplitude * std::max(0.0, -c), 0, 0));
        set("l_shoulder", Vec3(-amplitude * s, 0, -1.2));
        set("r_shoulder", Vec3(amplitude * s, 0, 1.2));
        set("l_elbow", Vec3(0, -0.4 * amplitude * (1 + c), 0));
        set("r_elbow", Vec3(0, 0.4 * amplitude * (1 - c), 0));
        set("spine", Vec3(0, 0.2 * amplitude * s, 0));
        set("head", Vec3(0.1 * amplitude * c, 0, 0));
        p.root_translation = Vec3(0.01 * t, 0.02 * amplitude * std::abs(s), 0);
        seq.frames.push_back(std::move(p));
    }
    return seq;
}

PoseParams random_pose(int joints, std::mt19937_64& rng, double max_angle)
{
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(-max_angle, max_angle);
    PoseParams p = PoseParams::zeros(joints);
    for (auto& w : p.theta) {
        Vec3 axis(n(rng), n(rng), n(rng));
        w = axis.normalized() * u(rng);
    }
    p.root_translation = Vec3(u(rng), u(rng), u(rng)) * 0.2;
    return p;
}

ShapeParams random_shape(int k, std::mt19937_64& rng, double max_abs)
{
    std::uniform_real_distribution<double> u(-max_abs, max_abs);
    ShapeParams s = ShapeParams::zeros(k);
    for (auto& b : s.beta) b = u(rng);
    return s;
}

std::vector<double> dense_generalized_eigenvalues(const Laplacian& lap)
{
    const Eigen::MatrixXd L(lap.L);
    const Eigen::MatrixXd M = lap.mass.asDiagonal();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(L, M, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

RasterImage oracle_rasterize(std::span<const ProjectedPoint> verts, std::span<const Face> faces,
                             std::span<const Rgb> colors, int width, int height, bool perspective)
{
    auto edge = [](const ProjectedPoint& a, const ProjectedPoint& b, double px, double py) {
        return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
    };
    auto top_left = [](const ProjectedPoint& a, const ProjectedPoint& b) {
        return (b.y == a.y && b.x > a.x) || b.y < a.y;
    };
    RasterImage img(width, height, 3);
    img.depth.assign(img.pixel_count(), RasterImage::kEmptyDepth);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const double px = x + 0.5, py = y + 0.5;
            double best = std::numeric_limits<double>::infinity();
            Rgb best_rgb{0, 0, 0};
            for (const Face& f : faces) {
                int i[3] = {f[0], f[1], f[2]};
                if (verts[i[0]].clipped || verts[i[1]].clipped || verts[i[2]].clipped) continue;
                double area = edge(verts[i[0]], verts[i[1]], verts[i[2]].x, verts[i[2]].y);
                if (area == 0.0 || !std::isfinite(area)) continue;
                if (area < 0.0) {
                    std::swap(i[1], i[2]);
                    area = -area;
                }
                const auto &a = verts[i[0]], &b = verts[i[1]], &c = verts[i[2]];
                const double e[3] = {edge(b, c, px, py), edge(c, a, px, py), edge(a, b, px, py)};
                const bool own[3] = {top_left(b, c), top_left(c, a), top_left(a, b)};
                bool inside = true;
                for (int k = 0; k < 3; ++k)
                    if (e[k] < 0.0 || (e[k] == 0.0 && !own[k])) inside = false;
                if (!inside) continue;
                const double w[3] = {e[0] / area, e[1] / area, e[2] / area};
                double depth;
                Rgb rgb;
                if (perspective) {
                    const double q[3] = {w[0] / a.depth, w[1] / b.depth, w[2] / c.depth};
                    depth = 1.0 / (q[0] + q[1] + q[2]);
                    for (int ch = 0; ch < 3; ++ch)
                        rgb[ch] = (q[0] * colors[i[0]][ch] + q[1] * colors[i[1]][ch] + q[2] * colors[i[2]][ch]) * depth;
                } else {
                    depth = w[0] * a.depth + w[1] * b.depth + w[2] * c.depth;
                    for (int ch = 0; ch < 3; ++ch)
                        rgb[ch] = w[0] * colors[i[0]][ch] + w[1] * colors[i[1]][ch] + w[2] * colors[i[2]][ch];
                }
                if (depth < best) {
                    best = depth;
                    best_rgb = rgb;
                }
            }
            if (best < std::numeric_limits<double>::infinity()) {
                for (int ch = 0; ch < 3; ++ch) img.at(x, y, ch) = static_cast<float>(std::clamp(best_rgb[ch], 0.0, 1.0));
                img.depth[static_cast<size_t>(y) * width + x] = static_cast<float>(best);
            }
        }
    return img;
}

double oracle_ssim(const RasterImage& a, const RasterImage& b)
{
    const int win = 11, half = 5;
    const double sigma = 1.5, c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    double wsum = 0.0;
    double w[11][11];
    for (int i = 0; i < win; ++i)
        for (int j = 0; j < win; ++j) {
            const double di = i - half, dj = j - half;
            w[i][j] = std::exp(-(di * di + dj * dj) / (2 * sigma * sigma));
            wsum += w[i][j];
        }
    auto gray = [](const RasterImage& img, int x, int y) {
        double s = 0.0;
        for (int c = 0; c < img.channels; ++c) s += img.at(x, y, c);
        return s / img.channels;
    };
    double total = 0.0;
    int count = 0;
    for (int y = 0; y + win <= a.height; ++y)
        for (int x = 0; x + win <= a.width; ++x) {
            double ma = 0, mb = 0;
            for (int i = 0; i < win; ++i)
                for (int j = 0; j < win; ++j) {
                    ma += w[i][j] / wsum * gray(a, x + j, y + i);
                    mb += w[i][j] / wsum * gray(b, x + j, y + i);
                }
            double va = 0, vb = 0, cov = 0;
            for (int i = 0; i < win; ++i)
                for (int j = 0; j < win; ++j) {
                    const double da = gray(a, x + j, y + i) - ma, db = gray(b, x + j, y + i) - mb;
                    va += w[i][j] / wsum * da * da;
                    vb += w[i][j] / wsum * db * db;
                    cov += w[i][j] / wsum * da * db;
                }
            total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    return total / count;
}

double point_segment_distance(double px, double py, double ax, double ay, double bx, double by)
{
    const Eigen::Vector2d p(px, py), a(ax, ay), b(bx, by);
    const Eigen::Vector2d d = b - a;
    if (d.squaredNorm() == 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
    return (p - (a + t * d)).norm();
}

RasterImage test_pattern(int w, int h, int variant)
{
    RasterImage img(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double v = 0.5 + 0.3 * std::sin(0.3 * x * (variant + 1) + 0.2 * y) * std::cos(0.17 * y * (variant + 2));
            if ((x / 8 + y / 8 + variant) % 3 == 0) v *= 0.6;
            if (x > w / 4 && x < w / 2 && y > h / 3 && y < (2 * h) / 3) v = 0.9 - 0.1 * variant;
            img.at(x, y, 0) = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    return img;
}

} // namespace testing
