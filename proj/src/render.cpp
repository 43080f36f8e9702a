#include "meshlabel/render.hpp"

#include "meshlabel/error.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace meshlabel {

Camera Camera::front_view(int width, int height, double body_height)
{
    Camera cam;
    cam.width = width;
    cam.height = height;
    cam.cx = 0.5 * width;
    cam.cy = 0.5 * height;
    // Body fills ~88% of the shorter image side.
    cam.scale = 0.88 * std::min(width, height) / body_height;
    cam.rotation = Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal();
    cam.translation = Vec3(0.0, 0.5 * body_height, 3.0);
    return cam;
}

void validate(const Camera& cam)
{
    if (cam.width <= 0 || cam.height <= 0) throw ConfigError("camera image size must be positive");
    if (cam.mode == Camera::Mode::Pinhole && !(cam.focal > 0.0)) throw ConfigError("camera focal must be positive");
    if (cam.mode == Camera::Mode::WeakPerspective && !(cam.scale > 0.0))
        throw ConfigError("camera scale must be positive");
    if (!std::isfinite(cam.cx) || !std::isfinite(cam.cy) || !cam.rotation.allFinite() || !cam.translation.allFinite())
        throw ConfigError("camera parameters must be finite");
    const Eigen::Matrix3d should_be_identity = cam.rotation * cam.rotation.transpose();
    if (!should_be_identity.isIdentity(1e-9) || cam.rotation.determinant() < 0.0)
        throw ConfigError("camera view rotation must be a proper rotation");
}

std::vector<ProjectedPoint> project_vertices(const Camera& cam, std::span<const Vec3> points)
{
    validate(cam);
    std::vector<ProjectedPoint> out(points.size());
    for (size_t i = 0; i < points.size(); ++i) {
        const Vec3 pc = cam.rotation * points[i] + cam.translation;
        auto& o = out[i];
        o.depth = pc.z();
        if (cam.mode == Camera::Mode::WeakPerspective) {
            o.x = cam.scale * pc.x() + cam.cx;
            o.y = cam.scale * pc.y() + cam.cy;
        } else if (pc.z() <= kNearPlane) {
            o.clipped = true;
        } else {
            o.x = cam.focal * (pc.x() / pc.z()) + cam.cx;
            o.y = cam.focal * (pc.y() / pc.z()) + cam.cy;
        }
    }
    return out;
}

namespace {

inline double edge_fn(double ax, double ay, double bx, double by, double px, double py)
{
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

// Edge a->b owns centers lying exactly on it when it is a top or left edge.
inline bool owns_edge(double ax, double ay, double bx, double by)
{
    const double dx = bx - ax;
    const double dy = by - ay;
    return (dy == 0.0 && dx > 0.0) || dy < 0.0;
}

void raster_rows(std::span<const ProjectedPoint> verts, std::span<const Face> faces, std::span<const Rgb> colors,
                 bool perspective, int row_begin, int row_end, RasterImage& img, std::vector<double>& zbuf)
{
    const int width = img.width;
    for (const auto& f : faces) {
        int i0 = f[0], i1 = f[1], i2 = f[2];
        if (verts[i0].clipped || verts[i1].clipped || verts[i2].clipped) continue;
        double area = edge_fn(verts[i0].x, verts[i0].y, verts[i1].x, verts[i1].y, verts[i2].x, verts[i2].y);
        if (area == 0.0 || !std::isfinite(area)) continue;
        if (area < 0.0) {
            std::swap(i1, i2);
            area = -area;
        }
        const ProjectedPoint& a = verts[i0];
        const ProjectedPoint& b = verts[i1];
        const ProjectedPoint& c = verts[i2];
        const bool own0 = owns_edge(b.x, b.y, c.x, c.y);
        const bool own1 = owns_edge(c.x, c.y, a.x, a.y);
        const bool own2 = owns_edge(a.x, a.y, b.x, b.y);

        const double minx = std::min({a.x, b.x, c.x}), maxx = std::max({a.x, b.x, c.x});
        const double miny = std::min({a.y, b.y, c.y}), maxy = std::max({a.y, b.y, c.y});
        const int x0 = std::max(0, static_cast<int>(std::floor(minx)) - 1);
        const int x1 = std::min(width - 1, static_cast<int>(std::ceil(maxx)) + 1);
        const int y0 = std::max(row_begin, static_cast<int>(std::floor(miny)) - 1);
        const int y1 = std::min(row_end - 1, static_cast<int>(std::ceil(maxy)) + 1);

        for (int y = y0; y <= y1; ++y) {
            const double py = y + 0.5;
            for (int x = x0; x <= x1; ++x) {
                const double px = x + 0.5;
                const double e0 = edge_fn(b.x, b.y, c.x, c.y, px, py);
                const double e1 = edge_fn(c.x, c.y, a.x, a.y, px, py);
                const double e2 = edge_fn(a.x, a.y, b.x, b.y, px, py);
                if (e0 < 0.0 || e1 < 0.0 || e2 < 0.0) continue;
                if ((e0 == 0.0 && !own0) || (e1 == 0.0 && !own1) || (e2 == 0.0 && !own2)) continue;
                const double w0 = e0 / area, w1 = e1 / area, w2 = e2 / area;
                double depth;
                Rgb rgb;
                if (perspective) {
                    const double q0 = w0 / a.depth, q1 = w1 / b.depth, q2 = w2 / c.depth;
                    depth = 1.0 / (q0 + q1 + q2);
                    for (int ch = 0; ch < 3; ++ch)
                        rgb[ch] = (q0 * colors[i0][ch] + q1 * colors[i1][ch] + q2 * colors[i2][ch]) * depth;
                } else {
                    depth = w0 * a.depth + w1 * b.depth + w2 * c.depth;
                    for (int ch = 0; ch < 3; ++ch)
                        rgb[ch] = w0 * colors[i0][ch] + w1 * colors[i1][ch] + w2 * colors[i2][ch];
                }
                const size_t pix = static_cast<size_t>(y) * width + x;
                if (!(depth < zbuf[pix])) continue;
                zbuf[pix] = depth;
                for (int ch = 0; ch < 3; ++ch)
                    img.data[pix * 3 + ch] = static_cast<float>(std::clamp(rgb[ch], 0.0, 1.0));
            }
        }
    }
}

} // namespace

RasterImage rasterize_triangles(std::span<const ProjectedPoint> verts, std::span<const Face> faces,
                                std::span<const Rgb> colors, int width, int height, bool perspective, int threads)
{
    if (colors.size() != verts.size()) throw DataError("color count does not match vertex count");
    for (const auto& f : faces)
        for (int i : f)
            if (i < 0 || i >= static_cast<int>(verts.size())) throw DataError("face index out of range");
    RasterImage img(width, height, 3);
    std::vector<double> zbuf(img.pixel_count(), std::numeric_limits<double>::infinity());

    threads = std::clamp(threads, 1, height);
    if (threads == 1) {
        raster_rows(verts, faces, colors, perspective, 0, height, img, zbuf);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            const int r0 = static_cast<int>(static_cast<long>(height) * t / threads);
            const int r1 = static_cast<int>(static_cast<long>(height) * (t + 1) / threads);
            pool.emplace_back([&, r0, r1] { raster_rows(verts, faces, colors, perspective, r0, r1, img, zbuf); });
        }
        for (auto& th : pool) th.join();
    }
    img.depth.resize(zbuf.size());
    for (size_t i = 0; i < zbuf.size(); ++i) img.depth[i] = static_cast<float>(zbuf[i]);
    return img;
}

RasterImage rasterize_mesh(const PosedMesh& mesh, const IntrinsicColorMap& colors, const Camera& cam, int threads)
{
    if (colors.colors.size() != mesh.vertices.size()) throw DataError("color map size does not match mesh");
    const auto proj = project_vertices(cam, mesh.vertices);
    return rasterize_triangles(proj, *mesh.faces, colors.colors, cam.width, cam.height,
                               cam.mode == Camera::Mode::Pinhole, threads);
}

const std::array<Rgb, 20>& skeleton_palette()
{
    static constexpr auto u = [](int r, int g, int b) { return Rgb{r / 255.0, g / 255.0, b / 255.0}; };
    static const std::array<Rgb, 20> palette = {
        u(230, 25, 75),  u(60, 180, 75),  u(255, 225, 25), u(0, 130, 200),   u(245, 130, 48),
        u(145, 30, 180), u(70, 240, 240), u(240, 50, 230), u(210, 245, 60),  u(250, 190, 212),
        u(0, 128, 128),  u(220, 190, 255), u(170, 110, 40), u(255, 250, 200), u(128, 0, 0),
        u(170, 255, 195), u(128, 128, 0), u(255, 215, 180), u(0, 0, 128),    u(255, 255, 255),
    };
    return palette;
}

SkeletonFigureSpec SkeletonFigureSpec::from_parents(std::span<const int> parents, double thickness, double radius)
{
    SkeletonFigureSpec spec;
    spec.limb_thickness = thickness;
    spec.joint_radius = radius;
    const auto& pal = skeleton_palette();
    for (int j = 0; j < static_cast<int>(parents.size()); ++j) {
        if (parents[j] >= 0) {
            spec.limb_colors.push_back(pal[spec.limbs.size() % pal.size()]);
            spec.limbs.push_back({parents[j], j});
        }
        spec.joint_colors.push_back(pal[j % pal.size()]);
    }
    return spec;
}

void validate(const SkeletonFigureSpec& spec, int joint_count)
{
    if (spec.limb_colors.size() != spec.limbs.size()) throw ConfigError("limb color count != limb count");
    if (static_cast<int>(spec.joint_colors.size()) != joint_count) throw ConfigError("joint color count != joint count");
    for (const auto& l : spec.limbs)
        for (int j : l)
            if (j < 0 || j >= joint_count) throw ConfigError("limb joint index out of range");
    if (!(spec.limb_thickness >= 1.0)) throw ConfigError("limb thickness must be at least 1 pixel");
    if (!(spec.joint_radius >= 0.0)) throw ConfigError("joint radius must be non-negative");
}

namespace {

void fill_capsule(RasterImage& img, double ax, double ay, double bx, double by, double radius, const Rgb& color)
{
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(ax, bx) - radius)) - 1);
    const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(std::max(ax, bx) + radius)) + 1);
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(ay, by) - radius)) - 1);
    const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(std::max(ay, by) + radius)) + 1);
    const double dx = bx - ax, dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    const double r2 = radius * radius;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double px = x + 0.5, py = y + 0.5;
            const double t = len2 > 0.0 ? std::clamp(((px - ax) * dx + (py - ay) * dy) / len2, 0.0, 1.0) : 0.0;
            const double ex = px - (ax + t * dx), ey = py - (ay + t * dy);
            if (ex * ex + ey * ey <= r2)
                for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<float>(color[c]);
        }
    }
}

} // namespace

RasterImage render_skeleton(std::span<const ProjectedPoint> joints, const SkeletonFigureSpec& spec, int width,
                            int height)
{
    validate(spec, static_cast<int>(joints.size()));
    RasterImage img(width, height, 3);
    for (size_t l = 0; l < spec.limbs.size(); ++l) {
        const auto& a = joints[spec.limbs[l][0]];
        const auto& b = joints[spec.limbs[l][1]];
        if (a.clipped || b.clipped) continue;
        fill_capsule(img, a.x, a.y, b.x, b.y, 0.5 * spec.limb_thickness, spec.limb_colors[l]);
    }
    for (size_t j = 0; j < joints.size(); ++j) {
        if (joints[j].clipped) continue;
        fill_capsule(img, joints[j].x, joints[j].y, joints[j].x, joints[j].y, spec.joint_radius, spec.joint_colors[j]);
    }
    return img;
}

LabelImage::LabelImage(RasterImage image) : image_(std::move(image))
{
    if (image_.channels != 6) throw DataError("label image must have 6 channels");
    image_.depth.clear();
}

LabelImage make_label_image(const RasterImage& mesh_img, const RasterImage& pose_img)
{
    if (mesh_img.channels != 3 || pose_img.channels != 3) throw DataError("label halves must be 3-channel");
    if (mesh_img.width != pose_img.width || mesh_img.height != pose_img.height)
        throw DataError("label halves differ in size");
    RasterImage out(mesh_img.width, mesh_img.height, 6);
    for (size_t p = 0; p < out.pixel_count(); ++p) {
        for (int c = 0; c < 3; ++c) {
            out.data[p * 6 + c] = mesh_img.data[p * 3 + c];
            out.data[p * 6 + 3 + c] = pose_img.data[p * 3 + c];
        }
    }
    return LabelImage(std::move(out));
}

} // namespace meshlabel
