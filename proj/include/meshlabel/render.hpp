#pragma once

#include "meshlabel/body_model.hpp"
#include "meshlabel/image.hpp"
#include "meshlabel/intrinsic.hpp"

#include <array>
#include <span>
#include <vector>

namespace meshlabel {

struct Camera {
    enum class Mode { WeakPerspective, Pinhole };

    Mode mode = Mode::WeakPerspective;
    double focal = 500.0;  ///< pixels, pinhole only
    double scale = 120.0;  ///< pixels per meter, weak perspective only
    double cx = 128.0;
    double cy = 128.0;
    int width = 256;
    int height = 256;
    /// World to camera: p_cam = rotation * p_world + translation. Camera looks down +z,
    /// image y grows downward.
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Vec3 translation = Vec3::Zero();

    /// Front view of the default humanoid template (y up, facing +z) at the given size.
    static Camera front_view(int width, int height, double body_height = 1.84);
};

void validate(const Camera& cam);

inline constexpr double kNearPlane = 0.01;

struct ProjectedPoint {
    double x = 0.0;
    double y = 0.0;
    double depth = 0.0;
    bool clipped = false;  ///< pinhole point at or in front of the near plane
};

std::vector<ProjectedPoint> project_vertices(const Camera& cam, std::span<const Vec3> points);

/// Screen-space triangle rasterization with a z-buffer. Pixel centers sit at (i + 0.5,
/// j + 0.5); centers on an edge belong to top and left edges only. Smaller depth wins;
/// equal depths keep the earlier face. `perspective` selects perspective-correct
/// interpolation (depth is then the camera-space z). Faces touching a clipped vertex are
/// skipped. `threads` > 1 splits rows across threads without changing the output.
RasterImage rasterize_triangles(std::span<const ProjectedPoint> verts, std::span<const Face> faces,
                                std::span<const Rgb> colors, int width, int height, bool perspective,
                                int threads = 1);

/// Projects and rasterizes the colored mesh. Background is black with depth +inf.
RasterImage rasterize_mesh(const PosedMesh& mesh, const IntrinsicColorMap& colors, const Camera& cam,
                           int threads = 1);

/// Fixed 20-color palette for skeleton figures.
const std::array<Rgb, 20>& skeleton_palette();

struct SkeletonFigureSpec {
    std::vector<std::array<int, 2>> limbs;
    std::vector<Rgb> limb_colors;
    std::vector<Rgb> joint_colors;
    double limb_thickness = 4.0;  ///< pixels
    double joint_radius = 3.0;    ///< pixels

    /// One limb per parent-child edge; limb i and joint j take palette[i % 20] / palette[j % 20].
    static SkeletonFigureSpec from_parents(std::span<const int> parents, double thickness = 4.0,
                                           double radius = 3.0);
};

void validate(const SkeletonFigureSpec& spec, int joint_count);

/// Limbs as hard-edged capsules drawn in order, then joint discs on top.
RasterImage render_skeleton(std::span<const ProjectedPoint> joints, const SkeletonFigureSpec& spec, int width,
                            int height);

/// 6-channel conditioning image: mesh projection in channels 0-2, pose figure in 3-5.
class LabelImage {
public:
    explicit LabelImage(RasterImage image);
    static LabelImage zeros(int width, int height) { return LabelImage(RasterImage(width, height, 6)); }

    const RasterImage& image() const { return image_; }
    int width() const { return image_.width; }
    int height() const { return image_.height; }
    RasterImage mesh_half() const { return slice_channels(image_, 0, 3); }
    RasterImage pose_half() const { return slice_channels(image_, 3, 3); }

    bool operator==(const LabelImage& o) const
    {
        return image_.width == o.image_.width && image_.height == o.image_.height && image_.data == o.image_.data;
    }

private:
    RasterImage image_;
};

LabelImage make_label_image(const RasterImage& mesh_img, const RasterImage& pose_img);

} // namespace meshlabel
