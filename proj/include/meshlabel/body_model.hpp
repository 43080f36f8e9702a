#pragma once

#include "meshlabel/mesh.hpp"

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace meshlabel {

/// Procedural humanoid parameters. Lengths are in meters at `height_scale` = 1
/// (about 1.84 m tall, T-pose, facing +z, feet on y = 0).
struct TemplateConfig {
    double height_scale = 1.0;
    double limb_thickness = 1.0;  ///< multiplier on limb/neck cross sections
    int rings_per_bone = 1;       ///< rigid rings inserted between joint rings
    int subdivision = 1;          ///< Loop subdivision levels
    int num_shape_dirs = 3;       ///< 0..3 of {height, limb_thickness, torso_width}
};

struct SkinWeight {
    int joint = 0;
    double weight = 0.0;
};

using Faces = std::shared_ptr<const std::vector<Face>>;

struct BodyTemplate {
    Points rest_vertices;
    Faces faces;
    std::vector<std::string> joint_names;
    Points joints_rest;
    std::vector<int> joint_parents;  ///< -1 for the root
    std::vector<std::vector<SkinWeight>> skin_weights;
    std::vector<std::string> shape_names;
    std::vector<Points> shape_dirs;

    int vertex_count() const { return static_cast<int>(rest_vertices.size()); }
    int joint_count() const { return static_cast<int>(joints_rest.size()); }
    int shape_count() const { return static_cast<int>(shape_dirs.size()); }
    int root_joint() const;
    TriMesh rest_mesh() const;
};

struct ShapeParams {
    std::vector<double> beta;

    static ShapeParams zeros(int k) { return {std::vector<double>(k, 0.0)}; }
};

struct PoseParams {
    Points theta;  ///< per-joint axis-angle (radians)
    Vec3 root_translation = Vec3::Zero();

    static PoseParams zeros(int joints) { return {Points(joints, Vec3::Zero()), Vec3::Zero()}; }
};

/// Deformed vertices over the template's connectivity.
struct PosedMesh {
    Points vertices;
    Faces faces;

    TriMesh to_trimesh() const { return {vertices, *faces}; }
};

/// Checks every BodyTemplate invariant; throws DataError naming the first violation.
void validate(const BodyTemplate& tmpl);

BodyTemplate build_template(const TemplateConfig& config = {});

PosedMesh apply_shape(const BodyTemplate& tmpl, const ShapeParams& beta);

/// Linear blend skinning of the shaped mesh.
PosedMesh skin(const BodyTemplate& tmpl, const ShapeParams& beta, const PoseParams& theta);

/// Shape from one subject, pose from another.
PosedMesh recombine(const BodyTemplate& tmpl, const ShapeParams& beta_target,
                    const PoseParams& theta_source);

/// World-space joint positions after forward kinematics and root translation.
/// Shape does not move joints.
Points joint_positions(const BodyTemplate& tmpl, const ShapeParams& beta, const PoseParams& theta);

/// Rotation matrix for an axis-angle vector; identity when the norm is below 1e-12.
Eigen::Matrix3d axis_angle_matrix(const Vec3& axis_angle);

/// Per-joint world rigid transforms (rotation, translation) relative to the rest pose,
/// mapping rest point x to R (x - J_rest) + t.
struct JointTransform {
    Eigen::Matrix3d rotation;
    Vec3 translation;
};
std::vector<JointTransform> forward_kinematics(const BodyTemplate& tmpl, const PoseParams& theta);

/// OBJ geometry plus a "BTPL/1" JSON sidecar for joints, weights, and blendshapes.
void save_template(const BodyTemplate& tmpl, const std::filesystem::path& obj_path,
                   const std::filesystem::path& sidecar_path);
BodyTemplate load_template(const std::filesystem::path& obj_path,
                           const std::filesystem::path& sidecar_path);

} // namespace meshlabel
