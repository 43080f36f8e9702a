#pragma once

#include "meshlabel/body_model.hpp"
#include "meshlabel/intrinsic.hpp"
#include "meshlabel/objectives.hpp"
#include "meshlabel/render.hpp"
#include "meshlabel/sequence.hpp"
#include "meshlabel/transfer_prep.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace meshlabel {

struct SubjectEntry {
    std::string id;
    ShapeParams beta;
    std::filesystem::path motion;
    Domain domain = Domain::Source;
    std::filesystem::path frames_dir;  ///< real frames, frame_%05d.png (optional)
};

enum class AlignmentMode { PerVideo, PerFrame };

struct PipelineConfig {
    TemplateConfig template_config;
    std::filesystem::path template_obj;      ///< optional import instead of the procedural body
    std::filesystem::path template_sidecar;
    std::vector<SubjectEntry> subjects;
    std::optional<Camera> camera;  ///< defaults to Camera::front_view(render size)
    int width = 256;
    int height = 256;
    int smoothing_window = 5;
    bool smooth_poses = false;
    AlignmentMode alignment = AlignmentMode::PerVideo;
    uint64_t seed = 0;
    int threads = 1;
    double limb_thickness_px = 4.0;
    double joint_radius_px = 3.0;
    std::filesystem::path mt_results_dir;  ///< raw transfer results keyed by pose frame
    std::filesystem::path output_dir = "out";

    const SubjectEntry& subject(const std::string& id) const;
    Camera resolved_camera() const;
};

/// Parses a JSON config; relative paths resolve against `base_dir`. Throws ConfigError.
PipelineConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

/// The configured template: imported when `template_obj` is set, otherwise built.
BodyTemplate resolve_template(const PipelineConfig& cfg);

/// Frame identifier "<subject>:<index>" and the matching file stem "<subject>_<index>".
std::string frame_id(const std::string& subject, int index);
std::string frame_stem(const std::string& subject, int index);

struct TemplateOutputs {
    std::filesystem::path obj;
    std::filesystem::path sidecar;
};
TemplateOutputs cmd_template(const PipelineConfig& cfg);

/// Loads the subject's colors from the "EIGB/1" cache under the output directory, computing
/// and writing them when the cache is missing or was built from a different mesh.
EigenCache subject_colors(const PipelineConfig& cfg, const BodyTemplate& tmpl, const SubjectEntry& subject);

struct LabelsOutputs {
    std::filesystem::path directory;
    std::vector<std::filesystem::path> tensors;
    std::filesystem::path pair_index;
};

/// Renders one label image per motion frame. With `pose_source_id`, poses come from that
/// subject's motion and shape from `subject_id`.
LabelsOutputs cmd_labels(const PipelineConfig& cfg, const std::string& subject_id,
                         const std::optional<std::string>& pose_source_id = std::nullopt);

struct PrepareOutputs {
    std::filesystem::path plan;
    std::vector<std::filesystem::path> blends;
};
PrepareOutputs cmd_prepare(const PipelineConfig& cfg, Stage stage);

struct MetricsRow {
    std::string name;
    double ssim = 0.0;
    double l1 = 0.0;
};
struct MetricsReport {
    std::vector<MetricsRow> rows;
    double mean_ssim = 0.0;
    double min_ssim = 0.0;
    double mean_l1 = 0.0;

    nlohmann::json to_json() const;
};

/// Compares two image files, or two directories paired by filename.
MetricsReport cmd_metrics(const std::filesystem::path& a, const std::filesystem::path& b);

/// Feature stack from LBL1 files, one file per layer (all values of a file form the layer).
FeatureStack read_feature_stack(const std::vector<std::filesystem::path>& layer_files);
/// All values of an LBL1 file, in plane order.
std::vector<double> read_tensor_values(const std::filesystem::path& path);

} // namespace meshlabel
