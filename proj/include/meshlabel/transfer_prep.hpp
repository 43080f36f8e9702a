#pragma once

#include "meshlabel/body_model.hpp"
#include "meshlabel/image.hpp"
#include "meshlabel/render.hpp"
#include "meshlabel/sequence.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace meshlabel {

/// Maps image point p to scale * p + (tx, ty).
struct SimilarityTransform2D {
    double scale = 1.0;
    double tx = 0.0;
    double ty = 0.0;

    static SimilarityTransform2D identity() { return {}; }
    SimilarityTransform2D inverse() const { return {1.0 / scale, -tx / scale, -ty / scale}; }
    std::array<double, 2> apply(double x, double y) const { return {scale * x + tx, scale * y + ty}; }
};

struct BoundingBox2D {
    double min_x, min_y, max_x, max_y;

    double height() const { return max_y - min_y; }
    double width() const { return max_x - min_x; }
};

BoundingBox2D projected_bbox(const PosedMesh& mesh, const Camera& cam);

/// Scale from the ratio of projected bounding-box heights; translation moves the source
/// box's bottom-center onto the target's. Throws DataError if the source box is under 1 px tall.
SimilarityTransform2D compute_alignment(const PosedMesh& source, const PosedMesh& target, const Camera& cam);

/// Per-video alignment: component-wise median of per-frame transforms.
SimilarityTransform2D median_alignment(const std::vector<SimilarityTransform2D>& per_frame);

/// Inverse-mapped bilinear resampling at pixel centers; samples outside the image are black.
RasterImage warp_image(const RasterImage& img, const SimilarityTransform2D& transform);

/// Per-pixel, per-channel arithmetic mean.
RasterImage blend_mean(const RasterImage& a, const RasterImage& b);

enum class Stage { PretrainMT, TrainDE, Transfer };

const char* to_string(Stage s);
Stage parse_stage(const std::string& s);

struct FrameRef {
    std::string id;
    Domain domain = Domain::Source;

    bool operator==(const FrameRef&) const = default;
};

enum class OutputRole {
    Reconstruction,     ///< pretraining: the pose frame itself is the target
    TargetGroundTruth,  ///< DE training: the pose frame (in the target domain) supervises
    NoGroundTruth,      ///< transfer
};

const char* to_string(OutputRole r);

struct PairingRecord {
    FrameRef appearance;
    FrameRef pose;
    OutputRole role = OutputRole::Reconstruction;
    std::optional<std::string> ground_truth;  ///< frame id of the supervision image
    std::optional<std::string> output;        ///< file written for this record, if any

    bool operator==(const PairingRecord&) const = default;
};

struct PairingPlan {
    Stage stage = Stage::PretrainMT;
    uint64_t seed = 0;
    std::vector<PairingRecord> records;

    bool operator==(const PairingPlan&) const = default;
};

/// Pretraining pairs every frame of each domain with one seeded, fixed appearance frame
/// from the same domain. DE training takes appearance from the source domain and pose
/// from the target domain; transfer swaps them. Throws ConfigError on an empty domain.
PairingPlan make_pairing_plan(Stage stage, const std::vector<std::string>& source_ids,
                              const std::vector<std::string>& target_ids, uint64_t seed);

/// "PAIR/1" JSON plan file.
void write_plan(const std::filesystem::path& path, const PairingPlan& plan);
PairingPlan read_plan(const std::filesystem::path& path);

} // namespace meshlabel
