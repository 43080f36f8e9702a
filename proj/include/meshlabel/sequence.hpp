#pragma once

#include "meshlabel/body_model.hpp"
#include "meshlabel/render.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace meshlabel {

enum class Domain { Source, Target };

const char* to_string(Domain d);
Domain parse_domain(const std::string& s);

struct MotionSequence {
    std::vector<PoseParams> frames;
    double frame_rate = 30.0;
    std::string subject_id;
    Domain domain = Domain::Source;
    int shape_count = 0;  ///< K of the body model the motion was captured against

    int frame_count() const { return static_cast<int>(frames.size()); }
    int joint_count() const { return frames.empty() ? 0 : static_cast<int>(frames.front().theta.size()); }
};

void validate(const MotionSequence& seq);

struct MeshSequence {
    std::vector<PosedMesh> frames;

    int frame_count() const { return static_cast<int>(frames.size()); }
};

struct FramePair {
    LabelImage current;
    LabelImage previous;
};

/// Frame-wise skin(); `threads` never changes the result.
MeshSequence pose_sequence_to_meshes(const BodyTemplate& tmpl, const ShapeParams& beta, const MotionSequence& seq,
                                     int threads = 1);

/// Centered moving average of every vertex coordinate over `window` (odd) frames.
/// Boundary frames average over the frames that exist.
MeshSequence smooth_vertices(const MeshSequence& seq, int window);

/// Same kernel applied to raw point tracks (e.g. joint positions), frame-major.
std::vector<Points> smooth_tracks(const std::vector<Points>& frames, int window);

/// Same kernel on axis-angle pose parameters and root translation. Off by default in
/// the pipeline; averaging axis-angle vectors is only meaningful for small variations.
MotionSequence smooth_poses(const MotionSequence& seq, int window);

/// Pairs each label with its predecessor; frame 0 gets an all-zero previous image.
std::vector<FramePair> label_pairs(const std::vector<LabelImage>& labels);

/// "MSEQ/1" JSON motion file.
void write_motion(const std::filesystem::path& path, const MotionSequence& seq);
MotionSequence read_motion(const std::filesystem::path& path);

} // namespace meshlabel
