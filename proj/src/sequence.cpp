#include "meshlabel/sequence.hpp"

#include "meshlabel/error.hpp"
#include "meshlabel/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace meshlabel {

const char* to_string(Domain d) { return d == Domain::Source ? "source" : "target"; }

Domain parse_domain(const std::string& s)
{
    if (s == "source" || s == "S") return Domain::Source;
    if (s == "target" || s == "T") return Domain::Target;
    throw ConfigError("unknown domain '" + s + "' (expected source or target)");
}

void validate(const MotionSequence& seq)
{
    if (seq.frames.empty()) throw DataError("motion sequence has no frames");
    if (!(seq.frame_rate > 0.0) || !std::isfinite(seq.frame_rate)) throw DataError("frame rate must be positive");
    const size_t nj = seq.frames.front().theta.size();
    for (size_t t = 0; t < seq.frames.size(); ++t) {
        const auto& f = seq.frames[t];
        if (f.theta.size() != nj) throw DataError("frame " + std::to_string(t) + " has a different joint count");
        for (const auto& w : f.theta)
            if (!w.allFinite()) throw DataError("non-finite pose in frame " + std::to_string(t));
        if (!f.root_translation.allFinite()) throw DataError("non-finite translation in frame " + std::to_string(t));
    }
}

MeshSequence pose_sequence_to_meshes(const BodyTemplate& tmpl, const ShapeParams& beta, const MotionSequence& seq,
                                     int threads)
{
    validate(seq);
    MeshSequence out;
    out.frames.resize(seq.frames.size());
    parallel_for(seq.frame_count(), threads, [&](int t) { out.frames[t] = skin(tmpl, beta, seq.frames[t]); });
    return out;
}

namespace {

void check_window(int window, int frames)
{
    if (frames < 1) throw DataError("cannot smooth an empty sequence");
    if (window < 1 || window % 2 == 0 || window > 2 * frames - 1)
        throw ConfigError("smoothing window must be odd and in [1, " + std::to_string(2 * frames - 1) + "], got " +
                          std::to_string(window));
}

// Mean of the window, written as v_t + mean(v_s - v_t) so a constant track is an exact
// fixed point.
template <typename Get>
Vec3 window_mean(int t, int half, int frames, Get get)
{
    const int lo = std::max(0, t - half);
    const int hi = std::min(frames - 1, t + half);
    const Vec3 center = get(t);
    Vec3 acc = Vec3::Zero();
    for (int s = lo; s <= hi; ++s) acc += get(s) - center;
    return center + acc / static_cast<double>(hi - lo + 1);
}

} // namespace

MeshSequence smooth_vertices(const MeshSequence& seq, int window)
{
    check_window(window, seq.frame_count());
    const size_t nv = seq.frames.front().vertices.size();
    for (const auto& f : seq.frames)
        if (f.vertices.size() != nv || f.faces != seq.frames.front().faces)
            throw DataError("mesh sequence frames do not share connectivity");
    if (window == 1) return seq;
    const int half = (window - 1) / 2;
    const int n = seq.frame_count();
    MeshSequence out = seq;
    for (int t = 0; t < n; ++t)
        for (size_t v = 0; v < nv; ++v)
            out.frames[t].vertices[v] = window_mean(t, half, n, [&](int s) { return seq.frames[s].vertices[v]; });
    return out;
}

std::vector<Points> smooth_tracks(const std::vector<Points>& frames, int window)
{
    check_window(window, static_cast<int>(frames.size()));
    const size_t np = frames.front().size();
    for (const auto& f : frames)
        if (f.size() != np) throw DataError("point tracks differ in length between frames");
    if (window == 1) return frames;
    const int half = (window - 1) / 2;
    const int n = static_cast<int>(frames.size());
    std::vector<Points> out = frames;
    for (int t = 0; t < n; ++t)
        for (size_t p = 0; p < np; ++p) out[t][p] = window_mean(t, half, n, [&](int s) { return frames[s][p]; });
    return out;
}

MotionSequence smooth_poses(const MotionSequence& seq, int window)
{
    validate(seq);
    check_window(window, seq.frame_count());
    if (window == 1) return seq;
    const int half = (window - 1) / 2;
    const int n = seq.frame_count();
    MotionSequence out = seq;
    for (int t = 0; t < n; ++t) {
        for (int j = 0; j < seq.joint_count(); ++j)
            out.frames[t].theta[j] = window_mean(t, half, n, [&](int s) { return seq.frames[s].theta[j]; });
        out.frames[t].root_translation =
            window_mean(t, half, n, [&](int s) { return seq.frames[s].root_translation; });
    }
    return out;
}

std::vector<FramePair> label_pairs(const std::vector<LabelImage>& labels)
{
    if (labels.empty()) throw DataError("label_pairs needs at least one label image");
    std::vector<FramePair> out;
    out.reserve(labels.size());
    for (size_t t = 0; t < labels.size(); ++t) {
        if (labels[t].width() != labels[0].width() || labels[t].height() != labels[0].height())
            throw DataError("label images differ in size");
        out.push_back({labels[t], t == 0 ? LabelImage::zeros(labels[0].width(), labels[0].height()) : labels[t - 1]});
    }
    return out;
}

void write_motion(const std::filesystem::path& path, const MotionSequence& seq)
{
    validate(seq);
    nlohmann::json j;
    j["format"] = "MSEQ/1";
    j["subject_id"] = seq.subject_id;
    j["domain"] = to_string(seq.domain);
    j["frame_rate"] = seq.frame_rate;
    j["shape_count"] = seq.shape_count;
    j["joint_count"] = seq.joint_count();
    auto& frames = j["frames"] = nlohmann::json::array();
    for (const auto& f : seq.frames) {
        auto theta = nlohmann::json::array();
        for (const auto& w : f.theta) {
            theta.push_back(w.x());
            theta.push_back(w.y());
            theta.push_back(w.z());
        }
        frames.push_back({{"theta", std::move(theta)},
                          {"root_translation", {f.root_translation.x(), f.root_translation.y(), f.root_translation.z()}}});
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open for writing: " + path.string());
    os << j.dump(1) << '\n';
}

MotionSequence read_motion(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) throw DataError("cannot open motion file: " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("motion file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object() || !j.contains("format") || j["format"] != "MSEQ/1")
        throw DataError("unsupported motion file schema version (expected \"MSEQ/1\")");
    try {
        MotionSequence seq;
        seq.subject_id = j.at("subject_id").get<std::string>();
        try {
            seq.domain = parse_domain(j.at("domain").get<std::string>());
        } catch (const ConfigError& e) {
            throw DataError(std::string("motion file: ") + e.what());
        }
        seq.frame_rate = j.at("frame_rate").get<double>();
        seq.shape_count = j.at("shape_count").get<int>();
        const int nj = j.at("joint_count").get<int>();
        for (const auto& jf : j.at("frames")) {
            const auto& th = jf.at("theta");
            if (static_cast<int>(th.size()) != 3 * nj) throw DataError("frame theta length != 3 * joint_count");
            PoseParams p = PoseParams::zeros(nj);
            for (int k = 0; k < nj; ++k)
                p.theta[k] = Vec3(th[3 * k].get<double>(), th[3 * k + 1].get<double>(), th[3 * k + 2].get<double>());
            const auto& rt = jf.at("root_translation");
            if (rt.size() != 3) throw DataError("root_translation must have 3 values");
            p.root_translation = Vec3(rt[0].get<double>(), rt[1].get<double>(), rt[2].get<double>());
            seq.frames.push_back(std::move(p));
        }
        validate(seq);
        return seq;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed motion file: " + std::string(e.what()));
    }
}

} // namespace meshlabel
