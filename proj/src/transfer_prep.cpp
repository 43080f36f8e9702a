#include "meshlabel/transfer_prep.hpp"

#include "meshlabel/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

namespace meshlabel {

BoundingBox2D projected_bbox(const PosedMesh& mesh, const Camera& cam)
{
    if (mesh.vertices.empty()) throw DataError("cannot align an empty mesh");
    const auto proj = project_vertices(cam, mesh.vertices);
    BoundingBox2D box{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                      -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& p : proj) {
        if (p.clipped) throw DataError("mesh is not projectable: vertex behind the near plane");
        box.min_x = std::min(box.min_x, p.x);
        box.max_x = std::max(box.max_x, p.x);
        box.min_y = std::min(box.min_y, p.y);
        box.max_y = std::max(box.max_y, p.y);
    }
    return box;
}

SimilarityTransform2D compute_alignment(const PosedMesh& source, const PosedMesh& target, const Camera& cam)
{
    const auto src = projected_bbox(source, cam);
    const auto dst = projected_bbox(target, cam);
    if (!(src.height() >= 1.0)) throw DataError("degenerate source bounding box (height < 1 px)");
    if (!(dst.height() >= 1.0)) throw DataError("degenerate target bounding box (height < 1 px)");
    SimilarityTransform2D t;
    t.scale = dst.height() / src.height();
    // Bottom-center anchors; image y grows downward so the bottom is max_y.
    const double sx = 0.5 * (src.min_x + src.max_x), sy = src.max_y;
    const double dx = 0.5 * (dst.min_x + dst.max_x), dy = dst.max_y;
    t.tx = dx - t.scale * sx;
    t.ty = dy - t.scale * sy;
    return t;
}

SimilarityTransform2D median_alignment(const std::vector<SimilarityTransform2D>& per_frame)
{
    if (per_frame.empty()) throw DataError("no per-frame alignments to aggregate");
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    std::vector<double> s, x, y;
    for (const auto& t : per_frame) {
        s.push_back(t.scale);
        x.push_back(t.tx);
        y.push_back(t.ty);
    }
    return {median(s), median(x), median(y)};
}

RasterImage warp_image(const RasterImage& img, const SimilarityTransform2D& t)
{
    if (!(t.scale > 0.0) || !std::isfinite(t.scale) || !std::isfinite(t.tx) || !std::isfinite(t.ty))
        throw ConfigError("similarity transform must have finite parameters and positive scale");
    RasterImage out(img.width, img.height, img.channels);
    const int C = img.channels;
    auto texel = [&](int x, int y, int c) -> double {
        if (x < 0 || y < 0 || x >= img.width || y >= img.height) return 0.0;
        return img.at(x, y, c);
    };
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            const double u = (x + 0.5 - t.tx) / t.scale - 0.5;
            const double v = (y + 0.5 - t.ty) / t.scale - 0.5;
            const double fu = std::floor(u), fv = std::floor(v);
            const int x0 = static_cast<int>(fu), y0 = static_cast<int>(fv);
            const double ax = u - fu, ay = v - fv;
            for (int c = 0; c < C; ++c) {
                const double top = texel(x0, y0, c) * (1.0 - ax) + texel(x0 + 1, y0, c) * ax;
                const double bottom = texel(x0, y0 + 1, c) * (1.0 - ax) + texel(x0 + 1, y0 + 1, c) * ax;
                out.at(x, y, c) = static_cast<float>(top * (1.0 - ay) + bottom * ay);
            }
        }
    }
    return out;
}

RasterImage blend_mean(const RasterImage& a, const RasterImage& b)
{
    if (!a.same_shape(b)) throw DataError("blend_mean: image shapes differ");
    RasterImage out(a.width, a.height, a.channels);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] = (a.data[i] + b.data[i]) * 0.5f;
    return out;
}

const char* to_string(Stage s)
{
    switch (s) {
    case Stage::PretrainMT: return "pretrain-MT";
    case Stage::TrainDE: return "train-DE";
    case Stage::Transfer: return "transfer";
    }
    return "?";
}

Stage parse_stage(const std::string& s)
{
    if (s == "pretrain-MT" || s == "pretrain") return Stage::PretrainMT;
    if (s == "train-DE") return Stage::TrainDE;
    if (s == "transfer") return Stage::Transfer;
    throw ConfigError("unknown stage '" + s + "' (expected pretrain-MT, train-DE, or transfer)");
}

const char* to_string(OutputRole r)
{
    switch (r) {
    case OutputRole::Reconstruction: return "reconstruction";
    case OutputRole::TargetGroundTruth: return "target-ground-truth";
    case OutputRole::NoGroundTruth: return "no-ground-truth";
    }
    return "?";
}

namespace {

OutputRole parse_role(const std::string& s)
{
    if (s == "reconstruction") return OutputRole::Reconstruction;
    if (s == "target-ground-truth") return OutputRole::TargetGroundTruth;
    if (s == "no-ground-truth") return OutputRole::NoGroundTruth;
    throw DataError("unknown record role '" + s + "'");
}

// Seeded index draw; independent per domain so adding target frames never changes the
// source-domain choice.
size_t draw_index(uint64_t seed, Domain d, size_t n)
{
    std::mt19937_64 rng(seed ^ (d == Domain::Source ? 0x5eed5eed0001ull : 0x5eed5eed0002ull));
    return static_cast<size_t>(rng() % n);
}

} // namespace

PairingPlan make_pairing_plan(Stage stage, const std::vector<std::string>& source_ids,
                              const std::vector<std::string>& target_ids, uint64_t seed)
{
    if (source_ids.empty()) throw ConfigError("source domain has no frames");
    if (target_ids.empty()) throw ConfigError("target domain has no frames");
    PairingPlan plan;
    plan.stage = stage;
    plan.seed = seed;
    auto fixed = [&](Domain d) {
        const auto& ids = d == Domain::Source ? source_ids : target_ids;
        return FrameRef{ids[draw_index(seed, d, ids.size())], d};
    };
    switch (stage) {
    case Stage::PretrainMT:
        for (Domain d : {Domain::Source, Domain::Target}) {
            const FrameRef app = fixed(d);
            for (const auto& id : d == Domain::Source ? source_ids : target_ids)
                plan.records.push_back({app, {id, d}, OutputRole::Reconstruction, id, std::nullopt});
        }
        break;
    case Stage::TrainDE: {
        const FrameRef app = fixed(Domain::Source);
        for (const auto& id : target_ids)
            plan.records.push_back({app, {id, Domain::Target}, OutputRole::TargetGroundTruth, id, std::nullopt});
        break;
    }
    case Stage::Transfer: {
        const FrameRef app = fixed(Domain::Target);
        for (const auto& id : source_ids)
            plan.records.push_back({app, {id, Domain::Source}, OutputRole::NoGroundTruth, std::nullopt, std::nullopt});
        break;
    }
    }
    return plan;
}

void write_plan(const std::filesystem::path& path, const PairingPlan& plan)
{
    nlohmann::json j;
    j["format"] = "PAIR/1";
    j["stage"] = to_string(plan.stage);
    j["seed"] = plan.seed;
    auto& recs = j["records"] = nlohmann::json::array();
    for (const auto& r : plan.records) {
        nlohmann::json jr;
        jr["appearance"] = {{"id", r.appearance.id}, {"domain", to_string(r.appearance.domain)}};
        jr["pose"] = {{"id", r.pose.id}, {"domain", to_string(r.pose.domain)}};
        jr["role"] = to_string(r.role);
        jr["ground_truth"] = r.ground_truth ? nlohmann::json(*r.ground_truth) : nlohmann::json(nullptr);
        if (r.output) jr["output"] = *r.output;
        recs.push_back(std::move(jr));
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open for writing: " + path.string());
    os << j.dump(1) << '\n';
}

PairingPlan read_plan(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) throw DataError("cannot open plan file: " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("plan file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object() || !j.contains("format") || j["format"] != "PAIR/1")
        throw DataError("unsupported plan schema version (expected \"PAIR/1\")");
    try {
        PairingPlan plan;
        plan.stage = parse_stage(j.at("stage").get<std::string>());
        plan.seed = j.at("seed").get<uint64_t>();
        for (const auto& jr : j.at("records")) {
            PairingRecord r;
            r.appearance = {jr.at("appearance").at("id").get<std::string>(),
                            parse_domain(jr.at("appearance").at("domain").get<std::string>())};
            r.pose = {jr.at("pose").at("id").get<std::string>(), parse_domain(jr.at("pose").at("domain").get<std::string>())};
            r.role = parse_role(jr.at("role").get<std::string>());
            if (!jr.at("ground_truth").is_null()) r.ground_truth = jr.at("ground_truth").get<std::string>();
            if (jr.contains("output")) r.output = jr.at("output").get<std::string>();
            plan.records.push_back(std::move(r));
        }
        return plan;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed plan file: " + std::string(e.what()));
    } catch (const ConfigError& e) {
        throw DataError("malformed plan file: " + std::string(e.what()));
    }
}

} // namespace meshlabel
