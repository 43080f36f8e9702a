#include "meshlabel/pipeline.hpp"

#include "meshlabel/error.hpp"
#include "meshlabel/metrics.hpp"
#include "meshlabel/parallel.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

namespace fs = std::filesystem;

namespace meshlabel {

const SubjectEntry& PipelineConfig::subject(const std::string& id) const
{
    for (const auto& s : subjects)
        if (s.id == id) return s;
    throw ConfigError("unknown subject '" + id + "'");
}

Camera PipelineConfig::resolved_camera() const
{
    Camera cam = camera ? *camera : Camera::front_view(width, height, 1.84 * template_config.height_scale);
    cam.width = width;
    cam.height = height;
    validate(cam);
    return cam;
}

namespace {

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback)
{
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

fs::path resolve_path(const fs::path& base, const std::string& p)
{
    if (p.empty()) return {};
    fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

Camera parse_camera(const nlohmann::json& j)
{
    Camera cam;
    const std::string mode = get_or<std::string>(j, "mode", "weak-perspective");
    if (mode == "weak-perspective") {
        cam.mode = Camera::Mode::WeakPerspective;
    } else if (mode == "pinhole") {
        cam.mode = Camera::Mode::Pinhole;
    } else {
        throw ConfigError("camera mode must be weak-perspective or pinhole");
    }
    cam.scale = get_or(j, "scale", cam.scale);
    cam.focal = get_or(j, "focal", cam.focal);
    if (j.contains("principal")) {
        const auto pp = j.at("principal").get<std::vector<double>>();
        if (pp.size() != 2) throw ConfigError("camera principal must have 2 values");
        cam.cx = pp[0];
        cam.cy = pp[1];
    }
    if (j.contains("rotation")) {
        const auto r = j.at("rotation").get<std::vector<double>>();
        if (r.size() != 9) throw ConfigError("camera rotation must have 9 values (row-major)");
        for (int i = 0; i < 9; ++i) cam.rotation(i / 3, i % 3) = r[i];
    }
    if (j.contains("translation")) {
        const auto t = j.at("translation").get<std::vector<double>>();
        if (t.size() != 3) throw ConfigError("camera translation must have 3 values");
        cam.translation = Vec3(t[0], t[1], t[2]);
    }
    return cam;
}

} // namespace

PipelineConfig parse_config(const nlohmann::json& j, const fs::path& base)
{
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    PipelineConfig cfg;
    try {
        if (j.contains("template")) {
            const auto& t = j.at("template");
            cfg.template_config.height_scale = get_or(t, "height_scale", cfg.template_config.height_scale);
            cfg.template_config.limb_thickness = get_or(t, "limb_thickness", cfg.template_config.limb_thickness);
            cfg.template_config.rings_per_bone = get_or(t, "rings_per_bone", cfg.template_config.rings_per_bone);
            cfg.template_config.subdivision = get_or(t, "subdivision", cfg.template_config.subdivision);
            cfg.template_config.num_shape_dirs = get_or(t, "num_shape_dirs", cfg.template_config.num_shape_dirs);
            cfg.template_obj = resolve_path(base, get_or<std::string>(t, "obj", ""));
            cfg.template_sidecar = resolve_path(base, get_or<std::string>(t, "sidecar", ""));
            if (cfg.template_obj.empty() != cfg.template_sidecar.empty())
                throw ConfigError("template import needs both obj and sidecar");
        }
        if (j.contains("subjects")) {
            for (const auto& js : j.at("subjects")) {
                SubjectEntry s;
                s.id = js.at("id").get<std::string>();
                if (s.id.empty() || s.id.find_first_of(":/\\") != std::string::npos)
                    throw ConfigError("subject id must be non-empty without ':' or path separators");
                s.beta.beta = get_or<std::vector<double>>(js, "beta", {});
                s.motion = resolve_path(base, js.at("motion").get<std::string>());
                s.domain = parse_domain(get_or<std::string>(js, "domain", "source"));
                s.frames_dir = resolve_path(base, get_or<std::string>(js, "frames_dir", ""));
                for (const auto& other : cfg.subjects)
                    if (other.id == s.id) throw ConfigError("duplicate subject id '" + s.id + "'");
                cfg.subjects.push_back(std::move(s));
            }
        }
        if (j.contains("camera")) cfg.camera = parse_camera(j.at("camera"));
        if (j.contains("render_size")) {
            const auto sz = j.at("render_size").get<std::vector<int>>();
            if (sz.size() != 2) throw ConfigError("render_size must be [width, height]");
            cfg.width = sz[0];
            cfg.height = sz[1];
        }
        cfg.smoothing_window = get_or(j, "smoothing_window", cfg.smoothing_window);
        cfg.smooth_poses = get_or(j, "smooth_poses", cfg.smooth_poses);
        const std::string align = get_or<std::string>(j, "alignment_mode", "per-video");
        if (align == "per-video") {
            cfg.alignment = AlignmentMode::PerVideo;
        } else if (align == "per-frame") {
            cfg.alignment = AlignmentMode::PerFrame;
        } else {
            throw ConfigError("alignment_mode must be per-video or per-frame");
        }
        cfg.seed = get_or<uint64_t>(j, "seed", cfg.seed);
        cfg.threads = get_or(j, "threads", cfg.threads);
        if (j.contains("skeleton")) {
            cfg.limb_thickness_px = get_or(j.at("skeleton"), "limb_thickness", cfg.limb_thickness_px);
            cfg.joint_radius_px = get_or(j.at("skeleton"), "joint_radius", cfg.joint_radius_px);
        }
        cfg.mt_results_dir = resolve_path(base, get_or<std::string>(j, "mt_results_dir", ""));
        cfg.output_dir = resolve_path(base, get_or<std::string>(j, "output_dir", "out"));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    if (cfg.width <= 0 || cfg.height <= 0) throw ConfigError("render size must be positive");
    if (cfg.smoothing_window < 1 || cfg.smoothing_window % 2 == 0)
        throw ConfigError("smoothing_window must be odd and positive");
    if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
    if (!(cfg.limb_thickness_px >= 1.0)) throw ConfigError("skeleton limb thickness must be at least 1 px");
    return cfg;
}

PipelineConfig load_config(const fs::path& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(j, path.parent_path());
}

BodyTemplate resolve_template(const PipelineConfig& cfg)
{
    if (!cfg.template_obj.empty()) return load_template(cfg.template_obj, cfg.template_sidecar);
    return build_template(cfg.template_config);
}

std::string frame_id(const std::string& subject, int index)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%05d", index);
    return subject + ":" + buf;
}

std::string frame_stem(const std::string& subject, int index)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%05d", index);
    return subject + "_" + buf;
}

namespace {

std::string frame_file(int index, const char* suffix)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "frame_%05d%s", index, suffix);
    return buf;
}

void make_dirs(const fs::path& p)
{
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw DataError("cannot create directory " + p.string() + ": " + ec.message());
}

void write_json(const fs::path& path, const nlohmann::json& j)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open for writing: " + path.string());
    os << j.dump(1) << '\n';
}

void check_beta(const BodyTemplate& tmpl, const SubjectEntry& s)
{
    if (s.beta.beta.size() != static_cast<size_t>(tmpl.shape_count()))
        throw ConfigError("subject '" + s.id + "' has " + std::to_string(s.beta.beta.size()) +
                          " shape values; template expects " + std::to_string(tmpl.shape_count()));
}

MotionSequence load_motion_for(const BodyTemplate& tmpl, const SubjectEntry& s)
{
    if (!fs::exists(s.motion)) throw DataError("motion file for subject '" + s.id + "' not found: " + s.motion.string());
    MotionSequence seq = read_motion(s.motion);
    if (seq.joint_count() != tmpl.joint_count())
        throw DataError("motion of subject '" + s.id + "' has " + std::to_string(seq.joint_count()) +
                        " joints; template has " + std::to_string(tmpl.joint_count()));
    return seq;
}

int effective_window(int window, int frames) { return std::min(window, 2 * frames - 1); }

} // namespace

TemplateOutputs cmd_template(const PipelineConfig& cfg)
{
    const BodyTemplate tmpl = resolve_template(cfg);
    const fs::path dir = cfg.output_dir / "template";
    make_dirs(dir);
    TemplateOutputs out{dir / "template.obj", dir / "template.btpl.json"};
    save_template(tmpl, out.obj, out.sidecar);
    return out;
}

EigenCache subject_colors(const PipelineConfig& cfg, const BodyTemplate& tmpl, const SubjectEntry& subject)
{
    check_beta(tmpl, subject);
    const PosedMesh rest = apply_shape(tmpl, subject.beta);
    const uint64_t digest = mesh_digest(rest.vertices, *rest.faces);
    const fs::path dir = cfg.output_dir / "cache";
    const fs::path path = dir / (subject.id + ".eigb");
    if (fs::exists(path)) {
        try {
            EigenCache cached = read_eigen_cache(path);
            if (cached.mesh_digest == digest && cached.colors.colors.size() == rest.vertices.size()) return cached;
        } catch (const DataError&) {
            // stale or corrupt cache: recompute below
        }
    }
    const Laplacian lap = cotangent_laplacian(rest.vertices, *rest.faces);
    EigenCache cache;
    cache.mesh_digest = digest;
    cache.basis = smallest_nontrivial_eigvecs(lap.L, lap.mass, 3);
    cache.colors = eigvecs_to_colors(cache.basis);
    make_dirs(dir);
    write_eigen_cache(path, cache);
    return cache;
}

LabelsOutputs cmd_labels(const PipelineConfig& cfg, const std::string& subject_id,
                         const std::optional<std::string>& pose_source_id)
{
    const BodyTemplate tmpl = resolve_template(cfg);
    const SubjectEntry& subject = cfg.subject(subject_id);
    check_beta(tmpl, subject);
    const SubjectEntry& pose_subject = pose_source_id ? cfg.subject(*pose_source_id) : subject;
    MotionSequence motion = load_motion_for(tmpl, pose_subject);
    const int n = motion.frame_count();
    const int window = effective_window(cfg.smoothing_window, n);
    if (cfg.smooth_poses) motion = smooth_poses(motion, window);

    const EigenCache colors = subject_colors(cfg, tmpl, subject);
    const Camera cam = cfg.resolved_camera();

    // Shape of the subject, pose of the pose source.
    MeshSequence meshes = pose_sequence_to_meshes(tmpl, subject.beta, motion, cfg.threads);
    if (!cfg.smooth_poses) meshes = smooth_vertices(meshes, window);
    std::vector<Points> joints(n);
    for (int t = 0; t < n; ++t) joints[t] = joint_positions(tmpl, subject.beta, motion.frames[t]);
    if (!cfg.smooth_poses) joints = smooth_tracks(joints, window);

    const SkeletonFigureSpec spec =
        SkeletonFigureSpec::from_parents(tmpl.joint_parents, cfg.limb_thickness_px, cfg.joint_radius_px);

    LabelsOutputs out;
    out.directory = cfg.output_dir / "labels" / (pose_source_id ? subject_id + "__pose_" + *pose_source_id : subject_id);
    make_dirs(out.directory);
    out.tensors.resize(n);
    parallel_for(n, cfg.threads, [&](int t) {
        const RasterImage mesh_img = rasterize_mesh(meshes.frames[t], colors.colors, cam);
        const auto joints2d = project_vertices(cam, joints[t]);
        const RasterImage pose_img = render_skeleton(joints2d, spec, cam.width, cam.height);
        const LabelImage label = make_label_image(mesh_img, pose_img);
        out.tensors[t] = out.directory / frame_file(t, ".lbl");
        write_tensor(out.tensors[t], label.image());
        write_png(out.directory / frame_file(t, "_mesh.png"), mesh_img);
        write_png(out.directory / frame_file(t, "_pose.png"), pose_img);
    });

    nlohmann::json index;
    index["subject"] = subject_id;
    index["pose_source"] = pose_source_id ? nlohmann::json(*pose_source_id) : nlohmann::json(nullptr);
    index["frame_rate"] = motion.frame_rate;
    index["width"] = cam.width;
    index["height"] = cam.height;
    auto& pairs = index["pairs"] = nlohmann::json::array();
    for (int t = 0; t < n; ++t)
        pairs.push_back({{"current", frame_file(t, ".lbl")},
                         {"previous", t == 0 ? nlohmann::json(nullptr) : nlohmann::json(frame_file(t - 1, ".lbl"))}});
    out.pair_index = out.directory / "pairs.json";
    write_json(out.pair_index, index);
    return out;
}

namespace {

struct SubjectMotion {
    const SubjectEntry* entry;
    MotionSequence motion;
    Vec3 mean_root = Vec3::Zero();
};

RasterImage load_frame(const fs::path& path, const std::string& what)
{
    if (!fs::exists(path)) throw DataError("missing " + what + ": " + path.string());
    return read_image(path);
}

} // namespace

PrepareOutputs cmd_prepare(const PipelineConfig& cfg, Stage stage)
{
    for (Domain d : {Domain::Source, Domain::Target})
        if (std::none_of(cfg.subjects.begin(), cfg.subjects.end(), [d](const SubjectEntry& s) { return s.domain == d; }))
            throw ConfigError("stage " + std::string(to_string(stage)) + " needs at least one " + to_string(d) +
                              " subject");
    const BodyTemplate tmpl = resolve_template(cfg);
    std::map<std::string, SubjectMotion> subjects;
    std::vector<std::string> source_ids, target_ids;
    std::map<std::string, std::pair<std::string, int>> frames;  // frame id -> (subject, index)
    for (const auto& s : cfg.subjects) {
        check_beta(tmpl, s);
        SubjectMotion sm{&s, load_motion_for(tmpl, s)};
        for (const auto& f : sm.motion.frames) sm.mean_root += f.root_translation;
        sm.mean_root /= sm.motion.frame_count();
        for (int t = 0; t < sm.motion.frame_count(); ++t) {
            const std::string id = frame_id(s.id, t);
            frames[id] = {s.id, t};
            (s.domain == Domain::Source ? source_ids : target_ids).push_back(id);
        }
        subjects.emplace(s.id, std::move(sm));
    }
    PairingPlan plan = make_pairing_plan(stage, source_ids, target_ids, cfg.seed);
    const fs::path dir = cfg.output_dir / "prepare" / to_string(stage);
    make_dirs(dir);
    PrepareOutputs out;
    out.plan = dir / "plan.pair.json";

    if (stage != Stage::PretrainMT) {
        if (cfg.mt_results_dir.empty()) throw ConfigError("mt_results_dir is required for " + std::string(to_string(stage)));
        const Camera cam = cfg.resolved_camera();
        const int nrec = static_cast<int>(plan.records.size());

        // The source-domain body is aligned to the target-domain body in the pose frame's pose,
        // each placed at its own subject's mean root position.
        std::vector<SimilarityTransform2D> transforms(nrec);
        parallel_for(nrec, cfg.threads, [&](int r) {
            const auto& rec = plan.records[r];
            const auto& [pose_subject, pose_index] = frames.at(rec.pose.id);
            const auto& app_subject = frames.at(rec.appearance.id).first;
            const SubjectMotion& ps = subjects.at(pose_subject);
            const SubjectMotion& as = subjects.at(app_subject);
            const PoseParams& pose = ps.motion.frames[pose_index];
            PoseParams moved = pose;
            moved.root_translation += as.mean_root - ps.mean_root;
            const PosedMesh pose_side = skin(tmpl, ps.entry->beta, pose);
            const PosedMesh app_side = skin(tmpl, as.entry->beta, moved);
            transforms[r] = stage == Stage::TrainDE ? compute_alignment(app_side, pose_side, cam)
                                                    : compute_alignment(pose_side, app_side, cam);
        });
        if (cfg.alignment == AlignmentMode::PerVideo) {
            const auto median = median_alignment(transforms);
            std::fill(transforms.begin(), transforms.end(), median);
        }

        make_dirs(dir / "aligned");
        make_dirs(dir / "blended");
        out.blends.resize(nrec);
        parallel_for(nrec, cfg.threads, [&](int r) {
            auto& rec = plan.records[r];
            const auto& [pose_subject, pose_index] = frames.at(rec.pose.id);
            const std::string stem = frame_stem(pose_subject, pose_index);
            const SubjectEntry& ps = *subjects.at(pose_subject).entry;
            const fs::path real = ps.frames_dir / frame_file(pose_index, ".png");
            const fs::path mt = cfg.mt_results_dir / (stem + ".png");
            // Train-DE: (I_T2S, I_T); transfer: (I_S, I_S2T). The source-side image is warped.
            RasterImage source_side, target_side;
            if (stage == Stage::TrainDE) {
                source_side = load_frame(mt, "transfer result");
                target_side = load_frame(real, "real frame");
            } else {
                source_side = load_frame(real, "real frame");
                target_side = load_frame(mt, "transfer result");
            }
            const RasterImage aligned = warp_image(source_side, transforms[r]);
            const RasterImage blended = blend_mean(aligned, target_side);
            write_png(dir / "aligned" / (stem + ".png"), aligned);
            out.blends[r] = dir / "blended" / (stem + ".png");
            write_png(out.blends[r], blended);
            rec.output = "blended/" + stem + ".png";
        });

        nlohmann::json jt = nlohmann::json::array();
        for (int r = 0; r < nrec; ++r)
            jt.push_back({{"pose", plan.records[r].pose.id},
                          {"scale", transforms[r].scale},
                          {"tx", transforms[r].tx},
                          {"ty", transforms[r].ty}});
        write_json(dir / "alignment.json", jt);
    }
    write_plan(out.plan, plan);
    return out;
}

nlohmann::json MetricsReport::to_json() const
{
    nlohmann::json j;
    auto& frames = j["frames"] = nlohmann::json::array();
    for (const auto& r : rows) frames.push_back({{"name", r.name}, {"ssim", r.ssim}, {"l1", r.l1}});
    j["count"] = rows.size();
    j["mean_ssim"] = mean_ssim;
    j["min_ssim"] = min_ssim;
    j["mean_l1"] = mean_l1;
    return j;
}

MetricsReport cmd_metrics(const fs::path& a, const fs::path& b)
{
    std::vector<std::pair<std::string, std::pair<fs::path, fs::path>>> pairs;
    if (fs::is_directory(a) != fs::is_directory(b)) throw ConfigError("metrics: compare two files or two directories");
    if (fs::is_directory(a)) {
        auto list = [](const fs::path& d) {
            std::set<std::string> names;
            for (const auto& e : fs::directory_iterator(d)) {
                const auto ext = e.path().extension();
                if (e.is_regular_file() && (ext == ".png" || ext == ".lbl")) names.insert(e.path().filename().string());
            }
            return names;
        };
        const auto na = list(a), nb = list(b);
        if (na != nb) throw DataError("metrics: image file sets differ between " + a.string() + " and " + b.string());
        if (na.empty()) throw DataError("metrics: no images found in " + a.string());
        for (const auto& n : na) pairs.push_back({n, {a / n, b / n}});
    } else {
        pairs.push_back({a.filename().string(), {a, b}});
    }
    MetricsReport rep;
    for (const auto& [name, paths] : pairs) {
        const RasterImage ia = read_image(paths.first);
        const RasterImage ib = read_image(paths.second);
        rep.rows.push_back({name, ssim(ia, ib), pixel_l1(ia, ib)});
    }
    rep.min_ssim = rep.rows.front().ssim;
    for (const auto& r : rep.rows) {
        rep.mean_ssim += r.ssim;
        rep.mean_l1 += r.l1;
        rep.min_ssim = std::min(rep.min_ssim, r.ssim);
    }
    rep.mean_ssim /= static_cast<double>(rep.rows.size());
    rep.mean_l1 /= static_cast<double>(rep.rows.size());
    return rep;
}

std::vector<double> read_tensor_values(const fs::path& path)
{
    const RasterImage img = read_tensor(path);
    std::vector<double> out;
    out.reserve(img.data.size());
    for (int c = 0; c < img.channels; ++c)
        for (size_t p = 0; p < img.pixel_count(); ++p) out.push_back(img.data[p * img.channels + c]);
    return out;
}

FeatureStack read_feature_stack(const std::vector<fs::path>& layer_files)
{
    FeatureStack fs_;
    for (const auto& p : layer_files) fs_.layers.push_back(read_tensor_values(p));
    return fs_;
}

} // namespace meshlabel
