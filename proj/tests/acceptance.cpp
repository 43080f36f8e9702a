// Acceptance suite: one PASS/FAIL line per criterion. Exit status is non-zero if any fails.
#include "support.hpp"

#include "meshlabel/error.hpp"
#include "meshlabel/metrics.hpp"
#include "meshlabel/objectives.hpp"
#include "meshlabel/pipeline.hpp"

#include <Eigen/Geometry>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

using namespace meshlabel;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            if (pass) detail << "failed: ";
            else detail << "; ";
            detail << what;
            pass = false;
        }
    }
};

TriMesh torus(int major, int minor, double R, double r)
{
    TriMesh m;
    for (int i = 0; i < major; ++i)
        for (int j = 0; j < minor; ++j) {
            const double u = 2 * M_PI * i / major, v = 2 * M_PI * j / minor;
            m.vertices.emplace_back((R + r * std::cos(v)) * std::cos(u), r * std::sin(v), (R + r * std::cos(v)) * std::sin(u));
        }
    auto id = [&](int i, int j) { return ((i + major) % major) * minor + (j + minor) % minor; };
    for (int i = 0; i < major; ++i)
        for (int j = 0; j < minor; ++j) {
            m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return m;
}

std::vector<std::pair<std::string, TriMesh>> criterion_meshes(const fs::path& tmp)
{
    write_obj(tmp / "torus.obj", torus(24, 12, 1.0, 0.35));
    return {{"tetrahedron", regular_tetrahedron(1.0)},
            {"icosphere-1", icosphere(1)},
            {"icosphere-3", icosphere(3)},
            {"humanoid", build_template().rest_mesh()},
            {"imported-obj", read_obj(tmp / "torus.obj")}};
}

Outcome c1_eigensolver(const fs::path& tmp)
{
    Outcome o;
    const auto t0 = Clock::now();
    double worst_rel = 0.0, worst_orth = 0.0;
    for (const auto& [name, mesh] : criterion_meshes(tmp)) {
        const Laplacian lap = cotangent_laplacian(mesh.vertices, mesh.faces);
        const EigenBasis b = smallest_nontrivial_eigvecs(lap.L, lap.mass, 3);
        const auto oracle = testing::dense_generalized_eigenvalues(lap);
        for (int i = 0; i < 3; ++i) worst_rel = std::max(worst_rel, std::abs(b.eigenvalues[i] - oracle[i + 1]) / oracle[i + 1]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double d = (b.eigenvectors[i].array() * b.eigenvectors[j].array() * lap.mass.array()).sum();
                worst_orth = std::max(worst_orth, std::abs(d - (i == j ? 1.0 : 0.0)));
            }
        o.detail << name << "[" << mesh.vertices.size() << "v," << b.diagnostics.method << "] ";
    }
    const double secs = seconds_since(t0);
    o.detail << "max rel err " << worst_rel << ", max orth err " << worst_orth << ", " << secs << " s";
    o.require(worst_rel < 1e-6, "eigenvalue mismatch");
    o.require(worst_orth < 1e-6, "mass-orthonormality");
    o.require(secs < 30.0, "runtime");
    return o;
}

Outcome c2_laplacian(const fs::path& tmp)
{
    Outcome o;
    double worst_row = 0.0;
    bool symmetric = true;
    for (const auto& [name, mesh] : criterion_meshes(tmp)) {
        const Laplacian lap = cotangent_laplacian(mesh.vertices, mesh.faces);
        const Eigen::SparseMatrix<double> Lt = lap.L.transpose();
        symmetric = symmetric && (lap.L - Lt).norm() == 0.0;
        const Eigen::VectorXd rows = lap.L * Eigen::VectorXd::Ones(lap.L.cols());
        worst_row = std::max(worst_row, rows.cwiseAbs().maxCoeff());
    }
    const Laplacian tet = cotangent_laplacian(regular_tetrahedron(1.0).vertices, regular_tetrahedron(1.0).faces);
    double worst_w = 0.0;
    for (int k = 0; k < tet.L.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(tet.L, k); it; ++it)
            if (it.row() != it.col()) worst_w = std::max(worst_w, std::abs(it.value() + 1.0 / std::sqrt(3.0)));
    o.detail << "max |row sum| " << worst_row << ", symmetric " << (symmetric ? "yes" : "no")
             << ", tetrahedron weight error " << worst_w;
    o.require(worst_row < 1e-9, "row sums");
    o.require(symmetric, "symmetry");
    o.require(worst_w < 1e-9, "tetrahedron weight");
    return o;
}

// Two triangles overlapping in screen space whose depths cross.
void add_crossing_pair(std::vector<ProjectedPoint>& v, std::vector<Face>& f, std::vector<Rgb>& c, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(8.0, 56.0), col(0.0, 1.0);
    const double cx = u(rng), cy = u(rng);
    const int base = static_cast<int>(v.size());
    v.push_back({cx - 20, cy - 12, 1.0, false});
    v.push_back({cx + 20, cy - 12, 3.0, false});
    v.push_back({cx, cy + 18, 2.0, false});
    v.push_back({cx - 20, cy + 12, 3.0, false});
    v.push_back({cx + 20, cy + 12, 1.0, false});
    v.push_back({cx, cy - 18, 2.0, false});
    for (int k = 0; k < 6; ++k) c.push_back({col(rng), col(rng), col(rng)});
    f.push_back({base, base + 1, base + 2});
    f.push_back({base + 3, base + 4, base + 5});
}

bool interpenetrates(const std::vector<ProjectedPoint>& v, const std::vector<Face>& f, const std::vector<Rgb>& c, size_t a,
                     size_t b)
{
    const RasterImage ia = testing::oracle_rasterize(v, std::vector<Face>{f[a]}, c, 64, 64, false);
    const RasterImage ib = testing::oracle_rasterize(v, std::vector<Face>{f[b]}, c, 64, 64, false);
    bool a_front = false, b_front = false;
    for (size_t p = 0; p < ia.pixel_count(); ++p) {
        if (ia.depth[p] == RasterImage::kEmptyDepth || ib.depth[p] == RasterImage::kEmptyDepth) continue;
        a_front = a_front || ia.depth[p] < ib.depth[p];
        b_front = b_front || ib.depth[p] < ia.depth[p];
    }
    return a_front && b_front;
}

Outcome c3_rasterizer()
{
    Outcome o;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> pos(-10.0, 74.0), depth(0.5, 6.0), col(0.0, 1.0);
    std::uniform_int_distribution<int> count(1, 28);
    int identical = 0, crossing = 0;
    for (int s = 0; s < 100; ++s) {
        std::vector<ProjectedPoint> v;
        std::vector<Face> f;
        std::vector<Rgb> c;
        const bool with_pair = s % 4 == 0;
        if (with_pair) add_crossing_pair(v, f, c, rng);
        const int n = std::min(count(rng), 30 - static_cast<int>(f.size()));
        for (int t = 0; t < n; ++t) {
            const int base = static_cast<int>(v.size());
            for (int k = 0; k < 3; ++k) {
                ProjectedPoint p{pos(rng), pos(rng), depth(rng), false};
                if (s % 3 == 1) {
                    p.x = std::round(2 * p.x) / 2;
                    p.y = std::round(2 * p.y) / 2;
                }
                v.push_back(p);
                c.push_back({col(rng), col(rng), col(rng)});
            }
            f.push_back({base, base + 1, base + 2});
        }
        bool scene_crosses = with_pair && interpenetrates(v, f, c, 0, 1);
        for (size_t a = 0; a < f.size() && !scene_crosses; ++a)
            for (size_t b = a + 1; b < f.size() && !scene_crosses; ++b) scene_crosses = interpenetrates(v, f, c, a, b);
        crossing += scene_crosses;
        bool same = true;
        for (bool persp : {false, true}) {
            const RasterImage got = rasterize_triangles(v, f, c, 64, 64, persp);
            const RasterImage ref = testing::oracle_rasterize(v, f, c, 64, 64, persp);
            same = same && got.data == ref.data && got.depth == ref.depth;
        }
        identical += same;
    }
    const double secs = seconds_since(t0);
    o.detail << identical << "/100 scenes identical (weak and pinhole), " << crossing << " with interpenetration, "
             << secs << " s";
    o.require(identical == 100, "image/depth mismatch");
    o.require(crossing >= 20, "too few interpenetrating scenes");
    o.require(secs < 60.0, "runtime");
    return o;
}

Outcome c4_skinning()
{
    Outcome o;
    const BodyTemplate t = build_template();
    std::mt19937_64 rng(404);
    double zero_dev = 0.0, rot_dev = 0.0;
    int bitwise = 0;
    for (int d = 0; d < 50; ++d) {
        const auto beta = testing::random_shape(t.shape_count(), rng, 2.0);
        const auto pose = testing::random_pose(t.joint_count(), rng, 1.2);
        const auto shaped = apply_shape(t, beta);
        const auto z = skin(t, beta, PoseParams::zeros(t.joint_count()));
        for (int i = 0; i < t.vertex_count(); ++i) zero_dev = std::max(zero_dev, (z.vertices[i] - shaped.vertices[i]).cwiseAbs().maxCoeff());

        const Eigen::Matrix3d G = axis_angle_matrix(testing::random_pose(1, rng, 3.0).theta[0]);
        PoseParams rotated = pose;
        const Eigen::AngleAxisd aa(G * axis_angle_matrix(pose.theta[t.root_joint()]));
        rotated.theta[t.root_joint()] = aa.axis() * aa.angle();
        const auto a = skin(t, beta, pose), b = skin(t, beta, rotated);
        const Vec3 J = t.joints_rest[t.root_joint()], tr = pose.root_translation;
        for (int i = 0; i < t.vertex_count(); ++i)
            rot_dev = std::max(rot_dev, (b.vertices[i] - (G * (a.vertices[i] - tr - J) + J + tr)).norm());

        bitwise += recombine(t, beta, pose).vertices == a.vertices;
    }
    o.detail << "zero-pose dev " << zero_dev << ", rotation dev " << rot_dev << ", recombine bitwise " << bitwise << "/50";
    o.require(zero_dev < 1e-12, "zero-pose identity");
    o.require(rot_dev < 1e-9, "rotation equivariance");
    o.require(bitwise == 50, "recombine");
    return o;
}

Outcome c5_smoothing()
{
    Outcome o;
    std::mt19937_64 rng(55);
    std::normal_distribution<double> n(0.0, 1.0);
    auto faces = std::make_shared<const std::vector<Face>>();

    MeshSequence constant;
    Points p(50);
    for (auto& x : p) x = Vec3(n(rng), n(rng), n(rng));
    for (int t = 0; t < 12; ++t) constant.frames.push_back({p, faces});
    bool fixed = true;
    for (int w : {1, 3, 5, 7, 23})
        for (const auto& f : smooth_vertices(constant, w).frames) fixed = fixed && f.vertices == p;

    MeshSequence linear;
    const Vec3 p0(n(rng), n(rng), n(rng)), vel(n(rng), n(rng), n(rng));
    for (int t = 0; t < 20; ++t) linear.frames.push_back({Points{p0 + t * vel}, faces});
    const MeshSequence sl = smooth_vertices(linear, 3);
    double lin_dev = 0.0;
    for (int t = 1; t < 19; ++t) lin_dev = std::max(lin_dev, (sl.frames[t].vertices[0] - linear.frames[t].vertices[0]).norm());

    int tv_ok = 0;
    for (int s = 0; s < 20; ++s) {
        MeshSequence seq;
        Points cur(8, Vec3::Zero());
        for (int t = 0; t < 30; ++t) {
            for (auto& v : cur) v += Vec3(n(rng), n(rng), n(rng));
            seq.frames.push_back({cur, faces});
        }
        const MeshSequence sm = smooth_vertices(seq, 3 + 2 * (s % 4));
        bool ok = true;
        for (size_t v = 0; v < cur.size(); ++v) {
            double a = 0.0, b = 0.0;
            for (int t = 0; t + 1 < 30; ++t) {
                a += (seq.frames[t + 1].vertices[v] - seq.frames[t].vertices[v]).norm();
                b += (sm.frames[t + 1].vertices[v] - sm.frames[t].vertices[v]).norm();
            }
            ok = ok && b <= a;
        }
        tv_ok += ok;
    }
    o.detail << "constant fixed point " << (fixed ? "exact" : "broken") << ", linear interior dev " << lin_dev
             << ", TV non-increase " << tv_ok << "/20";
    o.require(fixed, "constant fixed point");
    o.require(lin_dev < 1e-12, "linear preservation");
    o.require(tv_ok == 20, "total variation");
    return o;
}

Outcome c6_pairing()
{
    Outcome o;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(66);
    std::uniform_int_distribution<int> size(1, 25);
    int passed = 0;
    for (int check = 0; check < 1000; ++check) {
        std::vector<std::string> S, T;
        const int ns = size(rng), nt = size(rng);
        for (int i = 0; i < ns; ++i) S.push_back("s" + std::to_string(check) + ":" + std::to_string(i));
        for (int i = 0; i < nt; ++i) T.push_back("t" + std::to_string(check) + ":" + std::to_string(i));
        const uint64_t seed = rng();
        bool ok = true;
        switch (check % 3) {
        case 0: {
            const PairingPlan p = make_pairing_plan(Stage::PretrainMT, S, T, seed);
            std::set<std::string> app[2];
            std::multiset<std::string> poses;
            for (const auto& r : p.records) {
                ok = ok && r.appearance.domain == r.pose.domain;
                app[static_cast<int>(r.pose.domain)].insert(r.appearance.id);
                poses.insert(r.pose.id);
            }
            ok = ok && app[0].size() == 1 && app[1].size() == 1 && poses.size() == S.size() + T.size();
            ok = ok && std::find(S.begin(), S.end(), *app[0].begin()) != S.end();
            ok = ok && std::find(T.begin(), T.end(), *app[1].begin()) != T.end();
            ok = ok && p == make_pairing_plan(Stage::PretrainMT, S, T, seed);
            break;
        }
        case 1: {
            const PairingPlan p = make_pairing_plan(Stage::TrainDE, S, T, seed);
            for (const auto& r : p.records)
                ok = ok && r.appearance.domain == Domain::Source && r.pose.domain == Domain::Target &&
                     std::find(S.begin(), S.end(), r.appearance.id) != S.end() &&
                     std::find(T.begin(), T.end(), r.pose.id) != T.end() && r.ground_truth == r.pose.id;
            ok = ok && p.records.size() == T.size();
            break;
        }
        default: {
            const PairingPlan de = make_pairing_plan(Stage::TrainDE, S, T, seed);
            const PairingPlan tr = make_pairing_plan(Stage::Transfer, S, T, seed);
            for (const auto& r : tr.records)
                ok = ok && r.appearance.domain == de.records.front().pose.domain &&
                     r.pose.domain == de.records.front().appearance.domain &&
                     std::find(T.begin(), T.end(), r.appearance.id) != T.end() &&
                     std::find(S.begin(), S.end(), r.pose.id) != S.end() && !r.ground_truth;
            ok = ok && tr.records.size() == S.size();
            break;
        }
        }
        passed += ok;
    }
    const double secs = seconds_since(t0);
    o.detail << passed << "/1000 randomized checks, " << secs << " s";
    o.require(passed == 1000, "rule violation");
    o.require(secs < 5.0, "runtime");
    return o;
}

Outcome c7_objectives()
{
    Outcome o;
    const double gan = gan_objective({{0.5}, {0.5}});
    const double fm = feature_matching({{{0, 0}, {0, 0, 0, 0}}}, {{{1, -1}, {1, 1, -1, 1}}});
    const double mp = mt_full_objective({0, 0, 1, 0, 0});
    const double mf = mt_full_objective({0, 0, 0, 1, 1});
    o.detail << "gan " << gan << ", fm " << fm << ", lambda_P case " << mp << ", lambda_FM case " << mf;
    o.require(std::abs(gan + 1.386294) <= 1e-6, "gan");
    o.require(fm == 2.0, "feature matching");
    o.require(mp == 5.0 && mf == 20.0, "weights");
    return o;
}

Outcome c8_ssim()
{
    Outcome o;
    double self_err = 0.0, oracle_err = 0.0;
    for (int v = 0; v < 4; ++v) {
        const RasterImage a = testing::test_pattern(32, 32, v), b = testing::test_pattern(32, 32, v + 1);
        self_err = std::max(self_err, std::abs(ssim(a, a) - 1.0));
        oracle_err = std::max(oracle_err, std::abs(ssim(a, b) - testing::oracle_ssim(a, b)));
    }
    int monotone = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const RasterImage a = testing::test_pattern(64, 64, trial);
        std::mt19937_64 rng(800 + trial);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        RasterImage noise(64, 64, 1);
        for (float& x : noise.data) x = static_cast<float>(u(rng));
        double prev = 2.0;
        bool ok = true;
        for (double amp : {0.01, 0.03, 0.06, 0.1, 0.2, 0.35}) {
            RasterImage b = a;
            for (size_t i = 0; i < b.data.size(); ++i)
                b.data[i] = static_cast<float>(std::clamp(a.data[i] + amp * noise.data[i], 0.0, 1.0));
            const double s = ssim(a, b);
            ok = ok && s < prev;
            prev = s;
        }
        monotone += ok;
    }
    o.detail << "self err " << self_err << ", oracle err " << oracle_err << ", monotone " << monotone << "/10";
    o.require(self_err < 1e-9, "self-similarity");
    o.require(oracle_err < 1e-9, "oracle agreement");
    o.require(monotone == 10, "noise monotonicity");
    return o;
}

Outcome c9_alignment()
{
    Outcome o;
    TemplateConfig tc;
    tc.subdivision = 0;
    const BodyTemplate t = build_template(tc);
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_h = 0.0, worst_inv = 0.0;
    for (int d = 0; d < 50; ++d) {
        Camera cam = Camera::front_view(256, 256);
        cam.scale *= 0.5 + u(rng);
        cam.rotation = cam.rotation * Eigen::AngleAxisd(0.6 * (u(rng) - 0.5), Vec3::UnitY()).toRotationMatrix();
        cam.translation += Vec3(0.3 * (u(rng) - 0.5), 0.3 * (u(rng) - 0.5), 0.0);
        cam.cx += 20 * (u(rng) - 0.5);
        if (d % 2) {
            cam.mode = Camera::Mode::Pinhole;
            cam.focal = 200.0 + 200.0 * u(rng);
            cam.translation.z() = 4.0 + u(rng);
        }
        const PosedMesh a = skin(t, testing::random_shape(3, rng, 2.0), testing::random_pose(16, rng, 0.3));
        const PosedMesh b = skin(t, testing::random_shape(3, rng, 2.0), testing::random_pose(16, rng, 0.3));
        const auto fwd = compute_alignment(a, b, cam);
        const auto back = compute_alignment(b, a, cam);
        double lo = 1e300, hi = -1e300;
        for (const auto& p : project_vertices(cam, a.vertices)) {
            const auto q = fwd.apply(p.x, p.y);
            lo = std::min(lo, q[1]);
            hi = std::max(hi, q[1]);
        }
        worst_h = std::max(worst_h, std::abs((hi - lo) - projected_bbox(b, cam).height()));
        worst_inv = std::max(worst_inv, std::abs(fwd.scale * back.scale - 1.0));
    }
    o.detail << "max bbox height gap " << worst_h << " px, max |s*s'-1| " << worst_inv;
    o.require(worst_h < 0.5, "height gap");
    o.require(worst_inv < 1e-9, "inverse consistency");
    return o;
}

Outcome c10_end_to_end(const fs::path& tmp)
{
    Outcome o;
    const BodyTemplate t = build_template();
    MotionSequence seq = testing::synthetic_motion(t, 60, 10);
    seq.subject_id = "dancer";
    write_motion(tmp / "dancer.mseq.json", seq);
    nlohmann::json j = {{"render_size", {256, 256}},
                        {"smoothing_window", 5},
                        {"subjects", {{{"id", "dancer"}, {"beta", {0.4, -0.3, 0.6}}, {"motion", "dancer.mseq.json"}}}}};
    auto run = [&](const std::string& out, int threads, double& secs) {
        PipelineConfig cfg = parse_config(j, tmp);
        cfg.output_dir = tmp / out;
        cfg.threads = threads;
        const auto t0 = Clock::now();
        const auto res = cmd_labels(cfg, "dancer");
        secs = seconds_since(t0);
        return std::make_pair(res.tensors.size(), testing::tree_digest(cfg.output_dir));
    };
    double s1 = 0, s2 = 0, s4 = 0;
    const auto r1 = run("run1", 1, s1);
    const auto r2 = run("run2", 1, s2);
    const auto r4 = run("run4", 4, s4);
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(r1.second));
    o.detail << r1.first << " frames, digest " << hex << ", " << s1 << " s (1 thread), " << s4 << " s (4 threads)";
    o.require(r1.first == 60, "frame count");
    o.require(r1.second == r2.second, "run-to-run digest");
    o.require(r1.second == r4.second, "thread-count digest");
    o.require(std::max({s1, s2, s4}) < 60.0, "runtime");
    return o;
}

Outcome c11_formats(const fs::path& tmp)
{
    Outcome o;
    auto same = [](const fs::path& a, const fs::path& b) { return testing::read_bytes(a) == testing::read_bytes(b); };
    std::vector<std::string> good;
    auto record = [&](const std::string& name, bool ok) {
        o.require(ok, name);
        if (ok) good.push_back(name);
    };

    const BodyTemplate t = build_template();
    save_template(t, tmp / "a.obj", tmp / "a.btpl");
    const BodyTemplate tb = load_template(tmp / "a.obj", tmp / "a.btpl");
    save_template(tb, tmp / "b.obj", tmp / "b.btpl");
    record("BTPL/1", same(tmp / "a.btpl", tmp / "b.btpl") && same(tmp / "a.obj", tmp / "b.obj"));

    MotionSequence m = testing::synthetic_motion(t, 7, 3);
    m.subject_id = "x";
    write_motion(tmp / "a.mseq", m);
    write_motion(tmp / "b.mseq", read_motion(tmp / "a.mseq"));
    record("MSEQ/1", same(tmp / "a.mseq", tmp / "b.mseq"));

    const Laplacian lap = cotangent_laplacian(t.rest_vertices, *t.faces);
    EigenCache cache;
    cache.basis = smallest_nontrivial_eigvecs(lap.L, lap.mass, 3);
    cache.colors = eigvecs_to_colors(cache.basis);
    cache.mesh_digest = mesh_digest(t.rest_vertices, *t.faces);
    write_eigen_cache(tmp / "a.eigb", cache);
    write_eigen_cache(tmp / "b.eigb", read_eigen_cache(tmp / "a.eigb"));
    record("EIGB/1", same(tmp / "a.eigb", tmp / "b.eigb"));

    RasterImage img(33, 17, 6);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (float& v : img.data) v = u(rng);
    write_tensor(tmp / "a.lbl", img);
    write_tensor(tmp / "b.lbl", read_tensor(tmp / "a.lbl"));
    record("LBL1", same(tmp / "a.lbl", tmp / "b.lbl"));

    std::vector<std::string> S = {"s:0", "s:1", "s:2"}, T = {"t:0", "t:1"};
    PairingPlan plan = make_pairing_plan(Stage::TrainDE, S, T, 12345678901234ull);
    plan.records[0].output = "blended/t_00000.png";
    write_plan(tmp / "a.pair", plan);
    write_plan(tmp / "b.pair", read_plan(tmp / "a.pair"));
    record("PAIR/1", same(tmp / "a.pair", tmp / "b.pair"));

    if (o.pass) {
        for (size_t i = 0; i < good.size(); ++i) o.detail << (i ? ", " : "") << good[i];
        o.detail << " byte-identical after write-read-write";
    }
    return o;
}

} // namespace

int main()
{
    testing::TempDir tmp("acceptance");
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"eigensolver oracle equivalence", [&] { return c1_eigensolver(tmp.path()); }},
        {"Laplacian structural invariants", [&] { return c2_laplacian(tmp.path()); }},
        {"rasterizer exactness", c3_rasterizer},
        {"skinning invariants", c4_skinning},
        {"temporal smoothing", c5_smoothing},
        {"pairing-plan rules", c6_pairing},
        {"objective reference values", c7_objectives},
        {"SSIM", c8_ssim},
        {"alignment round trip", c9_alignment},
        {"end-to-end determinism and throughput", [&] { return c10_end_to_end(tmp.path()); }},
        {"format round trips", [&] { return c11_formats(tmp.path()); }},
    };
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        std::printf("%s  %2zu  %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.str().c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
