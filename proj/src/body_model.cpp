#include "meshlabel/body_model.hpp"

#include "meshlabel/error.hpp"

#include <json.hpp>

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

namespace meshlabel {

namespace {

using Weights = std::vector<SkinWeight>;
using Quad = std::array<int, 4>;

enum Joint : int {
    kPelvis,
    kSpine,
    kNeck,
    kHead,
    kLShoulder,
    kLElbow,
    kLWrist,
    kRShoulder,
    kRElbow,
    kRWrist,
    kLHip,
    kLKnee,
    kLAnkle,
    kRHip,
    kRKnee,
    kRAnkle,
    kJointCount
};

Weights pure(int j) { return {{j, 1.0}}; }
Weights half(int a, int b) { return {{a, 0.5}, {b, 0.5}}; }

// Quad-dominant builder used before triangulation. Extrusion keeps the surface closed
// and genus 0.
struct QuadBuilder {
    Points verts;
    std::vector<Weights> weights;
    std::vector<Quad> quads;

    int add(const Vec3& p, Weights w)
    {
        verts.push_back(p);
        weights.push_back(std::move(w));
        return static_cast<int>(verts.size()) - 1;
    }

    Vec3 centroid(int q) const
    {
        Vec3 c = Vec3::Zero();
        for (int v : quads[q]) c += verts[v];
        return c / 4.0;
    }

    // Replaces quad `q` by a new ring at `center` with the given half extents along the
    // two in-plane axes, plus four side quads. Axis `normal_axis` is the extrusion axis.
    void extrude(int q, int normal_axis, const Vec3& center, double half_a, double half_b,
                 const Weights& w)
    {
        const Quad old = quads[q];
        const Vec3 c = centroid(q);
        const int ax_a = (normal_axis + 1) % 3;
        const int ax_b = (normal_axis + 2) % 3;
        double cur_a = 0.0, cur_b = 0.0;
        for (int v : old) {
            cur_a = std::max(cur_a, std::abs(verts[v][ax_a] - c[ax_a]));
            cur_b = std::max(cur_b, std::abs(verts[v][ax_b] - c[ax_b]));
        }
        Quad ring{};
        for (int k = 0; k < 4; ++k) {
            Vec3 d = verts[old[k]] - c;
            Vec3 p = center;
            p[ax_a] += d[ax_a] * (half_a / cur_a);
            p[ax_b] += d[ax_b] * (half_b / cur_b);
            ring[k] = add(p, w);
        }
        for (int k = 0; k < 4; ++k) {
            int k1 = (k + 1) % 4;
            quads.push_back({old[k], old[k1], ring[k1], ring[k]});
        }
        quads[q] = ring;
    }
};

// A joint station along a limb: ring center, half extents, and ring weights. Between
// consecutive stations, `bone` >= 0 requests interpolated rigid rings skinned to `bone`.
struct Station {
    Vec3 center;
    double half_a;
    double half_b;
    Weights weights;
    int bone = -1;
};

void extrude_chain(QuadBuilder& qb, int q, int axis, const std::vector<Station>& stations,
                   int rings_per_bone)
{
    Vec3 prev_c = qb.centroid(q);
    double prev_a = 0.0, prev_b = 0.0;
    {
        const int ax_a = (axis + 1) % 3, ax_b = (axis + 2) % 3;
        for (int v : qb.quads[q]) {
            prev_a = std::max(prev_a, std::abs(qb.verts[v][ax_a] - prev_c[ax_a]));
            prev_b = std::max(prev_b, std::abs(qb.verts[v][ax_b] - prev_c[ax_b]));
        }
    }
    for (size_t s = 0; s < stations.size(); ++s) {
        const Station& st = stations[s];
        if (s > 0 && stations[s - 1].bone >= 0) {
            for (int r = 1; r <= rings_per_bone; ++r) {
                const double t = static_cast<double>(r) / (rings_per_bone + 1);
                qb.extrude(q, axis, (1 - t) * prev_c + t * st.center,
                           (1 - t) * prev_a + t * st.half_a, (1 - t) * prev_b + t * st.half_b,
                           pure(stations[s - 1].bone));
            }
        }
        qb.extrude(q, axis, st.center, st.half_a, st.half_b, st.weights);
        prev_c = st.center;
        prev_a = st.half_a;
        prev_b = st.half_b;
    }
}

// Surface of an nx*ny*nz lattice box with outward-facing quads. Returns the quad index
// of each boundary cell, keyed by (side, u, v).
struct BoxSurface {
    std::map<std::array<int, 3>, int> cell;  // side: 0 -x, 1 +x, 2 -y, 3 +y, 4 -z, 5 +z
};

BoxSurface make_box(QuadBuilder& qb, const std::vector<double>& xs, const std::vector<double>& ys,
                    const std::vector<double>& zs, const std::vector<Weights>& row_weights)
{
    const int nx = static_cast<int>(xs.size()) - 1;
    const int ny = static_cast<int>(ys.size()) - 1;
    const int nz = static_cast<int>(zs.size()) - 1;
    std::map<std::array<int, 3>, int> index;
    auto vid = [&](int i, int j, int k) {
        auto [it, inserted] = index.try_emplace({i, j, k}, -1);
        if (inserted) it->second = qb.add(Vec3(xs[i], ys[j], zs[k]), row_weights[j]);
        return it->second;
    };
    BoxSurface box;
    auto quad = [&](int side, int u, int v, Quad q) {
        qb.quads.push_back(q);
        box.cell[{side, u, v}] = static_cast<int>(qb.quads.size()) - 1;
    };
    for (int i = 0; i < nx; ++i)
        for (int k = 0; k < nz; ++k) {
            quad(2, i, k, {vid(i, 0, k), vid(i + 1, 0, k), vid(i + 1, 0, k + 1), vid(i, 0, k + 1)});
            quad(3, i, k, {vid(i, ny, k), vid(i, ny, k + 1), vid(i + 1, ny, k + 1), vid(i + 1, ny, k)});
        }
    for (int j = 0; j < ny; ++j)
        for (int k = 0; k < nz; ++k) {
            quad(1, j, k, {vid(nx, j, k), vid(nx, j + 1, k), vid(nx, j + 1, k + 1), vid(nx, j, k + 1)});
            quad(0, j, k, {vid(0, j, k), vid(0, j, k + 1), vid(0, j + 1, k + 1), vid(0, j + 1, k)});
        }
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            quad(5, i, j, {vid(i, j, nz), vid(i + 1, j, nz), vid(i + 1, j + 1, nz), vid(i, j + 1, nz)});
            quad(4, i, j, {vid(i, j, 0), vid(i, j + 1, 0), vid(i + 1, j + 1, 0), vid(i + 1, j, 0)});
        }
    return box;
}

double closest_on_segment_param(const Vec3& p, const Vec3& a, const Vec3& b)
{
    const Vec3 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return 0.0;
    return std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
}

} // namespace

int BodyTemplate::root_joint() const
{
    for (int j = 0; j < joint_count(); ++j)
        if (joint_parents[j] < 0) return j;
    return -1;
}

TriMesh BodyTemplate::rest_mesh() const { return {rest_vertices, *faces}; }

void validate(const BodyTemplate& t)
{
    if (!t.faces) throw DataError("template has no faces");
    const int nv = t.vertex_count();
    const int nj = t.joint_count();
    require_closed_manifold(t.rest_vertices, *t.faces);
    if (static_cast<int>(t.joint_parents.size()) != nj || static_cast<int>(t.joint_names.size()) != nj)
        throw DataError("joint arrays disagree in length");
    int roots = 0;
    for (int j = 0; j < nj; ++j) {
        const int p = t.joint_parents[j];
        if (p < 0) {
            ++roots;
        } else if (p >= nj || p == j) {
            throw DataError("joint " + std::to_string(j) + " has invalid parent");
        }
    }
    if (roots != 1) throw DataError("joint tree must have exactly one root");
    for (int j = 0; j < nj; ++j) {
        int cur = j, steps = 0;
        while (cur >= 0 && steps <= nj) {
            cur = t.joint_parents[cur];
            ++steps;
        }
        if (cur >= 0) throw DataError("joint parents contain a cycle at joint " + std::to_string(j));
    }
    if (static_cast<int>(t.skin_weights.size()) != nv) throw DataError("skin weight count != vertex count");
    for (int v = 0; v < nv; ++v) {
        double sum = 0.0;
        for (const auto& sw : t.skin_weights[v]) {
            if (sw.joint < 0 || sw.joint >= nj) throw DataError("skin weight joint out of range at vertex " + std::to_string(v));
            if (!(sw.weight >= 0.0) || !std::isfinite(sw.weight))
                throw DataError("negative skin weight at vertex " + std::to_string(v));
            sum += sw.weight;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw DataError("skin weights of vertex " + std::to_string(v) + " do not sum to 1");
    }
    if (t.shape_names.size() != t.shape_dirs.size()) throw DataError("shape name count mismatch");
    for (const auto& dir : t.shape_dirs)
        if (static_cast<int>(dir.size()) != nv) throw DataError("shape direction size != vertex count");
}

BodyTemplate build_template(const TemplateConfig& cfg)
{
    if (!(cfg.height_scale > 0.0) || !std::isfinite(cfg.height_scale))
        throw ConfigError("height_scale must be positive");
    if (!(cfg.limb_thickness > 0.0) || !(cfg.limb_thickness <= 2.5))
        throw ConfigError("limb_thickness must be in (0, 2.5]");
    if (cfg.rings_per_bone < 0 || cfg.rings_per_bone > 8) throw ConfigError("rings_per_bone must be in [0, 8]");
    if (cfg.subdivision < 0 || cfg.subdivision > 4) throw ConfigError("subdivision must be in [0, 4]");
    if (cfg.num_shape_dirs < 0 || cfg.num_shape_dirs > 3) throw ConfigError("num_shape_dirs must be in [0, 3]");

    const double h = cfg.height_scale;
    const double th = cfg.limb_thickness;

    BodyTemplate t;
    t.joint_names = {"pelvis",   "spine",    "neck",       "head",    "l_shoulder", "l_elbow",
                     "l_wrist",  "r_shoulder", "r_elbow",  "r_wrist", "l_hip",      "l_knee",
                     "l_ankle",  "r_hip",    "r_knee",     "r_ankle"};
    t.joint_parents = {-1, kPelvis, kSpine, kNeck, kSpine, kLShoulder, kLElbow, kSpine, kRShoulder,
                       kRElbow, kPelvis, kLHip, kLKnee, kPelvis, kRHip, kRKnee};
    t.joints_rest.resize(kJointCount);
    auto J = [&](int j, double x, double y, double z) { t.joints_rest[j] = Vec3(x, y, z) * h; };
    J(kPelvis, 0, 0.90, 0);
    J(kSpine, 0, 1.15, 0);
    J(kNeck, 0, 1.48, 0);
    J(kHead, 0, 1.58, 0);
    for (int side = 0; side < 2; ++side) {
        const double s = side == 0 ? 1.0 : -1.0;
        const int o = side == 0 ? 0 : 3;
        J(kLShoulder + o, s * 0.22, 1.38, 0);
        J(kLElbow + o, s * 0.50, 1.38, 0);
        J(kLWrist + o, s * 0.76, 1.38, 0);
        J(kLHip + o, s * 0.12, 0.84, 0);
        J(kLKnee + o, s * 0.12, 0.48, 0);
        J(kLAnkle + o, s * 0.12, 0.08, 0);
    }

    QuadBuilder qb;
    // Torso: 3 columns (x) by 2 rows (y) by 1 slab (z).
    auto box = make_box(qb, {-0.18 * h, -0.06 * h, 0.06 * h, 0.18 * h}, {0.85 * h, 1.15 * h, 1.45 * h},
                        {-0.10 * h, 0.10 * h}, {pure(kPelvis), half(kPelvis, kSpine), pure(kSpine)});

    const int r = cfg.rings_per_bone;
    for (int side = 0; side < 2; ++side) {
        const double s = side == 0 ? 1.0 : -1.0;
        const int o = side == 0 ? 0 : 3;
        const int sh = kLShoulder + o, el = kLElbow + o, wr = kLWrist + o;
        const int hip = kLHip + o, kn = kLKnee + o, an = kLAnkle + o;

        // Arm along +-x from the upper side cell; in-plane axes are (y, z).
        std::vector<Station> arm = {
            {Vec3(s * 0.24, 1.38, 0) * h, 0.060 * h * th, 0.060 * h * th, half(kSpine, sh), sh},
            {Vec3(s * 0.50, 1.38, 0) * h, 0.050 * h * th, 0.050 * h * th, half(sh, el), el},
            {Vec3(s * 0.76, 1.38, 0) * h, 0.040 * h * th, 0.040 * h * th, half(el, wr), wr},
            {Vec3(s * 0.92, 1.38, 0) * h, 0.020 * h * th, 0.050 * h * th, pure(wr), -1},
        };
        extrude_chain(qb, box.cell.at({side == 0 ? 1 : 0, 1, 0}), 0, arm, r);

        // Leg down from the outer bottom cell; in-plane axes are (z, x).
        std::vector<Station> leg = {
            {Vec3(s * 0.12, 0.80, 0) * h, 0.075 * h * th, 0.055 * h * th, half(kPelvis, hip), hip},
            {Vec3(s * 0.12, 0.48, 0) * h, 0.050 * h * th, 0.050 * h * th, half(hip, kn), kn},
            {Vec3(s * 0.12, 0.08, 0) * h, 0.040 * h * th, 0.040 * h * th, half(kn, an), an},
            {Vec3(s * 0.12, 0.00, 0.04) * h, 0.090 * h * th, 0.045 * h * th, pure(an), -1},
        };
        extrude_chain(qb, box.cell.at({2, side == 0 ? 2 : 0, 0}), 1, leg, r);
    }
    // Neck and head up from the middle top cell; in-plane axes are (z, x).
    std::vector<Station> head = {
        {Vec3(0, 1.50, 0) * h, 0.045 * h * th, 0.045 * h * th, half(kSpine, kNeck), kNeck},
        {Vec3(0, 1.58, 0) * h, 0.050 * h * th, 0.050 * h * th, half(kNeck, kHead), -1},
        {Vec3(0, 1.66, 0) * h, 0.100 * h, 0.090 * h, pure(kHead), -1},
        {Vec3(0, 1.78, 0) * h, 0.095 * h, 0.085 * h, pure(kHead), -1},
        {Vec3(0, 1.84, 0) * h, 0.050 * h, 0.045 * h, pure(kHead), -1},
    };
    extrude_chain(qb, box.cell.at({3, 1, 0}), 1, head, r);

    TriMesh mesh;
    mesh.vertices = qb.verts;
    std::vector<Weights> weights = qb.weights;
    for (const auto& q : qb.quads) {
        mesh.faces.push_back({q[0], q[1], q[2]});
        mesh.faces.push_back({q[0], q[2], q[3]});
    }

    for (int level = 0; level < cfg.subdivision; ++level) {
        std::vector<LoopStencil> stencils;
        mesh = loop_subdivide(mesh, &stencils);
        std::vector<Weights> next(stencils.size());
        for (size_t i = 0; i < stencils.size(); ++i) {
            std::vector<double> dense(kJointCount, 0.0);
            for (auto [src, w] : stencils[i].terms)
                for (const auto& sw : weights[src]) dense[sw.joint] += w * sw.weight;
            double sum = 0.0;
            for (double& d : dense) {
                if (d < 1e-12) d = 0.0;
                sum += d;
            }
            for (int j = 0; j < kJointCount; ++j)
                if (dense[j] > 0.0) next[i].push_back({j, dense[j] / sum});
        }
        weights = std::move(next);
    }

    if (auto rep = check_topology(mesh.vertices, mesh.faces); !rep.ok())
        throw ConfigError("template config produces invalid geometry: " + rep.describe());

    t.rest_vertices = std::move(mesh.vertices);
    t.faces = std::make_shared<const std::vector<Face>>(std::move(mesh.faces));
    t.skin_weights = std::move(weights);

    // Blendshapes are derived from the final surface.
    const int nv = t.vertex_count();
    const Vec3 pelvis = t.joints_rest[kPelvis];
    std::vector<std::array<Vec3, 2>> bones(kJointCount);
    for (int j = 0; j < kJointCount; ++j) {
        Vec3 end = Vec3::Zero();
        int children = 0;
        for (int c = 0; c < kJointCount; ++c)
            if (t.joint_parents[c] == j) {
                end += t.joints_rest[c];
                ++children;
            }
        if (children > 0) {
            end /= children;
        } else {
            const Vec3 dir = t.joints_rest[j] - t.joints_rest[t.joint_parents[j]];
            end = t.joints_rest[j] + 0.6 * dir;
        }
        bones[j] = {t.joints_rest[j], end};
    }
    const std::array<std::string, 3> names = {"height", "limb_thickness", "torso_width"};
    for (int k = 0; k < cfg.num_shape_dirs; ++k) {
        Points dir(nv, Vec3::Zero());
        for (int v = 0; v < nv; ++v) {
            const Vec3& p = t.rest_vertices[v];
            if (k == 0) {
                dir[v] = Vec3(0, 0.05 * (p.y() - pelvis.y()), 0);
            } else if (k == 1) {
                for (const auto& sw : t.skin_weights[v]) {
                    const auto& [a, b] = bones[sw.joint];
                    const Vec3 foot = a + closest_on_segment_param(p, a, b) * (b - a);
                    dir[v] += 0.15 * sw.weight * (p - foot);
                }
            } else {
                double torso = 0.0;
                for (const auto& sw : t.skin_weights[v])
                    if (sw.joint == kPelvis || sw.joint == kSpine) torso += sw.weight;
                dir[v] = Vec3(0.10 * torso * p.x(), 0, 0.05 * torso * p.z());
            }
        }
        t.shape_names.push_back(names[k]);
        t.shape_dirs.push_back(std::move(dir));
    }

    validate(t);
    return t;
}

PosedMesh apply_shape(const BodyTemplate& t, const ShapeParams& beta)
{
    if (static_cast<int>(beta.beta.size()) != t.shape_count())
        throw ConfigError("shape parameter count " + std::to_string(beta.beta.size()) +
                          " != template shape count " + std::to_string(t.shape_count()));
    for (double b : beta.beta)
        if (!std::isfinite(b)) throw ConfigError("non-finite shape parameter");
    PosedMesh out{t.rest_vertices, t.faces};
    for (int k = 0; k < t.shape_count(); ++k) {
        const double b = beta.beta[k];
        if (b == 0.0) continue;
        const auto& dir = t.shape_dirs[k];
        for (size_t v = 0; v < out.vertices.size(); ++v) out.vertices[v] += b * dir[v];
    }
    return out;
}

Eigen::Matrix3d axis_angle_matrix(const Vec3& w)
{
    const double angle = w.norm();
    if (angle < 1e-12) return Eigen::Matrix3d::Identity();
    return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

std::vector<JointTransform> forward_kinematics(const BodyTemplate& t, const PoseParams& theta)
{
    const int nj = t.joint_count();
    if (static_cast<int>(theta.theta.size()) != nj)
        throw ConfigError("pose joint count " + std::to_string(theta.theta.size()) +
                          " != template joint count " + std::to_string(nj));
    for (const auto& w : theta.theta)
        if (!w.allFinite()) throw ConfigError("non-finite pose parameter");
    if (!theta.root_translation.allFinite()) throw ConfigError("non-finite root translation");

    std::vector<JointTransform> out(nj);
    std::vector<bool> done(nj, false);
    // Parents may be listed after children in imported templates.
    auto solve = [&](auto&& self, int j) -> void {
        if (done[j]) return;
        const int p = t.joint_parents[j];
        const Eigen::Matrix3d local = axis_angle_matrix(theta.theta[j]);
        if (p < 0) {
            out[j] = {local, t.joints_rest[j]};
        } else {
            self(self, p);
            out[j] = {out[p].rotation * local,
                      out[p].translation + out[p].rotation * (t.joints_rest[j] - t.joints_rest[p])};
        }
        done[j] = true;
    };
    for (int j = 0; j < nj; ++j) solve(solve, j);
    return out;
}

PosedMesh skin(const BodyTemplate& t, const ShapeParams& beta, const PoseParams& theta)
{
    PosedMesh shaped = apply_shape(t, beta);
    const auto xf = forward_kinematics(t, theta);
    for (size_t v = 0; v < shaped.vertices.size(); ++v) {
        const Vec3 p = shaped.vertices[v];
        Vec3 q = Vec3::Zero();
        for (const auto& sw : t.skin_weights[v]) {
            const auto& x = xf[sw.joint];
            q += sw.weight * (x.rotation * (p - t.joints_rest[sw.joint]) + x.translation);
        }
        shaped.vertices[v] = q + theta.root_translation;
    }
    return shaped;
}

PosedMesh recombine(const BodyTemplate& t, const ShapeParams& beta_target, const PoseParams& theta_source)
{
    return skin(t, beta_target, theta_source);
}

Points joint_positions(const BodyTemplate& t, const ShapeParams& beta, const PoseParams& theta)
{
    if (static_cast<int>(beta.beta.size()) != t.shape_count())
        throw ConfigError("shape parameter count mismatch");
    const auto xf = forward_kinematics(t, theta);
    Points out(xf.size());
    for (size_t j = 0; j < xf.size(); ++j) out[j] = xf[j].translation + theta.root_translation;
    return out;
}

// ---------------------------------------------------------------------------------------
// BTPL/1

namespace {

nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

Vec3 json_vec(const nlohmann::json& j)
{
    if (!j.is_array() || j.size() != 3) throw DataError("expected a 3-vector");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

} // namespace

void save_template(const BodyTemplate& t, const std::filesystem::path& obj_path,
                   const std::filesystem::path& sidecar_path)
{
    write_obj(obj_path, t.rest_mesh());
    nlohmann::json j;
    j["format"] = "BTPL/1";
    j["vertex_count"] = t.vertex_count();
    j["face_count"] = t.faces->size();
    auto& joints = j["joints"] = nlohmann::json::array();
    for (int k = 0; k < t.joint_count(); ++k)
        joints.push_back({{"name", t.joint_names[k]},
                          {"parent", t.joint_parents[k]},
                          {"position", vec_json(t.joints_rest[k])}});
    auto& weights = j["skin_weights"] = nlohmann::json::array();
    for (const auto& vw : t.skin_weights) {
        auto row = nlohmann::json::array();
        for (const auto& sw : vw) row.push_back(nlohmann::json::array({sw.joint, sw.weight}));
        weights.push_back(std::move(row));
    }
    auto& shapes = j["shape_dirs"] = nlohmann::json::array();
    for (int k = 0; k < t.shape_count(); ++k) {
        auto offsets = nlohmann::json::array();
        for (const auto& d : t.shape_dirs[k]) {
            offsets.push_back(d.x());
            offsets.push_back(d.y());
            offsets.push_back(d.z());
        }
        shapes.push_back({{"name", t.shape_names[k]}, {"offsets", std::move(offsets)}});
    }
    std::ofstream os(sidecar_path, std::ios::binary);
    if (!os) throw DataError("cannot open for writing: " + sidecar_path.string());
    os << j.dump(1) << '\n';
}

BodyTemplate load_template(const std::filesystem::path& obj_path, const std::filesystem::path& sidecar_path)
{
    TriMesh mesh = read_obj(obj_path);
    std::ifstream is(sidecar_path);
    if (!is) throw DataError("cannot open template sidecar: " + sidecar_path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("template sidecar is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object() || !j.contains("format") || j["format"] != "BTPL/1")
        throw DataError("unsupported template sidecar schema version (expected \"BTPL/1\")");
    try {
        BodyTemplate t;
        if (j.at("vertex_count").get<size_t>() != mesh.vertices.size() ||
            j.at("face_count").get<size_t>() != mesh.faces.size())
            throw DataError("template sidecar counts do not match the OBJ");
        t.rest_vertices = std::move(mesh.vertices);
        t.faces = std::make_shared<const std::vector<Face>>(std::move(mesh.faces));
        for (const auto& jt : j.at("joints")) {
            t.joint_names.push_back(jt.at("name").get<std::string>());
            t.joint_parents.push_back(jt.at("parent").get<int>());
            t.joints_rest.push_back(json_vec(jt.at("position")));
        }
        for (const auto& row : j.at("skin_weights")) {
            std::vector<SkinWeight> vw;
            for (const auto& e : row) vw.push_back({e.at(0).get<int>(), e.at(1).get<double>()});
            t.skin_weights.push_back(std::move(vw));
        }
        for (const auto& sd : j.at("shape_dirs")) {
            t.shape_names.push_back(sd.at("name").get<std::string>());
            const auto& off = sd.at("offsets");
            if (off.size() != 3 * t.rest_vertices.size()) throw DataError("shape direction has wrong length");
            Points dir(t.rest_vertices.size());
            for (size_t v = 0; v < dir.size(); ++v)
                dir[v] = Vec3(off[3 * v].get<double>(), off[3 * v + 1].get<double>(), off[3 * v + 2].get<double>());
            t.shape_dirs.push_back(std::move(dir));
        }
        validate(t);
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed template sidecar: " + std::string(e.what()));
    }
}

} // namespace meshlabel
