#include "meshlabel/error.hpp"
#include "meshlabel/objectives.hpp"
#include "meshlabel/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

using namespace meshlabel;
namespace fs = std::filesystem;

namespace {

struct Overrides {
    std::string output;
    std::optional<uint64_t> seed;
    std::optional<int> threads;
    std::optional<int> window;
    std::optional<int> width;
    std::optional<int> height;
    std::string alignment;
    std::string mt_results;
};

void add_overrides(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("-o,--output", o.output, "Output directory (config: output_dir)");
    cmd->add_option("--seed", o.seed, "Pairing seed (config: seed)");
    cmd->add_option("-j,--threads", o.threads, "Worker threads; never changes output bytes (config: threads)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--window", o.window, "Temporal smoothing window, odd (config: smoothing_window)");
    cmd->add_option("--width", o.width, "Render width in pixels (config: render_size[0])");
    cmd->add_option("--height", o.height, "Render height in pixels (config: render_size[1])");
    cmd->add_option("--alignment", o.alignment, "per-video or per-frame (config: alignment_mode)")
        ->check(CLI::IsMember({"per-video", "per-frame"}));
    cmd->add_option("--mt-results", o.mt_results, "Directory of raw transfer results (config: mt_results_dir)");
}

PipelineConfig make_config(const std::string& path, const Overrides& o)
{
    PipelineConfig cfg = path.empty() ? parse_config(nlohmann::json::object(), fs::current_path()) : load_config(path);
    if (!o.output.empty()) cfg.output_dir = o.output;
    if (o.seed) cfg.seed = *o.seed;
    if (o.threads) cfg.threads = *o.threads;
    if (o.window) {
        if (*o.window < 1 || *o.window % 2 == 0) throw ConfigError("--window must be odd and positive");
        cfg.smoothing_window = *o.window;
    }
    if (o.width) cfg.width = *o.width;
    if (o.height) cfg.height = *o.height;
    if (cfg.width <= 0 || cfg.height <= 0) throw ConfigError("render size must be positive");
    if (!o.alignment.empty())
        cfg.alignment = o.alignment == "per-frame" ? AlignmentMode::PerFrame : AlignmentMode::PerVideo;
    if (!o.mt_results.empty()) cfg.mt_results_dir = o.mt_results;
    return cfg;
}

std::vector<fs::path> to_paths(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

void print(const nlohmann::json& j) { std::cout << j.dump(1) << '\n'; }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Label images for motion transfer: template, labels, prepare, metrics, losses"};
    app.footer("Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical failure.");
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;

    auto* tpl = app.add_subcommand("template", "Write the body template (OBJ + BTPL/1 sidecar)");
    tpl->add_option("-c,--config", config_path, "Config file (JSON)");
    add_overrides(tpl, ov);

    std::string subject, pose_source;
    auto* labels = app.add_subcommand("labels", "Render LBL1 label images for one subject");
    labels->add_option("-c,--config", config_path, "Config file (JSON)")->required();
    labels->add_option("-s,--subject", subject, "Subject id (shape)")->required();
    labels->add_option("-p,--pose-source", pose_source, "Subject id supplying the poses");
    add_overrides(labels, ov);

    std::string stage;
    auto* prepare = app.add_subcommand("prepare", "Write a PAIR/1 plan and aligned/blended frames");
    prepare->add_option("-c,--config", config_path, "Config file (JSON)")->required();
    prepare->add_option("--stage", stage, "pretrain-MT, train-DE or transfer")
        ->required()
        ->check(CLI::IsMember({"pretrain-MT", "train-DE", "transfer"}));
    add_overrides(prepare, ov);

    std::string path_a, path_b;
    auto* metrics = app.add_subcommand("metrics", "SSIM and L1 between two images or two directories");
    metrics->add_option("a", path_a, "First image or directory")->required();
    metrics->add_option("b", path_b, "Second image or directory")->required();

    auto* losses = app.add_subcommand("losses", "Evaluate training objectives on LBL1 tensors");
    losses->require_subcommand(1);
    std::string real_file, fake_file;
    auto* gan = losses->add_subcommand("gan", "mean log D(real) + mean log(1 - D(fake))");
    gan->add_option("--real", real_file, "LBL1 file of discriminator probabilities on real inputs")->required();
    gan->add_option("--fake", fake_file, "LBL1 file of discriminator probabilities on generated inputs")->required();

    std::vector<std::string> layers_a, layers_b;
    auto* perc = losses->add_subcommand("perceptual", "Sum of per-layer L1 distances");
    perc->add_option("--a", layers_a, "Feature layers, one file each")->required();
    perc->add_option("--b", layers_b, "Feature layers, one file each")->required();
    auto* fm = losses->add_subcommand("fm", "Feature matching, layers normalized by element count");
    fm->add_option("--real", layers_a, "Feature layers of the real input")->required();
    fm->add_option("--fake", layers_b, "Feature layers of the generated input")->required();

    MtTerms mt;
    DeTerms de;
    LossWeights weights;
    auto* mtc = losses->add_subcommand("mt", "Weighted motion-transfer objective from term values");
    mtc->add_option("--gan-s", mt.gan_S, "Adversarial term, source discriminator");
    mtc->add_option("--gan-t", mt.gan_T, "Adversarial term, target discriminator");
    mtc->add_option("--perceptual", mt.perceptual, "Perceptual term");
    mtc->add_option("--fm-s", mt.fm_S, "Feature-matching term, source");
    mtc->add_option("--fm-t", mt.fm_T, "Feature-matching term, target");
    auto* dec = losses->add_subcommand("de", "Weighted detail-enhancement objective from term values");
    dec->add_option("--gan", de.gan, "Adversarial term");
    dec->add_option("--perceptual", de.perceptual, "Perceptual term");
    dec->add_option("--fm", de.fm, "Feature-matching term");
    for (auto* c : {mtc, dec}) {
        c->add_option("--lambda-p", weights.lambda_P, "Perceptual weight");
        c->add_option("--lambda-fm", weights.lambda_FM, "Feature-matching weight");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*tpl) {
            const auto out = cmd_template(make_config(config_path, ov));
            print({{"obj", out.obj.string()}, {"sidecar", out.sidecar.string()}});
        } else if (*labels) {
            const auto cfg = make_config(config_path, ov);
            const auto out = cmd_labels(cfg, subject, pose_source.empty() ? std::nullopt : std::optional(pose_source));
            print({{"directory", out.directory.string()},
                   {"frames", out.tensors.size()},
                   {"pairs", out.pair_index.string()}});
        } else if (*prepare) {
            const auto out = cmd_prepare(make_config(config_path, ov), parse_stage(stage));
            print({{"plan", out.plan.string()}, {"blended", out.blends.size()}});
        } else if (*metrics) {
            print(cmd_metrics(path_a, path_b).to_json());
        } else if (*gan) {
            ScoreBatch s{read_tensor_values(real_file), read_tensor_values(fake_file)};
            print({{"gan", gan_objective(s)}});
        } else if (*perc) {
            print({{"perceptual", perceptual_l1(read_feature_stack(to_paths(layers_a)),
                                                read_feature_stack(to_paths(layers_b)))}});
        } else if (*fm) {
            print({{"fm", feature_matching(read_feature_stack(to_paths(layers_a)),
                                           read_feature_stack(to_paths(layers_b)))}});
        } else if (*mtc) {
            print({{"mt", mt_full_objective(mt, weights)}});
        } else if (*dec) {
            print({{"de", de_full_objective(de, weights)}});
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
