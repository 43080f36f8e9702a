#pragma once

#include <span>
#include <vector>

namespace meshlabel {

/// Discriminator probabilities for real-labeled and fake-labeled inputs.
struct ScoreBatch {
    std::vector<double> real;
    std::vector<double> fake;
};

/// Flattened feature maps, one entry per layer. A layer's element count N_i is its size.
struct FeatureStack {
    std::vector<std::vector<double>> layers;
};

struct LossWeights {
    double lambda_P = 5.0;
    double lambda_FM = 10.0;
};

/// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] before taking logs.
inline constexpr double kProbClamp = 1e-7;

/// mean(log p_real) + mean(log(1 - p_fake)), natural log.
double gan_objective(const ScoreBatch& scores);

/// Sum over layers of the L1 distance between corresponding elements.
double perceptual_l1(const FeatureStack& a, const FeatureStack& b);

/// Sum over layers of (1 / N_i) * L1 distance, for one discriminator scale.
double feature_matching(const FeatureStack& real, const FeatureStack& fake);

/// Sum of per-scale feature-matching terms (pairs of real/fake stacks, one per scale).
double feature_matching_multiscale(std::span<const FeatureStack> real, std::span<const FeatureStack> fake);

struct MtTerms {
    double gan_S = 0.0;
    double gan_T = 0.0;
    double perceptual = 0.0;
    double fm_S = 0.0;
    double fm_T = 0.0;
};

struct DeTerms {
    double gan = 0.0;
    double perceptual = 0.0;
    double fm = 0.0;
};

/// gan_S + gan_T + lambda_P * perceptual + lambda_FM * (fm_S + fm_T)
double mt_full_objective(const MtTerms& terms, const LossWeights& w = {});

/// gan + lambda_P * perceptual + lambda_FM * fm
double de_full_objective(const DeTerms& terms, const LossWeights& w = {});

} // namespace meshlabel
