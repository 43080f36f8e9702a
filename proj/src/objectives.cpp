#include "meshlabel/objectives.hpp"

#include "meshlabel/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace meshlabel {

namespace {

double clamp_prob(double p)
{
    if (!(p >= 0.0 && p <= 1.0)) throw DataError("discriminator score outside [0, 1]");
    return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

void check_stacks(const FeatureStack& a, const FeatureStack& b)
{
    if (a.layers.size() != b.layers.size()) throw DataError("feature stacks have different layer counts");
    for (size_t i = 0; i < a.layers.size(); ++i) {
        if (a.layers[i].empty()) throw DataError("feature layer " + std::to_string(i) + " is empty");
        if (a.layers[i].size() != b.layers[i].size())
            throw DataError("feature layer " + std::to_string(i) + " sizes differ");
    }
}

double layer_l1(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
    return s;
}

void check_weights(const LossWeights& w)
{
    if (!(w.lambda_P >= 0.0) || !(w.lambda_FM >= 0.0)) throw ConfigError("loss weights must be non-negative");
}

} // namespace

double gan_objective(const ScoreBatch& scores)
{
    if (scores.real.empty() || scores.fake.empty()) throw DataError("score batch needs real and fake scores");
    double real = 0.0, fake = 0.0;
    for (double p : scores.real) real += std::log(clamp_prob(p));
    for (double p : scores.fake) fake += std::log1p(-clamp_prob(p));
    return real / static_cast<double>(scores.real.size()) + fake / static_cast<double>(scores.fake.size());
}

double perceptual_l1(const FeatureStack& a, const FeatureStack& b)
{
    check_stacks(a, b);
    double s = 0.0;
    for (size_t i = 0; i < a.layers.size(); ++i) s += layer_l1(a.layers[i], b.layers[i]);
    return s;
}

double feature_matching(const FeatureStack& real, const FeatureStack& fake)
{
    check_stacks(real, fake);
    double s = 0.0;
    for (size_t i = 0; i < real.layers.size(); ++i)
        s += layer_l1(real.layers[i], fake.layers[i]) / static_cast<double>(real.layers[i].size());
    return s;
}

double feature_matching_multiscale(std::span<const FeatureStack> real, std::span<const FeatureStack> fake)
{
    if (real.size() != fake.size()) throw DataError("scale counts differ");
    double s = 0.0;
    for (size_t k = 0; k < real.size(); ++k) s += feature_matching(real[k], fake[k]);
    return s;
}

double mt_full_objective(const MtTerms& t, const LossWeights& w)
{
    check_weights(w);
    return t.gan_S + t.gan_T + w.lambda_P * t.perceptual + w.lambda_FM * (t.fm_S + t.fm_T);
}

double de_full_objective(const DeTerms& t, const LossWeights& w)
{
    check_weights(w);
    return t.gan + w.lambda_P * t.perceptual + w.lambda_FM * t.fm;
}

} // namespace meshlabel
