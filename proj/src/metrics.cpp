#include "meshlabel/metrics.hpp"

#include "meshlabel/error.hpp"

#include <array>
#include <cmath>

namespace meshlabel {

std::vector<double> ssim_kernel(const SsimConfig& cfg)
{
    if (cfg.window < 1 || cfg.window % 2 == 0) throw ConfigError("SSIM window must be odd and positive");
    if (!(cfg.sigma > 0.0) || !(cfg.k1 > 0.0) || !(cfg.k2 > 0.0) || !(cfg.dynamic_range > 0.0))
        throw ConfigError("SSIM constants must be positive");
    std::vector<double> g(cfg.window);
    const int half = cfg.window / 2;
    double sum = 0.0;
    for (int i = 0; i < cfg.window; ++i) {
        const double d = i - half;
        g[i] = std::exp(-(d * d) / (2.0 * cfg.sigma * cfg.sigma));
        sum += g[i];
    }
    for (double& v : g) v /= sum;
    return g;
}

std::vector<double> to_gray(const RasterImage& img)
{
    std::vector<double> out(img.pixel_count());
    for (size_t p = 0; p < out.size(); ++p) {
        double s = 0.0;
        for (int c = 0; c < img.channels; ++c) s += img.data[p * img.channels + c];
        out[p] = s / img.channels;
    }
    return out;
}

double ssim(const RasterImage& a, const RasterImage& b, const SsimConfig& cfg)
{
    if (!a.same_shape(b)) throw DataError("ssim: image shapes differ");
    const auto g = ssim_kernel(cfg);
    const int win = cfg.window;
    const int W = a.width, H = a.height;
    if (W < win || H < win) throw DataError("ssim: image smaller than the window");
    const auto ga = to_gray(a);
    const auto gb = to_gray(b);

    // Five statistics, filtered horizontally then vertically over valid windows only.
    const int ow = W - win + 1, oh = H - win + 1;
    std::vector<std::array<double, 5>> rows(static_cast<size_t>(H) * ow);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < ow; ++x) {
            std::array<double, 5> acc{};
            for (int k = 0; k < win; ++k) {
                const double va = ga[static_cast<size_t>(y) * W + x + k];
                const double vb = gb[static_cast<size_t>(y) * W + x + k];
                acc[0] += g[k] * va;
                acc[1] += g[k] * vb;
                acc[2] += g[k] * (va * va);
                acc[3] += g[k] * (vb * vb);
                acc[4] += g[k] * (va * vb);
            }
            rows[static_cast<size_t>(y) * ow + x] = acc;
        }

    const double c1 = (cfg.k1 * cfg.dynamic_range) * (cfg.k1 * cfg.dynamic_range);
    const double c2 = (cfg.k2 * cfg.dynamic_range) * (cfg.k2 * cfg.dynamic_range);
    double total = 0.0;
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            std::array<double, 5> m{};
            for (int k = 0; k < win; ++k) {
                const auto& r = rows[static_cast<size_t>(y + k) * ow + x];
                for (int s = 0; s < 5; ++s) m[s] += g[k] * r[s];
            }
            const double mu_a = m[0], mu_b = m[1];
            const double var_a = m[2] - mu_a * mu_a;
            const double var_b = m[3] - mu_b * mu_b;
            const double cov = m[4] - mu_a * mu_b;
            total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                     ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
        }
    return total / (static_cast<double>(ow) * oh);
}

double pixel_l1(const RasterImage& a, const RasterImage& b)
{
    if (!a.same_shape(b)) throw DataError("pixel_l1: image shapes differ");
    double s = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) s += std::abs(static_cast<double>(a.data[i]) - b.data[i]);
    return s / static_cast<double>(a.data.size());
}

} // namespace meshlabel
