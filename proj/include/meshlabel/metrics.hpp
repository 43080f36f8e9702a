#pragma once

#include "meshlabel/image.hpp"

#include <vector>

namespace meshlabel {

struct SsimConfig {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

/// Normalized separable Gaussian taps for the configured window.
std::vector<double> ssim_kernel(const SsimConfig& cfg);

/// Grayscale view used by ssim(): the per-pixel channel mean.
std::vector<double> to_gray(const RasterImage& img);

/// Mean SSIM over all windows that lie fully inside the image (no padding).
double ssim(const RasterImage& a, const RasterImage& b, const SsimConfig& cfg = {});

/// Mean absolute per-element difference.
double pixel_l1(const RasterImage& a, const RasterImage& b);

} // namespace meshlabel
