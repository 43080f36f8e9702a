#pragma once

#include <filesystem>
#include <limits>
#include <vector>

namespace meshlabel {

/// Row-major, channel-interleaved float image with an optional depth buffer.
struct RasterImage {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<float> data;   ///< size width * height * channels
    std::vector<float> depth;  ///< empty, or width * height (camera-space depth, +inf where empty)

    RasterImage() = default;
    RasterImage(int w, int h, int c, float fill = 0.0f);

    float& at(int x, int y, int c) { return data[(static_cast<size_t>(y) * width + x) * channels + c]; }
    float at(int x, int y, int c) const { return data[(static_cast<size_t>(y) * width + x) * channels + c]; }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    bool same_shape(const RasterImage& o) const
    {
        return width == o.width && height == o.height && channels == o.channels;
    }

    static constexpr float kEmptyDepth = std::numeric_limits<float>::infinity();
};

/// Throws DataError unless all values are finite and within [0, 1].
void validate(const RasterImage& img);

/// 8-bit PNG (1, 3, or 4 channels); values are scaled by 255 and rounded half-up.
void write_png(const std::filesystem::path& path, const RasterImage& img);
RasterImage read_png(const std::filesystem::path& path);

/// "LBL1" raw tensor: magic, little-endian u32 W, H, C, then C planes of H x W float32.
void write_tensor(const std::filesystem::path& path, const RasterImage& img);
RasterImage read_tensor(const std::filesystem::path& path);

/// Reads a PNG or LBL1 file, chosen by extension (.png / .lbl).
RasterImage read_image(const std::filesystem::path& path);

/// Channels [first, first + count) as a new image.
RasterImage slice_channels(const RasterImage& img, int first, int count);

} // namespace meshlabel
