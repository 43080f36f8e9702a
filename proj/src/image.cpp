#include "meshlabel/image.hpp"

#include "meshlabel/binary_io.hpp"
#include "meshlabel/error.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

namespace meshlabel {

RasterImage::RasterImage(int w, int h, int c, float fill) : width(w), height(h), channels(c)
{
    if (w <= 0 || h <= 0 || c <= 0) throw ConfigError("image dimensions must be positive");
    data.assign(static_cast<size_t>(w) * h * c, fill);
}

void validate(const RasterImage& img)
{
    if (img.width <= 0 || img.height <= 0 || img.channels <= 0) throw DataError("empty image");
    if (img.data.size() != img.pixel_count() * img.channels) throw DataError("image buffer size mismatch");
    for (float v : img.data)
        if (!(v >= 0.0f && v <= 1.0f)) throw DataError("image value outside [0, 1]");
    if (!img.depth.empty() && img.depth.size() != img.pixel_count()) throw DataError("depth buffer size mismatch");
}

void write_png(const std::filesystem::path& path, const RasterImage& img)
{
    if (img.channels != 1 && img.channels != 3 && img.channels != 4)
        throw DataError("PNG export supports 1, 3, or 4 channels");
    std::vector<uint8_t> bytes(img.data.size());
    for (size_t i = 0; i < bytes.size(); ++i) {
        const double v = std::floor(static_cast<double>(img.data[i]) * 255.0 + 0.5);
        bytes[i] = static_cast<uint8_t>(std::clamp(v, 0.0, 255.0));
    }
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = img.channels == 1 ? PNG_FORMAT_GRAY : img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_RGBA;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, bytes.data(), 0, nullptr))
        throw DataError("PNG write failed for " + path.string() + ": " + image.message);
}

RasterImage read_png(const std::filesystem::path& path)
{
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str()))
        throw DataError("cannot read PNG " + path.string() + ": " + image.message);
    const bool gray = (image.format & PNG_FORMAT_FLAG_COLOR) == 0;
    image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    const int c = gray ? 1 : 3;
    std::vector<uint8_t> bytes(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, bytes.data(), 0, nullptr))
        throw DataError("cannot decode PNG " + path.string() + ": " + image.message);
    RasterImage out(static_cast<int>(image.width), static_cast<int>(image.height), c);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] = static_cast<float>(bytes[i]) / 255.0f;
    return out;
}

void write_tensor(const std::filesystem::path& path, const RasterImage& img)
{
    if (img.data.size() != img.pixel_count() * img.channels) throw DataError("image buffer size mismatch");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open for writing: " + path.string());
    os.write("LBL1", 4);
    binio::put<uint32_t>(os, static_cast<uint32_t>(img.width));
    binio::put<uint32_t>(os, static_cast<uint32_t>(img.height));
    binio::put<uint32_t>(os, static_cast<uint32_t>(img.channels));
    std::vector<float> plane(img.pixel_count());
    for (int c = 0; c < img.channels; ++c) {
        for (size_t p = 0; p < plane.size(); ++p) plane[p] = img.data[p * img.channels + c];
        os.write(reinterpret_cast<const char*>(plane.data()), static_cast<std::streamsize>(plane.size() * sizeof(float)));
    }
    if (!os) throw DataError("write failed: " + path.string());
}

RasterImage read_tensor(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open tensor file: " + path.string());
    binio::expect_magic(is, "LBL1", "LBL1");
    const uint32_t w = binio::get<uint32_t>(is, "width");
    const uint32_t h = binio::get<uint32_t>(is, "height");
    const uint32_t c = binio::get<uint32_t>(is, "channels");
    if (w == 0 || h == 0 || c == 0 || uint64_t(w) * h * c > (uint64_t(1) << 31))
        throw DataError("implausible LBL1 dimensions in " + path.string());
    RasterImage img(static_cast<int>(w), static_cast<int>(h), static_cast<int>(c));
    std::vector<float> plane(img.pixel_count());
    for (uint32_t ch = 0; ch < c; ++ch) {
        if (!is.read(reinterpret_cast<char*>(plane.data()), static_cast<std::streamsize>(plane.size() * sizeof(float))))
            throw DataError("truncated LBL1 file: " + path.string());
        for (size_t p = 0; p < plane.size(); ++p) img.data[p * c + ch] = plane[p];
    }
    if (is.peek() != std::char_traits<char>::eof()) throw DataError("trailing bytes in LBL1 file: " + path.string());
    return img;
}

RasterImage read_image(const std::filesystem::path& path)
{
    const auto ext = path.extension().string();
    if (ext == ".png" || ext == ".PNG") return read_png(path);
    if (ext == ".lbl") return read_tensor(path);
    throw DataError("unsupported image extension: " + path.string());
}

RasterImage slice_channels(const RasterImage& img, int first, int count)
{
    if (first < 0 || count <= 0 || first + count > img.channels) throw DataError("channel slice out of range");
    RasterImage out(img.width, img.height, count);
    for (size_t p = 0; p < img.pixel_count(); ++p)
        for (int c = 0; c < count; ++c) out.data[p * count + c] = img.data[p * img.channels + first + c];
    return out;
}

} // namespace meshlabel
