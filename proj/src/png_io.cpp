#include "vsod/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace vsod {

namespace {

std::vector<uint8_t> read_png_bytes(const std::string& path, uint32_t format, int channels,
                                    int* h, int* w) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str()))
        throw std::runtime_error("png read failed: " + path + ": " + image.message);
    image.format = format;
    std::vector<uint8_t> buf(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw std::runtime_error("png read failed: " + path + ": " + msg);
    }
    *h = static_cast<int>(image.height);
    *w = static_cast<int>(image.width);
    if (buf.size() != static_cast<size_t>(*h) * *w * channels)
        throw std::runtime_error("png read: unexpected buffer size for " + path);
    return buf;
}

}  // namespace

uint8_t quantize8(double v) {
    double q = std::round(std::clamp(v, 0.0, 1.0) * 255.0);
    return static_cast<uint8_t>(q);
}

GrayMap read_gray_png(const std::string& path) {
    int h = 0, w = 0;
    std::vector<uint8_t> buf = read_png_bytes(path, PNG_FORMAT_GRAY, 1, &h, &w);
    GrayMap m(h, w);
    for (size_t i = 0; i < m.v.size(); ++i) m.v[i] = buf[i] / 255.0;
    return m;
}

RgbImage read_rgb_png(const std::string& path) {
    int h = 0, w = 0;
    std::vector<uint8_t> buf = read_png_bytes(path, PNG_FORMAT_RGB, 3, &h, &w);
    RgbImage img(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            for (int ch = 0; ch < 3; ++ch)
                img.at(ch, r, c) = buf[(static_cast<size_t>(r) * w + c) * 3 + ch] / 255.0;
    return img;
}

void write_gray_png(const std::string& path, const GrayMap& m) {
    std::vector<uint8_t> buf(m.v.size());
    for (size_t i = 0; i < buf.size(); ++i) buf[i] = quantize8(m.v[i]);
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(m.w);
    image.height = static_cast<png_uint_32>(m.h);
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.c_str(), 0, buf.data(), 0, nullptr))
        throw std::runtime_error("png write failed: " + path + ": " + image.message);
}

void write_rgb_png(const std::string& path, const RgbImage& img) {
    std::vector<uint8_t> buf(3 * static_cast<size_t>(img.h) * img.w);
    for (int r = 0; r < img.h; ++r)
        for (int c = 0; c < img.w; ++c)
            for (int ch = 0; ch < 3; ++ch)
                buf[(static_cast<size_t>(r) * img.w + c) * 3 + ch] = quantize8(img.at(ch, r, c));
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.w);
    image.height = static_cast<png_uint_32>(img.h);
    image.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.c_str(), 0, buf.data(), 0, nullptr))
        throw std::runtime_error("png write failed: " + path + ": " + image.message);
}

}  // namespace vsod
