#ifndef CBIR_RASTER_HPP
#define CBIR_RASTER_HPP

#include <cstdint>
#include <vector>

#include "cbir/errors.hpp"

namespace cbir {

struct PixelCoord {
    int x = 0;
    int y = 0;

    friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

struct Point2d {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2d&, const Point2d&) = default;
};

/**
 * Row-major 8-bit raster with 1 (gray/binary) or 3 (RGB) interleaved
 * channels. Binary images store only the values {0, 1}.
 */
struct RasterImage {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> pixels;

    static RasterImage make(int width, int height, int channels, std::uint8_t fill = 0) {
        if (width <= 0 || height <= 0 || (channels != 1 && channels != 3))
            throw input_error("RasterImage::make: invalid dimensions");
        RasterImage img;
        img.width = width;
        img.height = height;
        img.channels = channels;
        img.pixels.assign(static_cast<std::size_t>(width) * height * channels, fill);
        return img;
    }

    bool empty() const { return pixels.empty(); }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }

    std::uint8_t& at(int x, int y, int c = 0) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    std::uint8_t at(int x, int y, int c = 0) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;
};

inline bool is_binary(const RasterImage& img) {
    if (img.channels != 1)
        return false;
    for (std::uint8_t v : img.pixels)
        if (v > 1)
            return false;
    return true;
}

} // namespace cbir

#endif // CBIR_RASTER_HPP
