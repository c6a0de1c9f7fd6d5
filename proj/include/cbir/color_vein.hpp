#ifndef CBIR_COLOR_VEIN_HPP
#define CBIR_COLOR_VEIN_HPP

#include <array>
#include <cmath>
#include <cstdint>

#include "cbir/errors.hpp"
#include "cbir/imgproc.hpp"
#include "cbir/raster.hpp"

namespace cbir {

struct PlaneMoments {
    double mean = 0.0;
    double stddev = 0.0;   // population standard deviation
    double skewness = 0.0; // third standardized moment, 0 when stddev is 0
};

struct ColorFeatures {
    std::array<PlaneMoments, 3> planes; // R, G, B

    std::array<double, 9> to_array() const {
        return {planes[0].mean, planes[0].stddev, planes[0].skewness,
                planes[1].mean, planes[1].stddev, planes[1].skewness,
                planes[2].mean, planes[2].stddev, planes[2].skewness};
    }
};

// Mean, standard deviation and skewness of each RGB plane over the masked
// pixels only; background color is not a leaf property.
inline ColorFeatures color_moments(const RasterImage& img, const RasterImage& mask) {
    if (img.channels != 3)
        throw input_error("color_moments: expected a 3-channel image");
    if (mask.width != img.width || mask.height != img.height || mask.channels != 1)
        throw input_error("color_moments: mask does not match the image");

    ColorFeatures out;
    for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        std::uint64_t count = 0;
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                if (mask.at(x, y) != 0) {
                    sum += img.at(x, y, c);
                    ++count;
                }
        if (count == 0)
            throw degenerate_geometry_error("color_moments: empty mask");
        const double mean = sum / static_cast<double>(count);

        double sum2 = 0.0, sum3 = 0.0;
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                if (mask.at(x, y) != 0) {
                    const double d = img.at(x, y, c) - mean;
                    sum2 += d * d;
                    sum3 += d * d * d;
                }
        const double variance = sum2 / static_cast<double>(count);
        const double stddev = std::sqrt(variance);
        out.planes[c].mean = mean;
        out.planes[c].stddev = stddev;
        out.planes[c].skewness =
            stddev > 0.0 ? sum3 / (static_cast<double>(count) * stddev * stddev * stddev) : 0.0;
    }
    return out;
}

struct VeinFeatures {
    double v1 = 0.0; // vein pixel fraction, radius-1 structuring element
    double v2 = 0.0; // vein pixel fraction, radius-2 structuring element

    std::array<double, 2> to_array() const { return {v1, v2}; }
};

// Top-hat residual: image minus its opening. Nonnegative since the opening
// is anti-extensive.
inline RasterImage vein_residual(const RasterImage& gray, int radius) {
    const RasterImage opened = morphological_open(gray, radius);
    RasterImage residual = RasterImage::make(gray.width, gray.height, 1);
    for (std::size_t i = 0; i < residual.pixels.size(); ++i)
        residual.pixels[i] = static_cast<std::uint8_t>(gray.pixels[i] - opened.pixels[i]);
    return residual;
}

namespace detail {

inline std::uint64_t count_vein_pixels(const RasterImage& residual,
                                       const RasterImage& interior) {
    // Otsu over the nonzero residual values inside the interior; zeros carry
    // no ridge evidence and would swamp the histogram.
    std::array<std::uint64_t, 256> hist{};
    std::uint64_t nonzero = 0;
    for (std::size_t i = 0; i < residual.pixels.size(); ++i)
        if (interior.pixels[i] != 0 && residual.pixels[i] > 0) {
            ++hist[residual.pixels[i]];
            ++nonzero;
        }
    if (nonzero == 0)
        return 0;
    const int threshold = otsu_threshold(hist);
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < residual.pixels.size(); ++i)
        if (interior.pixels[i] != 0 && residual.pixels[i] > threshold)
            ++count;
    return count;
}

} // namespace detail

/**
 * Vein density features V_k = A_k / A for structuring-element radii 1 and
 * 2, where A_k counts top-hat residual pixels above an adaptive threshold.
 * The residual is taken on the leaf interior (mask eroded by `margin`) so
 * the leaf edge does not pose as a vein.
 */
inline VeinFeatures vein_features(const RasterImage& gray, const RasterImage& mask,
                                  int margin = 2) {
    if (gray.channels != 1)
        throw input_error("vein_features: expected a 1-channel image");
    if (mask.width != gray.width || mask.height != gray.height || mask.channels != 1)
        throw input_error("vein_features: mask does not match the image");

    std::uint64_t area = 0;
    for (std::uint8_t v : mask.pixels)
        if (v != 0)
            ++area;
    if (area == 0)
        throw degenerate_geometry_error("vein_features: empty mask");

    const RasterImage interior = margin >= 1 ? binary_erode(mask, margin) : mask;

    VeinFeatures out;
    const double a = static_cast<double>(area);
    out.v1 = static_cast<double>(detail::count_vein_pixels(vein_residual(gray, 1), interior)) / a;
    out.v2 = static_cast<double>(detail::count_vein_pixels(vein_residual(gray, 2), interior)) / a;
    return out;
}

} // namespace cbir

#endif // CBIR_COLOR_VEIN_HPP
