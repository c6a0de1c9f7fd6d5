#ifndef CBIR_TEXTURE_HPP
#define CBIR_TEXTURE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cbir/errors.hpp"
#include "cbir/raster.hpp"

namespace cbir {

enum class GlcmDirection { deg0, deg45, deg90, deg135 };

inline constexpr std::array<GlcmDirection, 4> kGlcmDirections = {
    GlcmDirection::deg0, GlcmDirection::deg45, GlcmDirection::deg90, GlcmDirection::deg135
};

// Pixel offset at distance 1 for a direction, in image coordinates (y down).
inline std::pair<int, int> glcm_offset(GlcmDirection dir) {
    switch (dir) {
        case GlcmDirection::deg0: return {1, 0};
        case GlcmDirection::deg45: return {1, -1};
        case GlcmDirection::deg90: return {0, -1};
        case GlcmDirection::deg135: return {-1, -1};
    }
    return {1, 0};
}

/**
 * Gray-level co-occurrence matrix at distance 1, normalized to sum 1,
 * accumulated symmetrically (each pair counted in both orders).
 */
struct Glcm {
    int levels = 0;
    GlcmDirection direction = GlcmDirection::deg0;
    std::vector<double> p; // levels x levels, row-major

    double at(int i, int j) const {
        return p[static_cast<std::size_t>(i) * levels + j];
    }
};

// Uniform quantization of [0, 255] into L levels.
inline int quantize_level(std::uint8_t value, int levels) {
    return static_cast<int>(value) * levels / 256;
}

/**
 * Counts co-occurring pixel pairs (p, p + offset) with both pixels inside
 * the mask. Throws degenerate_texture_error when no pair exists.
 */
inline Glcm build_glcm(const RasterImage& gray, const RasterImage& mask,
                       GlcmDirection direction, int levels) {
    if (gray.channels != 1)
        throw input_error("build_glcm: expected a 1-channel image");
    if (levels < 2)
        throw input_error("build_glcm: need at least 2 gray levels");
    if (mask.width != gray.width || mask.height != gray.height || mask.channels != 1)
        throw input_error("build_glcm: mask does not match the image");

    const auto [dx, dy] = glcm_offset(direction);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(levels) * levels, 0);
    std::uint64_t total = 0;
    for (int y = 0; y < gray.height; ++y) {
        for (int x = 0; x < gray.width; ++x) {
            if (mask.at(x, y) == 0)
                continue;
            const int nx = x + dx;
            const int ny = y + dy;
            if (!gray.in_bounds(nx, ny) || mask.at(nx, ny) == 0)
                continue;
            const int a = quantize_level(gray.at(x, y), levels);
            const int b = quantize_level(gray.at(nx, ny), levels);
            ++counts[static_cast<std::size_t>(a) * levels + b];
            ++counts[static_cast<std::size_t>(b) * levels + a];
            total += 2;
        }
    }
    if (total == 0)
        throw degenerate_texture_error("build_glcm: no co-occurring pairs inside the mask");

    Glcm glcm;
    glcm.levels = levels;
    glcm.direction = direction;
    glcm.p.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        glcm.p[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    return glcm;
}

struct TextureFeatures {
    double angular_second_moment = 0.0;
    double contrast = 0.0;
    double inverse_difference_moment = 0.0;
    double entropy = 0.0;
    double correlation = 0.0;

    std::array<double, 5> to_array() const {
        return {angular_second_moment, contrast, inverse_difference_moment,
                entropy, correlation};
    }
};

/**
 * Scalar features of a single GLCM. `idm_literal` keeps the squared
 * numerator in the inverse difference moment; the conventional unsquared
 * variant sits behind the flag.
 *
 * Correlation uses the standard covariance form
 * (sum_ij i*j*p(i,j) - mu_i mu_j) / (sigma_i sigma_j) and returns 0 when a
 * marginal variance vanishes. Entropy uses the natural log with
 * 0*log(0) := 0.
 */
inline TextureFeatures glcm_features(const Glcm& glcm, bool idm_literal = true) {
    const int L = glcm.levels;
    TextureFeatures f;
    double mean_i = 0.0, mean_j = 0.0;
    double weighted_ij = 0.0;
    for (int i = 0; i < L; ++i) {
        for (int j = 0; j < L; ++j) {
            const double p = glcm.at(i, j);
            const double diff = static_cast<double>(i - j);
            f.angular_second_moment += p * p;
            f.contrast += diff * diff * p;
            f.inverse_difference_moment += (idm_literal ? p * p : p) / (1.0 + diff * diff);
            if (p > 0.0)
                f.entropy -= p * std::log(p);
            mean_i += i * p;
            mean_j += j * p;
            weighted_ij += static_cast<double>(i) * j * p;
        }
    }
    double var_i = 0.0, var_j = 0.0;
    for (int i = 0; i < L; ++i) {
        for (int j = 0; j < L; ++j) {
            const double p = glcm.at(i, j);
            var_i += p * (i - mean_i) * (i - mean_i);
            var_j += p * (j - mean_j) * (j - mean_j);
        }
    }
    if (var_i > 0.0 && var_j > 0.0)
        f.correlation = (weighted_ij - mean_i * mean_j) / std::sqrt(var_i * var_j);
    return f;
}

// Four-direction average of every scalar feature.
inline TextureFeatures texture_features(const RasterImage& gray, const RasterImage& mask,
                                        int levels = 8, bool idm_literal = true) {
    TextureFeatures avg;
    for (GlcmDirection dir : kGlcmDirections) {
        const TextureFeatures f = glcm_features(build_glcm(gray, mask, dir, levels), idm_literal);
        avg.angular_second_moment += f.angular_second_moment;
        avg.contrast += f.contrast;
        avg.inverse_difference_moment += f.inverse_difference_moment;
        avg.entropy += f.entropy;
        avg.correlation += f.correlation;
    }
    avg.angular_second_moment /= 4.0;
    avg.contrast /= 4.0;
    avg.inverse_difference_moment /= 4.0;
    avg.entropy /= 4.0;
    avg.correlation /= 4.0;
    return avg;
}

} // namespace cbir

#endif // CBIR_TEXTURE_HPP
