#ifndef CBIR_FEATURES_HPP
#define CBIR_FEATURES_HPP

#include <array>
#include <cstdint>
#include <string>

#include "cbir/color_vein.hpp"
#include "cbir/gfd.hpp"
#include "cbir/imgproc.hpp"
#include "cbir/shape_features.hpp"
#include "cbir/texture.hpp"

namespace cbir {

inline constexpr int kShapeLength = 5 + kGfdLength; // 5 geometric + 35 GFD
inline constexpr int kColorLength = 9;
inline constexpr int kTextureLength = 5;
inline constexpr int kVeinLength = 2;
inline constexpr int kFeatureLength = kShapeLength + kColorLength + kTextureLength + kVeinLength;

static_assert(kShapeLength == 40);
static_assert(kFeatureLength == 56);

struct ExtractionParams {
    int gray_levels = 8;   // GLCM quantization
    int radial_bins = 64;  // polar grid
    int angular_bins = 90;
    int gfd_m = kGfdRadialFreq;
    int gfd_n = kGfdAngularFreq;
    bool idm_literal = true; // squared numerator in the IDM
    int vein_margin = 2;     // mask erosion radius excluding the leaf edge

    friend bool operator==(const ExtractionParams&, const ExtractionParams&) = default;
};

/**
 * The four named feature groups of one leaf. Flattened order is
 * shape (eccentricity, roundness, dispersion, solidity, convexity,
 * 35 GFD magnitudes), color (mean/stddev/skewness per R, G, B plane),
 * texture (ASM, contrast, IDM, entropy, correlation) and vein (V1, V2).
 */
struct FeatureVector {
    std::array<double, kShapeLength> shape{};
    std::array<double, kColorLength> color{};
    std::array<double, kTextureLength> texture{};
    std::array<double, kVeinLength> vein{};
    std::string leaf_id;
    std::string species;

    std::array<double, kFeatureLength> flatten() const {
        std::array<double, kFeatureLength> flat{};
        std::size_t k = 0;
        for (double v : shape) flat[k++] = v;
        for (double v : color) flat[k++] = v;
        for (double v : texture) flat[k++] = v;
        for (double v : vein) flat[k++] = v;
        return flat;
    }
};

// Group boundaries inside the flattened 56-vector.
struct FeatureGroupSpan {
    std::size_t offset;
    std::size_t length;
};

inline constexpr std::array<FeatureGroupSpan, 4> kFeatureGroups = {{
    {0, kShapeLength},
    {kShapeLength, kColorLength},
    {kShapeLength + kColorLength, kTextureLength},
    {kShapeLength + kColorLength + kTextureLength, kVeinLength},
}};

inline constexpr std::array<const char*, 4> kFeatureGroupNames = {
    "shape", "color", "texture", "vein"
};

// FNV-1a hash of the feature layout; persisted with every index so stale
// files are rejected on load.
inline std::uint64_t feature_layout_hash() {
    const std::string layout = "shape:5+35|color:9|texture:5|vein:2";
    std::uint64_t h = 1469598103934665603ull;
    for (char c : layout) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

/**
 * Extracts the full 56-value feature vector from a segmented leaf.
 * Grayscale inputs are treated as having identical R, G and B planes.
 */
inline FeatureVector extract_features(const RasterImage& img,
                                      const ExtractionParams& params = {}) {
    const LeafMask leaf = segment_leaf(img);
    const RasterImage gray = (img.channels == 3) ? to_grayscale(img) : img;

    FeatureVector fv;
    const GeometricFeatures geo = geometric_features(leaf);
    const auto geo_arr = geo.to_array();
    const GfdVector gfd = gfd_of_mask(leaf, params.radial_bins, params.angular_bins,
                                      params.gfd_m, params.gfd_n);
    std::size_t k = 0;
    for (double v : geo_arr)
        fv.shape[k++] = v;
    for (double v : gfd.values)
        fv.shape[k++] = v;

    ColorFeatures col;
    if (img.channels == 3) {
        col = color_moments(img, leaf.mask);
    } else {
        RasterImage rgb = RasterImage::make(img.width, img.height, 3);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                for (int c = 0; c < 3; ++c)
                    rgb.at(x, y, c) = img.at(x, y);
        col = color_moments(rgb, leaf.mask);
    }
    fv.color = col.to_array();

    fv.texture = texture_features(gray, leaf.mask, params.gray_levels,
                                  params.idm_literal).to_array();
    fv.vein = vein_features(gray, leaf.mask, params.vein_margin).to_array();
    return fv;
}

} // namespace cbir

#endif // CBIR_FEATURES_HPP
