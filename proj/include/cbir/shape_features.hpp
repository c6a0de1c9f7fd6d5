#ifndef CBIR_SHAPE_FEATURES_HPP
#define CBIR_SHAPE_FEATURES_HPP

#include <array>
#include <cmath>
#include <limits>

#include "cbir/errors.hpp"
#include "cbir/imgproc.hpp"

namespace cbir {

struct GeometricFeatures {
    double eccentricity = 0.0; // minor / major axis
    double roundness = 0.0;    // area / perimeter^2, no 4*pi factor
    double dispersion = 0.0;   // max / min centroid-to-contour distance
    double solidity = 0.0;     // area / convex area
    double convexity = 0.0;    // convex perimeter / perimeter

    std::array<double, 5> to_array() const {
        return {eccentricity, roundness, dispersion, solidity, convexity};
    }
};

inline double eccentricity(const LeafMask& leaf) {
    if (leaf.major_axis <= 0.0)
        throw degenerate_geometry_error("eccentricity: zero major axis");
    return leaf.minor_axis / leaf.major_axis;
}

// Kept literal (no 4*pi): the constant is absorbed by feature normalization.
inline double roundness(const LeafMask& leaf) {
    if (leaf.perimeter <= 0.0)
        throw degenerate_geometry_error("roundness: zero perimeter");
    return leaf.area / (leaf.perimeter * leaf.perimeter);
}

inline double dispersion(const LeafMask& leaf) {
    if (leaf.contour.empty())
        throw degenerate_geometry_error("dispersion: empty contour");
    double max_r = 0.0;
    double min_r = std::numeric_limits<double>::infinity();
    for (const PixelCoord& p : leaf.contour) {
        const double r = std::hypot(p.x - leaf.centroid.x, p.y - leaf.centroid.y);
        max_r = std::max(max_r, r);
        min_r = std::min(min_r, r);
    }
    if (min_r <= 1e-9)
        throw degenerate_geometry_error("dispersion: centroid lies on the contour");
    return max_r / min_r;
}

inline double solidity(const LeafMask& leaf) {
    if (leaf.convex_area <= 0.0)
        throw degenerate_geometry_error("solidity: zero convex area");
    return leaf.area / leaf.convex_area;
}

inline double convexity(const LeafMask& leaf) {
    if (leaf.perimeter <= 0.0)
        throw degenerate_geometry_error("convexity: zero perimeter");
    return leaf.convex_perimeter / leaf.perimeter;
}

inline GeometricFeatures geometric_features(const LeafMask& leaf) {
    GeometricFeatures f;
    f.eccentricity = eccentricity(leaf);
    f.roundness = roundness(leaf);
    f.dispersion = dispersion(leaf);
    f.solidity = solidity(leaf);
    f.convexity = convexity(leaf);
    return f;
}

} // namespace cbir

#endif // CBIR_SHAPE_FEATURES_HPP
