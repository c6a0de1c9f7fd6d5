#ifndef CBIR_GFD_HPP
#define CBIR_GFD_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "cbir/errors.hpp"
#include "cbir/imgproc.hpp"

namespace cbir {

/**
 * Binary leaf signature resampled onto a centroid-centered polar grid.
 * Row r of `samples` holds the angular_bins samples of the ring at radius
 * (r + 0.5) / radial_bins * max_radius; angles are theta_i = i * 2pi / T.
 */
struct PolarGrid {
    int radial_bins = 0;
    int angular_bins = 0;
    double max_radius = 0.0; // pixels, centroid to farthest contour point
    Point2d origin;          // centroid
    std::vector<std::uint8_t> samples; // row-major (radial, angular), values {0,1}

    std::uint8_t at(int r, int i) const {
        return samples[static_cast<std::size_t>(r) * angular_bins + i];
    }
};

inline PolarGrid to_polar(const LeafMask& leaf, int radial_bins, int angular_bins) {
    if (radial_bins < 1 || angular_bins < 1)
        throw input_error("to_polar: bin counts must be positive");
    if (leaf.contour.empty() || leaf.area <= 0.0)
        throw degenerate_geometry_error("to_polar: empty mask");

    PolarGrid grid;
    grid.radial_bins = radial_bins;
    grid.angular_bins = angular_bins;
    grid.origin = leaf.centroid;
    for (const PixelCoord& p : leaf.contour)
        grid.max_radius = std::max(grid.max_radius,
                                   std::hypot(p.x - leaf.centroid.x, p.y - leaf.centroid.y));
    if (grid.max_radius <= 0.0)
        throw degenerate_geometry_error("to_polar: degenerate radius");

    grid.samples.resize(static_cast<std::size_t>(radial_bins) * angular_bins, 0);
    const double two_pi = 2.0 * std::numbers::pi;
    for (int r = 0; r < radial_bins; ++r) {
        const double radius = (r + 0.5) * grid.max_radius / radial_bins;
        for (int i = 0; i < angular_bins; ++i) {
            const double theta = i * two_pi / angular_bins;
            const int x = static_cast<int>(std::lround(grid.origin.x + radius * std::cos(theta)));
            const int y = static_cast<int>(std::lround(grid.origin.y + radius * std::sin(theta)));
            if (leaf.mask.in_bounds(x, y) && leaf.mask.at(x, y) != 0)
                grid.samples[static_cast<std::size_t>(r) * angular_bins + i] = 1;
        }
    }
    return grid;
}

/**
 * Direct polar Fourier summation: for each frequency pair (rho, phi)
 *
 *   PF(rho, phi) = sum_r sum_i f(r, i) * exp(j 2pi (r rho / R + i phi / T))
 *
 * over radial index r and angular index i. Returns the (m+1) x (n+1)
 * coefficient table in rho-major order.
 */
inline std::vector<std::complex<double>> polar_fourier(const PolarGrid& grid, int m, int n) {
    if (m < 0 || n < 0)
        throw input_error("polar_fourier: negative frequency bounds");
    const int rows = grid.radial_bins;
    const int cols = grid.angular_bins;
    const double two_pi = 2.0 * std::numbers::pi;

    std::vector<std::complex<double>> coeffs(static_cast<std::size_t>(m + 1) * (n + 1));
    // Factor the sum: angular transform per ring, then the radial transform.
    std::vector<std::complex<double>> ring(static_cast<std::size_t>(n + 1));
    for (int phi = 0; phi <= n; ++phi) {
        for (int rho = 0; rho <= m; ++rho)
            coeffs[static_cast<std::size_t>(rho) * (n + 1) + phi] = {0.0, 0.0};
    }
    for (int r = 0; r < rows; ++r) {
        for (int phi = 0; phi <= n; ++phi) {
            std::complex<double> acc{0.0, 0.0};
            for (int i = 0; i < cols; ++i) {
                if (grid.at(r, i) == 0)
                    continue;
                const double angle = two_pi * phi * i / cols;
                acc += std::complex<double>(std::cos(angle), std::sin(angle));
            }
            ring[phi] = acc;
        }
        for (int rho = 0; rho <= m; ++rho) {
            const double angle = two_pi * rho * r / rows;
            const std::complex<double> radial(std::cos(angle), std::sin(angle));
            for (int phi = 0; phi <= n; ++phi)
                coeffs[static_cast<std::size_t>(rho) * (n + 1) + phi] += radial * ring[phi];
        }
    }
    return coeffs;
}

struct GfdVector {
    std::vector<double> values; // (m+1)(n+1) magnitudes, rho-major

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

/**
 * Magnitude descriptors: the DC magnitude normalized by the given circle
 * area, all remaining magnitudes normalized by |PF(0,0)|.
 */
inline GfdVector gfd_descriptors(const std::vector<std::complex<double>>& coeffs,
                                 double circle_area, int m, int n) {
    if (coeffs.size() != static_cast<std::size_t>(m + 1) * (n + 1))
        throw input_error("gfd_descriptors: coefficient table size mismatch");
    const double dc = std::abs(coeffs[0]);
    if (dc <= 0.0)
        throw empty_shape_error("gfd_descriptors: |PF(0,0)| is zero");
    if (circle_area <= 0.0)
        throw input_error("gfd_descriptors: non-positive circle area");

    GfdVector out;
    out.values.reserve(coeffs.size());
    out.values.push_back(dc / circle_area);
    for (std::size_t k = 1; k < coeffs.size(); ++k)
        out.values.push_back(std::abs(coeffs[k]) / dc);
    return out;
}

inline constexpr int kGfdRadialFreq = 6;  // m
inline constexpr int kGfdAngularFreq = 4; // n
inline constexpr int kGfdLength = (kGfdRadialFreq + 1) * (kGfdAngularFreq + 1);

/**
 * Full pipeline for one leaf. The normalizing circle area is taken in polar
 * sample units (2pi * radial_bins^2): the grid is already scale-normalized
 * by sampling radii relative to max_radius, so the DC count divided by the
 * sampled circle's own area stays scale-invariant.
 */
inline GfdVector gfd_of_mask(const LeafMask& leaf, int radial_bins = 64,
                             int angular_bins = 90, int m = kGfdRadialFreq,
                             int n = kGfdAngularFreq) {
    const PolarGrid grid = to_polar(leaf, radial_bins, angular_bins);
    const auto coeffs = polar_fourier(grid, m, n);
    const double circle_area = 2.0 * std::numbers::pi
                             * static_cast<double>(radial_bins) * radial_bins;
    return gfd_descriptors(coeffs, circle_area, m, n);
}

} // namespace cbir

#endif // CBIR_GFD_HPP
