#ifndef CBIR_IMGPROC_HPP
#define CBIR_IMGPROC_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "cbir/errors.hpp"
#include "cbir/raster.hpp"

namespace cbir {

// ------------------------------------------------------------
// Grayscale conversion and thresholding
// ------------------------------------------------------------

inline RasterImage to_grayscale(const RasterImage& img) {
    if (img.channels != 3)
        throw input_error("to_grayscale: expected a 3-channel image");
    RasterImage gray = RasterImage::make(img.width, img.height, 1);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double lum = 0.299 * img.at(x, y, 0)
                             + 0.587 * img.at(x, y, 1)
                             + 0.114 * img.at(x, y, 2);
            gray.at(x, y) = static_cast<std::uint8_t>(std::lround(lum));
        }
    }
    return gray;
}

/**
 * Otsu's threshold over a 256-bin histogram. Returns the smallest t that
 * maximizes the between-class variance; foreground is the side > t.
 */
inline int otsu_threshold(const std::array<std::uint64_t, 256>& hist) {
    std::uint64_t total = 0;
    double weighted_sum = 0.0;
    for (int i = 0; i < 256; ++i) {
        total += hist[i];
        weighted_sum += static_cast<double>(i) * hist[i];
    }
    if (total == 0)
        return 0;

    double sum_below = 0.0;
    std::uint64_t count_below = 0;
    double best_variance = -1.0;
    int best_t = 0;
    for (int t = 0; t < 255; ++t) {
        count_below += hist[t];
        sum_below += static_cast<double>(t) * hist[t];
        const std::uint64_t count_above = total - count_below;
        if (count_below == 0 || count_above == 0)
            continue;
        const double mean_below = sum_below / count_below;
        const double mean_above = (weighted_sum - sum_below) / count_above;
        const double variance = static_cast<double>(count_below) * count_above
                              * (mean_below - mean_above) * (mean_below - mean_above);
        if (variance > best_variance) {
            best_variance = variance;
            best_t = t;
        }
    }
    return best_t;
}

inline std::array<std::uint64_t, 256> intensity_histogram(const RasterImage& gray) {
    if (gray.channels != 1)
        throw input_error("intensity_histogram: expected a 1-channel image");
    std::array<std::uint64_t, 256> hist{};
    for (std::uint8_t v : gray.pixels)
        ++hist[v];
    return hist;
}

// ------------------------------------------------------------
// Flat disk morphology
// ------------------------------------------------------------

// Offsets (dx, dy) with dx^2 + dy^2 <= radius^2, row-major order.
inline std::vector<std::pair<int, int>> disk_offsets(int radius) {
    std::vector<std::pair<int, int>> offsets;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius)
                offsets.emplace_back(dx, dy);
    return offsets;
}

namespace detail {

enum class WindowOp { minimum, maximum };

inline RasterImage disk_window(const RasterImage& img, int radius, WindowOp op) {
    RasterImage out = RasterImage::make(img.width, img.height, 1);
    const auto offsets = disk_offsets(radius);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            int value = (op == WindowOp::minimum) ? 255 : 0;
            for (const auto& [dx, dy] : offsets) {
                const int nx = x + dx;
                const int ny = y + dy;
                if (!img.in_bounds(nx, ny))
                    continue;
                const int v = img.at(nx, ny);
                value = (op == WindowOp::minimum) ? std::min(value, v) : std::max(value, v);
            }
            out.at(x, y) = static_cast<std::uint8_t>(value);
        }
    }
    return out;
}

} // namespace detail

/**
 * Grayscale opening with a flat disk structuring element: erosion (windowed
 * minimum) followed by dilation (windowed maximum). Window positions falling
 * outside the image are ignored, which keeps the operator anti-extensive
 * and idempotent on the finite domain.
 */
inline RasterImage morphological_open(const RasterImage& img, int radius) {
    if (img.channels != 1)
        throw input_error("morphological_open: expected a 1-channel image");
    if (radius < 1)
        throw input_error("morphological_open: radius must be >= 1");
    return detail::disk_window(detail::disk_window(img, radius, detail::WindowOp::minimum),
                               radius, detail::WindowOp::maximum);
}

// Binary erosion with a flat disk; pixels beyond the border count as 0.
inline RasterImage binary_erode(const RasterImage& mask, int radius) {
    if (mask.channels != 1)
        throw input_error("binary_erode: expected a 1-channel image");
    if (radius < 1)
        throw input_error("binary_erode: radius must be >= 1");
    RasterImage out = RasterImage::make(mask.width, mask.height, 1);
    const auto offsets = disk_offsets(radius);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            bool keep = true;
            for (const auto& [dx, dy] : offsets) {
                const int nx = x + dx;
                const int ny = y + dy;
                if (!mask.in_bounds(nx, ny) || mask.at(nx, ny) == 0) {
                    keep = false;
                    break;
                }
            }
            out.at(x, y) = keep ? 1 : 0;
        }
    }
    return out;
}

// ------------------------------------------------------------
// Connected components and hole filling
// ------------------------------------------------------------

namespace detail {

// Keeps only the largest 8-connected foreground component. Ties go to the
// component discovered first in row-major scan order.
inline RasterImage largest_component(const RasterImage& binary) {
    const int w = binary.width;
    const int h = binary.height;
    std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
    std::vector<std::size_t> sizes;
    std::vector<int> stack;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int idx = y * w + x;
            if (binary.pixels[idx] == 0 || label[idx] >= 0)
                continue;
            const int id = static_cast<int>(sizes.size());
            sizes.push_back(0);
            stack.push_back(idx);
            label[idx] = id;
            while (!stack.empty()) {
                const int cur = stack.back();
                stack.pop_back();
                ++sizes[id];
                const int cx = cur % w;
                const int cy = cur / w;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx;
                        const int ny = cy + dy;
                        if (nx < 0 || nx >= w || ny < 0 || ny >= h)
                            continue;
                        const int nidx = ny * w + nx;
                        if (binary.pixels[nidx] != 0 && label[nidx] < 0) {
                            label[nidx] = id;
                            stack.push_back(nidx);
                        }
                    }
                }
            }
        }
    }
    if (sizes.empty())
        throw segmentation_error("segment_leaf: threshold yields no foreground");

    int best = 0;
    for (int id = 1; id < static_cast<int>(sizes.size()); ++id)
        if (sizes[id] > sizes[best])
            best = id;

    RasterImage out = RasterImage::make(w, h, 1);
    for (std::size_t i = 0; i < out.pixels.size(); ++i)
        out.pixels[i] = (label[i] == best) ? 1 : 0;
    return out;
}

// Fills holes: background pixels not 4-connected to the image border
// become foreground.
inline RasterImage fill_holes(const RasterImage& binary) {
    const int w = binary.width;
    const int h = binary.height;
    std::vector<std::uint8_t> outside(static_cast<std::size_t>(w) * h, 0);
    std::vector<int> stack;

    auto push_if_bg = [&](int x, int y) {
        if (x < 0 || x >= w || y < 0 || y >= h)
            return;
        const int idx = y * w + x;
        if (binary.pixels[idx] == 0 && !outside[idx]) {
            outside[idx] = 1;
            stack.push_back(idx);
        }
    };

    for (int x = 0; x < w; ++x) {
        push_if_bg(x, 0);
        push_if_bg(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        push_if_bg(0, y);
        push_if_bg(w - 1, y);
    }
    while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        const int cx = cur % w;
        const int cy = cur / w;
        push_if_bg(cx - 1, cy);
        push_if_bg(cx + 1, cy);
        push_if_bg(cx, cy - 1);
        push_if_bg(cx, cy + 1);
    }

    RasterImage out = RasterImage::make(w, h, 1);
    for (std::size_t i = 0; i < out.pixels.size(); ++i)
        out.pixels[i] = (binary.pixels[i] != 0 || !outside[i]) ? 1 : 0;
    return out;
}

} // namespace detail

// ------------------------------------------------------------
// Contour tracing
// ------------------------------------------------------------

/**
 * Moore-neighbor boundary tracing (8-connectivity) of a single filled
 * component, starting at the topmost-leftmost pixel. Returns the ordered
 * closed boundary; a single-pixel mask yields a one-element contour.
 */
inline std::vector<PixelCoord> trace_contour(const RasterImage& mask) {
    if (mask.channels != 1)
        throw input_error("trace_contour: expected a 1-channel image");

    PixelCoord start{-1, -1};
    for (int y = 0; y < mask.height && start.x < 0; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y) != 0) {
                start = {x, y};
                break;
            }
    if (start.x < 0)
        throw degenerate_geometry_error("trace_contour: empty mask");

    // Clockwise Moore neighborhood, starting east.
    static constexpr std::array<PixelCoord, 8> ring = {{
        {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}
    }};
    auto foreground = [&](PixelCoord p) {
        return mask.in_bounds(p.x, p.y) && mask.at(p.x, p.y) != 0;
    };

    std::vector<PixelCoord> contour{start};
    // The start pixel is topmost-leftmost, so its W/NW/N/NE neighbors are
    // background and entering "from the west" is a valid initial state.
    int backtrack = 4;
    PixelCoord current = start;
    int first_move = -1;
    const std::size_t step_limit = 4 * mask.pixels.size() + 16;

    for (std::size_t steps = 0; steps < step_limit; ++steps) {
        int found = -1;
        for (int k = 1; k <= 8; ++k) {
            const int dir = (backtrack + k) % 8;
            const PixelCoord cand{current.x + ring[dir].x, current.y + ring[dir].y};
            if (foreground(cand)) {
                found = dir;
                break;
            }
        }
        if (found < 0)
            return contour; // isolated pixel

        if (current == start) {
            // Jacob's stopping criterion: the walk is closed once the start
            // pixel would be left in the original direction a second time.
            if (first_move < 0)
                first_move = found;
            else if (found == first_move)
                break;
        }
        current = {current.x + ring[found].x, current.y + ring[found].y};
        contour.push_back(current);
        // The neighbor scanned just before `found` is background; point the
        // new backtrack at it so the clockwise scan resumes there.
        backtrack = ((found & ~1) + 6) % 8;
    }
    while (contour.size() > 1 && contour.back() == start)
        contour.pop_back();
    return contour;
}

// Closed digital boundary length: unit steps count 1, diagonal steps sqrt(2).
inline double contour_perimeter(const std::vector<PixelCoord>& contour) {
    if (contour.size() < 2)
        return 0.0;
    const double sqrt2 = std::sqrt(2.0);
    double length = 0.0;
    for (std::size_t i = 0; i < contour.size(); ++i) {
        const PixelCoord& a = contour[i];
        const PixelCoord& b = contour[(i + 1) % contour.size()];
        const int dx = std::abs(a.x - b.x);
        const int dy = std::abs(a.y - b.y);
        if (dx == 0 && dy == 0)
            continue;
        length += (dx + dy == 2 && dx == 1) ? sqrt2 : std::hypot(dx, dy);
    }
    return length;
}

// ------------------------------------------------------------
// Convex hull (Graham scan)
// ------------------------------------------------------------

inline double cross(const Point2d& o, const Point2d& a, const Point2d& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/**
 * Graham scan. Returns the minimal convex polygon in counter-clockwise
 * order (y grows upward), starting from the lowest-then-leftmost vertex.
 * Collinear boundary points are dropped.
 */
inline std::vector<Point2d> convex_hull(std::vector<Point2d> points) {
    std::sort(points.begin(), points.end(), [](const Point2d& a, const Point2d& b) {
        return a.y < b.y || (a.y == b.y && a.x < b.x);
    });
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (points.size() < 3)
        throw degenerate_geometry_error("convex_hull: need at least 3 distinct points");

    const Point2d pivot = points.front();
    std::sort(points.begin() + 1, points.end(), [&](const Point2d& a, const Point2d& b) {
        const double c = cross(pivot, a, b);
        if (c != 0.0)
            return c > 0.0;
        const double da = (a.x - pivot.x) * (a.x - pivot.x) + (a.y - pivot.y) * (a.y - pivot.y);
        const double db = (b.x - pivot.x) * (b.x - pivot.x) + (b.y - pivot.y) * (b.y - pivot.y);
        return da < db;
    });

    std::vector<Point2d> hull;
    for (const Point2d& p : points) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0.0)
            hull.pop_back();
        hull.push_back(p);
    }
    if (hull.size() < 3)
        throw degenerate_geometry_error("convex_hull: all points collinear");
    return hull;
}

inline double polygon_perimeter(const std::vector<Point2d>& polygon) {
    double length = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const Point2d& a = polygon[i];
        const Point2d& b = polygon[(i + 1) % polygon.size()];
        length += std::hypot(b.x - a.x, b.y - a.y);
    }
    return length;
}

/**
 * Counts lattice points inside or on a convex polygon with integer-valued
 * vertices (CCW). Evaluated in exact integer arithmetic so that every mask
 * pixel is provably counted when the hull came from its own contour.
 */
inline std::int64_t convex_polygon_lattice_count(const std::vector<Point2d>& hull) {
    const std::size_t n = hull.size();
    if (n < 3)
        throw degenerate_geometry_error("lattice count: degenerate polygon");

    std::vector<std::int64_t> xs(n), ys(n);
    double min_y = hull[0].y, max_y = hull[0].y;
    double min_x = hull[0].x, max_x = hull[0].x;
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = static_cast<std::int64_t>(std::llround(hull[i].x));
        ys[i] = static_cast<std::int64_t>(std::llround(hull[i].y));
        min_y = std::min(min_y, hull[i].y);
        max_y = std::max(max_y, hull[i].y);
        min_x = std::min(min_x, hull[i].x);
        max_x = std::max(max_x, hull[i].x);
    }

    std::int64_t count = 0;
    for (std::int64_t y = static_cast<std::int64_t>(std::ceil(min_y));
         y <= static_cast<std::int64_t>(std::floor(max_y)); ++y) {
        std::int64_t lo = static_cast<std::int64_t>(std::floor(min_x));
        std::int64_t hi = static_cast<std::int64_t>(std::ceil(max_x));
        bool feasible = true;
        for (std::size_t i = 0; i < n && feasible; ++i) {
            const std::int64_t x1 = xs[i], y1 = ys[i];
            const std::int64_t x2 = xs[(i + 1) % n], y2 = ys[(i + 1) % n];
            // Inside-or-on for CCW: (x2-x1)(y-y1) - (y2-y1)(x-x1) >= 0.
            const std::int64_t a = x2 - x1;
            const std::int64_t b = y2 - y1;
            const std::int64_t rhs = a * (y - y1) + b * x1;
            if (b > 0) {
                // x <= rhs / b
                std::int64_t bound = rhs >= 0 ? rhs / b : -((-rhs + b - 1) / b);
                hi = std::min(hi, bound);
            } else if (b < 0) {
                // x >= rhs / b  (division by negative flips the inequality)
                const std::int64_t nb = -b;
                const std::int64_t nrhs = -rhs;
                std::int64_t bound = nrhs >= 0 ? (nrhs + nb - 1) / nb : -((-nrhs) / nb);
                lo = std::max(lo, bound);
            } else if (a * (y - y1) < 0) {
                feasible = false;
            }
        }
        if (feasible && hi >= lo)
            count += hi - lo + 1;
    }
    return count;
}

// ------------------------------------------------------------
// Region moments and the leaf mask
// ------------------------------------------------------------

namespace detail {

struct RegionMoments {
    double area = 0.0;
    double mean_x = 0.0;
    double mean_y = 0.0;
    double mu20 = 0.0; // central second moments, no pixel-extent correction
    double mu02 = 0.0;
    double mu11 = 0.0;
};

inline RegionMoments region_moments(const RasterImage& mask) {
    RegionMoments m;
    double sum_x = 0.0, sum_y = 0.0;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y) != 0) {
                m.area += 1.0;
                sum_x += x;
                sum_y += y;
            }
    if (m.area == 0.0)
        throw degenerate_geometry_error("region_moments: empty mask");
    m.mean_x = sum_x / m.area;
    m.mean_y = sum_y / m.area;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y) != 0) {
                const double dx = x - m.mean_x;
                const double dy = y - m.mean_y;
                m.mu20 += dx * dx;
                m.mu02 += dy * dy;
                m.mu11 += dx * dy;
            }
    m.mu20 /= m.area;
    m.mu02 /= m.area;
    m.mu11 /= m.area;
    return m;
}

} // namespace detail

/**
 * Major/minor axis lengths of the equivalent ellipse from second-order
 * central moments, with the 1/12 pixel-extent correction. Rejects masks
 * whose pixels are collinear.
 */
inline std::pair<double, double> axis_lengths_of(const RasterImage& mask) {
    const auto m = detail::region_moments(mask);
    const double common = m.mu20 + m.mu02;
    const double diff = m.mu20 - m.mu02;
    const double det = std::sqrt(diff * diff + 4.0 * m.mu11 * m.mu11);
    const double lambda_minor_raw = (common - det) / 2.0;
    if (lambda_minor_raw < 1e-9)
        throw degenerate_geometry_error("axis_lengths: mask is a point or a line");
    const double corr = 1.0 / 12.0;
    const double lambda_major = (common + det) / 2.0 + corr;
    const double lambda_minor = lambda_minor_raw + corr;
    return {4.0 * std::sqrt(lambda_major), 4.0 * std::sqrt(lambda_minor)};
}

/**
 * Segmented leaf region together with every geometric symbol derived from
 * it: ordered contour, centroid, convex hull, areas, perimeters and the
 * equivalent-ellipse axis lengths.
 */
struct LeafMask {
    RasterImage mask;                // binary, 1 = leaf
    std::vector<PixelCoord> contour; // ordered boundary pixels
    Point2d centroid;
    std::vector<Point2d> hull;       // CCW vertices
    double area = 0.0;
    double perimeter = 0.0;
    double convex_area = 0.0;
    double convex_perimeter = 0.0;
    double major_axis = 0.0;
    double minor_axis = 0.0;
};

/**
 * Derives the full LeafMask geometry from a binary image holding one filled
 * component. Throws degenerate_geometry_error for empty or collinear masks.
 */
inline LeafMask analyze_mask(RasterImage binary) {
    LeafMask leaf;
    leaf.contour = trace_contour(binary);

    const auto m = detail::region_moments(binary);
    leaf.area = m.area;
    leaf.centroid = {m.mean_x, m.mean_y};
    leaf.perimeter = contour_perimeter(leaf.contour);

    std::vector<Point2d> pts;
    pts.reserve(leaf.contour.size());
    for (const PixelCoord& p : leaf.contour)
        pts.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
    leaf.hull = convex_hull(std::move(pts));
    leaf.convex_perimeter = polygon_perimeter(leaf.hull);
    leaf.convex_area = static_cast<double>(convex_polygon_lattice_count(leaf.hull));

    const auto [major, minor] = axis_lengths_of(binary);
    leaf.major_axis = major;
    leaf.minor_axis = minor;
    leaf.mask = std::move(binary);
    return leaf;
}

inline std::pair<double, double> axis_lengths(const LeafMask& leaf) {
    return axis_lengths_of(leaf.mask);
}

/**
 * Segments the dominant object: Otsu threshold on the grayscale image, the
 * side with less border contact taken as foreground, largest 8-connected
 * component kept, holes filled.
 */
inline LeafMask segment_leaf(const RasterImage& img) {
    const RasterImage gray = (img.channels == 3) ? to_grayscale(img) : img;
    const int t = otsu_threshold(intensity_histogram(gray));

    std::uint64_t border_above = 0, border_below = 0;
    for (int y = 0; y < gray.height; ++y) {
        for (int x = 0; x < gray.width; ++x) {
            if (y != 0 && y != gray.height - 1 && x != 0 && x != gray.width - 1)
                continue;
            (gray.at(x, y) > t ? border_above : border_below)++;
        }
    }
    const bool fg_above = border_above <= border_below;

    RasterImage binary = RasterImage::make(gray.width, gray.height, 1);
    bool any = false;
    for (int y = 0; y < gray.height; ++y) {
        for (int x = 0; x < gray.width; ++x) {
            const bool fg = fg_above ? (gray.at(x, y) > t) : (gray.at(x, y) <= t);
            binary.at(x, y) = fg ? 1 : 0;
            any = any || fg;
        }
    }
    if (!any)
        throw segmentation_error("segment_leaf: threshold yields no foreground");

    return analyze_mask(detail::fill_holes(detail::largest_component(binary)));
}

} // namespace cbir

#endif // CBIR_IMGPROC_HPP
