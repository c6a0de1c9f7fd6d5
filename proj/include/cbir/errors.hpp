#ifndef CBIR_ERRORS_HPP
#define CBIR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cbir {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised on malformed inputs: bad image layout, unparsable files, NaN vectors.
struct input_error : error {
    using error::error;
};

// Raised when two feature vectors disagree in length.
struct shape_error : error {
    using error::error;
};

// Raised when a geometric quantity is undefined: empty mask, collinear
// points, zero perimeter, centroid on the contour.
struct degenerate_geometry_error : error {
    using error::error;
};

// Raised when thresholding finds no foreground object.
struct segmentation_error : error {
    using error::error;
};

// Raised when a region yields no co-occurring pixel pairs.
struct degenerate_texture_error : error {
    using error::error;
};

// Raised when the DC Fourier coefficient vanishes.
struct empty_shape_error : error {
    using error::error;
};

struct evaluation_error : error {
    using error::error;
};

struct build_error : error {
    using error::error;
};

} // namespace cbir

#endif // CBIR_ERRORS_HPP
