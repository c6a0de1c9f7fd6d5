#ifndef CBIR_DISTANCE_HPP
#define CBIR_DISTANCE_HPP

#include <array>
#include <cmath>
#include <span>
#include <string>

#include "cbir/errors.hpp"

namespace cbir {

enum class Measure {
    city_block,
    euclidean,
    canberra,
    bray_curtis,
    chi_square,
    kullback_leibler,
    jensen_shannon,
};

inline constexpr std::array<Measure, 7> kAllMeasures = {
    Measure::city_block,    Measure::euclidean,        Measure::canberra,
    Measure::bray_curtis,   Measure::chi_square,       Measure::kullback_leibler,
    Measure::jensen_shannon,
};

inline constexpr double kDefaultEpsilon = 1e-12;

inline std::string measure_name(Measure m) {
    switch (m) {
        case Measure::city_block: return "city-block";
        case Measure::euclidean: return "euclidean";
        case Measure::canberra: return "canberra";
        case Measure::bray_curtis: return "bray-curtis";
        case Measure::chi_square: return "chi-square";
        case Measure::kullback_leibler: return "kullback-leibler";
        case Measure::jensen_shannon: return "jensen-shannon";
    }
    return "unknown";
}

inline Measure parse_measure(const std::string& name) {
    for (Measure m : kAllMeasures)
        if (measure_name(m) == name)
            return m;
    throw input_error("unknown distance measure: " + name);
}

namespace detail {

inline void validate_pair(std::span<const double> q, std::span<const double> r) {
    if (q.size() != r.size())
        throw shape_error("distance: vector lengths differ");
    if (q.empty())
        throw shape_error("distance: empty vectors");
    for (std::size_t i = 0; i < q.size(); ++i)
        if (std::isnan(q[i]) || std::isnan(r[i]))
            throw input_error("distance: NaN input");
}

} // namespace detail

/**
 * The seven dissimilarity measures over equal-length real vectors.
 *
 * Degenerate-input policy: Canberra terms with |Q|+|R| = 0 and chi-square
 * terms with zero mean contribute 0; Kullback-Leibler and Jensen-Shannon
 * clamp inputs to [0, inf), guard logarithms with epsilon, skip terms whose
 * leading factor is 0, and floor the total at 0. Euclidean is the paper's
 * literal squared sum; rankings are invariant under the missing square
 * root.
 */
inline double distance(Measure measure, std::span<const double> q,
                       std::span<const double> r, double epsilon = kDefaultEpsilon) {
    detail::validate_pair(q, r);
    const std::size_t n = q.size();
    double total = 0.0;

    switch (measure) {
        case Measure::city_block:
            for (std::size_t i = 0; i < n; ++i)
                total += std::abs(q[i] - r[i]);
            return total;

        case Measure::euclidean:
            for (std::size_t i = 0; i < n; ++i)
                total += (q[i] - r[i]) * (q[i] - r[i]);
            return total;

        case Measure::canberra:
            for (std::size_t i = 0; i < n; ++i) {
                const double denom = std::abs(q[i]) + std::abs(r[i]);
                if (denom > 0.0)
                    total += std::abs(q[i] - r[i]) / denom;
            }
            return total;

        case Measure::bray_curtis: {
            double denom = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                total += std::abs(q[i] - r[i]);
                denom += q[i] + r[i];
            }
            return denom != 0.0 ? total / denom : 0.0;
        }

        case Measure::chi_square:
            for (std::size_t i = 0; i < n; ++i) {
                const double m = (q[i] + r[i]) / 2.0;
                if (m != 0.0)
                    total += (q[i] - r[i]) * (q[i] - r[i]) / m;
            }
            return total;

        case Measure::kullback_leibler:
            for (std::size_t i = 0; i < n; ++i) {
                const double a = std::max(q[i], 0.0);
                const double b = std::max(r[i], 0.0);
                if (a > 0.0)
                    total += a * std::log((a + epsilon) / (b + epsilon));
            }
            return std::max(total, 0.0);

        case Measure::jensen_shannon:
            for (std::size_t i = 0; i < n; ++i) {
                const double a = std::max(q[i], 0.0);
                const double b = std::max(r[i], 0.0);
                const double sum = a + b;
                if (a > 0.0)
                    total += a * std::log((2.0 * a + epsilon) / (sum + epsilon));
                if (b > 0.0)
                    total += b * std::log((2.0 * b + epsilon) / (sum + epsilon));
            }
            return std::max(total, 0.0);
    }
    throw input_error("distance: unknown measure");
}

} // namespace cbir

#endif // CBIR_DISTANCE_HPP
