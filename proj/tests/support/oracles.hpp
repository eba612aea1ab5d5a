#pragma once

// Independent reference computations the tests check the implementation
// against. These deliberately avoid the code paths under test.

#include <cmath>
#include <cstdint>
#include <vector>

#include "trails/model.hpp"

namespace oracles {

// Great-circle distance through long-double 3D vectors and the cross/dot
// formula, a different route than the library's haversine.
inline long double spherical_distance(long double lat1, long double lon1, long double lat2,
                                      long double lon2, long double radius) {
    const long double pi = 3.14159265358979323846264338327950288L;
    const long double d = pi / 180.0L;
    const long double phi1 = lat1 * d, lam1 = lon1 * d;
    const long double phi2 = lat2 * d, lam2 = lon2 * d;
    const long double x1 = std::cos(phi1) * std::cos(lam1);
    const long double y1 = std::cos(phi1) * std::sin(lam1);
    const long double z1 = std::sin(phi1);
    const long double x2 = std::cos(phi2) * std::cos(lam2);
    const long double y2 = std::cos(phi2) * std::sin(lam2);
    const long double z2 = std::sin(phi2);
    const long double cx = y1 * z2 - z1 * y2;
    const long double cy = z1 * x2 - x1 * z2;
    const long double cz = x1 * y2 - y1 * x2;
    const long double cross = std::sqrt(cx * cx + cy * cy + cz * cz);
    const long double dot = x1 * x2 + y1 * y2 + z1 * z2;
    return radius * std::atan2(cross, dot);
}

// Brute-force segmentation: maximal runs of consecutive gaps strictly under
// the limit, keeping runs of length >= 2.
inline std::vector<std::vector<trails::CheckIn>> segment_bruteforce(
    const std::vector<trails::CheckIn>& sequence, std::int64_t gap_limit_seconds) {
    std::vector<std::vector<trails::CheckIn>> runs;
    std::size_t start = 0;
    while (start < sequence.size()) {
        std::size_t end = start + 1;
        while (end < sequence.size() &&
               sequence[end].timestamp.instant - sequence[end - 1].timestamp.instant <
                   gap_limit_seconds)
            ++end;
        if (end - start >= 2)
            runs.emplace_back(sequence.begin() + static_cast<std::ptrdiff_t>(start),
                              sequence.begin() + static_cast<std::ptrdiff_t>(end));
        start = end;
    }
    return runs;
}

// Linear-scan nearest city with the library's own distance function and the
// smallest-geonames_id tie rule.
inline std::size_t nearest_linear(const std::vector<trails::City>& cities, double lat,
                                  double lon, double earth_radius,
                                  double (*distance)(double, double, double, double, double)) {
    std::size_t best = 0;
    double best_distance = distance(lat, lon, cities[0].latitude, cities[0].longitude,
                                    earth_radius);
    for (std::size_t i = 1; i < cities.size(); ++i) {
        const double d =
            distance(lat, lon, cities[i].latitude, cities[i].longitude, earth_radius);
        if (d < best_distance ||
            (d == best_distance && cities[i].geonames_id < cities[best].geonames_id)) {
            best = i;
            best_distance = d;
        }
    }
    return best;
}

}  // namespace oracles
