#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "trails/model.hpp"

namespace trails {

struct Violation {
    std::size_t line = 0;  // 1-based line in the dataset file, 0 when global
    std::string what;
};

// Structural checks over dataset records: dense trail and user ids, contiguous
// trails, one user per trail, length >= 2, strictly increasing minute-aligned
// timestamps, distinct consecutive venues, and the gap/dwell/speed limits.
//
// The published timestamps are truncated to the minute, so the thresholds are
// checked with one minute of slack: a true gap g maps to a truncated gap in
// (g - 60, g + 60). The checks are gap < gap_limit + 60, gap > min_dwell - 60,
// and distance <= max_speed * (gap + 59) when a venue table supplies
// coordinates.
std::vector<Violation> validate_records(const std::vector<EnrichedCheckIn>& records,
                                        const std::vector<std::size_t>& line_numbers,
                                        const PipelineConfig& config,
                                        const VenueMap* venues = nullptr);

}  // namespace trails
