#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "trails/model.hpp"

namespace trails {

// Removal tally across the three anti-spoofing filters. A check-in is counted
// under every filter that would remove it (evaluated both in composition and
// standalone against the sorted input), so the per-filter sets may overlap:
//   removed_total <= removed_repeat + removed_dwell + removed_speed + removed_missing_venue
// removed_total counts distinct check-ins actually dropped.
struct FilterReport {
    std::uint64_t removed_repeat = 0;
    std::uint64_t removed_dwell = 0;
    std::uint64_t removed_speed = 0;
    std::uint64_t removed_missing_venue = 0;
    std::uint64_t removed_total = 0;

    FilterReport& operator+=(const FilterReport& other);
};

// Pre-enrichment trail: one user's gap-bounded run of filtered check-ins.
struct RawTrail {
    std::string user_id;
    std::vector<CheckIn> checkins;
};

// Per-user check-in sequences, users in order of first appearance, each
// sequence sorted by absolute instant (stable: ties keep input order).
using UserSequences = std::vector<std::pair<std::string, std::vector<CheckIn>>>;
UserSequences group_and_sort(std::vector<CheckIn> checkins);

// Collapses maximal runs of the same venue down to the run's last check-in.
std::vector<CheckIn> collapse_repeats(std::vector<CheckIn> sequence,
                                      std::uint64_t* removed = nullptr);

// Single left-to-right pass removing one member of every consecutive pair
// closer than min_dwell. The default policy drops the earlier check-in.
std::vector<CheckIn> filter_dwell(std::vector<CheckIn> sequence, std::int64_t min_dwell_seconds,
                                  DropPolicy policy = DropPolicy::Earlier,
                                  std::uint64_t* removed = nullptr);

// Single left-to-right pass removing one member of every consecutive pair
// whose implied speed exceeds max_speed (zero time over nonzero distance
// counts as infinite). Check-ins whose venue is not in the table are dropped
// up front. The default policy drops the later check-in and keeps comparing
// against the survivor.
std::vector<CheckIn> filter_speed(std::vector<CheckIn> sequence, const VenueMap& venues,
                                  double max_speed_mps, double earth_radius_meters,
                                  DropPolicy policy = DropPolicy::Later,
                                  std::uint64_t* removed = nullptr,
                                  std::uint64_t* missing_venue = nullptr);

// Splits a sorted, filtered sequence into gap-bounded runs of length >= 2.
// A pair extends the open trail when its gap is strictly under the limit;
// a larger gap closes it. The trail still open at the end of the sequence is
// emitted. Check-ins bordered by full gaps on both sides join no trail.
std::vector<std::vector<CheckIn>> segment(const std::vector<CheckIn>& sequence,
                                          std::int64_t gap_limit_seconds);

struct BuildResult {
    std::vector<RawTrail> trails;
    FilterReport report;
    std::size_t users = 0;           // distinct users seen in the input
    std::size_t unsegmented = 0;     // filter survivors that joined no trail
    std::vector<std::string> warnings;
};

// Full per-user pipeline: group, sort, repeats -> dwell -> speed, a closing
// repeat collapse (dropping the middle of a venue sandwich re-creates a
// consecutive repeat, which no trail may contain), then segmentation.
// Users are processed independently; `threads` > 1 fans them out across
// workers with the output order unchanged.
BuildResult build_trails(std::vector<CheckIn> checkins, const VenueMap& venues,
                         const PipelineConfig& config, unsigned threads = 1);

}  // namespace trails
