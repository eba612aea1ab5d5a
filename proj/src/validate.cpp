#include "trails/validate.hpp"

#include <unordered_set>

#include "trails/enrich.hpp"

namespace trails {

namespace {

void report(std::vector<Violation>& out, std::size_t line, std::string what) {
    out.push_back(Violation{line, std::move(what)});
}

}  // namespace

std::vector<Violation> validate_records(const std::vector<EnrichedCheckIn>& records,
                                        const std::vector<std::size_t>& line_numbers,
                                        const PipelineConfig& config, const VenueMap* venues) {
    std::vector<Violation> violations;
    const auto line_of = [&](std::size_t i) {
        return i < line_numbers.size() ? line_numbers[i] : i + 2;  // +2: header + 1-base
    };

    std::unordered_set<std::int64_t> closed_trails;
    std::unordered_map<std::int64_t, std::int64_t> user_first_seen;
    std::int64_t max_trail_id = 0;
    std::int64_t max_user_id = 0;

    std::size_t run_start = 0;
    while (run_start < records.size()) {
        std::size_t run_end = run_start + 1;
        while (run_end < records.size() &&
               records[run_end].trail_id == records[run_start].trail_id)
            ++run_end;

        const std::int64_t trail_id = records[run_start].trail_id;
        if (!closed_trails.insert(trail_id).second)
            report(violations, line_of(run_start),
                   "trail " + std::to_string(trail_id) + " is not contiguous");
        if (trail_id != max_trail_id + 1)
            report(violations, line_of(run_start),
                   "trail ids not dense: expected " + std::to_string(max_trail_id + 1) +
                       ", found " + std::to_string(trail_id));
        if (trail_id > max_trail_id) max_trail_id = trail_id;

        const std::int64_t user = records[run_start].anon_user_id;
        if (user_first_seen.emplace(user, trail_id).second) {
            if (user != max_user_id + 1)
                report(violations, line_of(run_start),
                       "user ids not dense by first appearance: expected " +
                           std::to_string(max_user_id + 1) + ", found " + std::to_string(user));
            if (user > max_user_id) max_user_id = user;
        }

        if (run_end - run_start < 2)
            report(violations, line_of(run_start),
                   "trail " + std::to_string(trail_id) + " has fewer than 2 check-ins");

        for (std::size_t i = run_start; i < run_end; ++i) {
            const EnrichedCheckIn& cur = records[i];
            if (cur.anon_user_id != user)
                report(violations, line_of(i),
                       "trail " + std::to_string(trail_id) + " mixes user ids");
            if (!cur.timestamp.minute_aligned())
                report(violations, line_of(i), "timestamp is not truncated to the minute");
            if (i == run_start) continue;

            const EnrichedCheckIn& prev = records[i - 1];
            const std::int64_t gap = cur.timestamp.instant - prev.timestamp.instant;
            if (gap <= 0)
                report(violations, line_of(i), "timestamps not strictly increasing");
            if (cur.venue_id == prev.venue_id)
                report(violations, line_of(i), "consecutive check-ins share venue '" +
                                                   cur.venue_id + "'");
            if (gap >= config.gap_limit_seconds + 60)
                report(violations, line_of(i),
                       "gap of " + std::to_string(gap) + " s exceeds the trail limit");
            if (gap <= config.min_dwell_seconds - 60)
                report(violations, line_of(i),
                       "gap of " + std::to_string(gap) + " s is under the dwell minimum");
            if (venues && gap > 0) {
                const auto from = venues->find(prev.venue_id);
                const auto to = venues->find(cur.venue_id);
                if (from == venues->end() || to == venues->end()) {
                    report(violations, line_of(i),
                           "venue '" +
                               (from == venues->end() ? prev.venue_id : cur.venue_id) +
                               "' missing from the venue table");
                } else {
                    const double distance = haversine(
                        from->second.latitude, from->second.longitude, to->second.latitude,
                        to->second.longitude, config.earth_radius_meters);
                    const double allowed =
                        config.max_speed_mps * static_cast<double>(gap + 59);
                    if (distance > allowed)
                        report(violations, line_of(i),
                               "implied speed over " + std::to_string(config.max_speed_mps) +
                                   " m/s");
                }
            }
        }
        run_start = run_end;
    }
    return violations;
}

}  // namespace trails
