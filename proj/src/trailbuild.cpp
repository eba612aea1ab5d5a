#include "trails/trailbuild.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "trails/enrich.hpp"

namespace trails {

FilterReport& FilterReport::operator+=(const FilterReport& other) {
    removed_repeat += other.removed_repeat;
    removed_dwell += other.removed_dwell;
    removed_speed += other.removed_speed;
    removed_missing_venue += other.removed_missing_venue;
    removed_total += other.removed_total;
    return *this;
}

UserSequences group_and_sort(std::vector<CheckIn> checkins) {
    std::unordered_map<std::string, std::size_t> slots;
    UserSequences users;
    for (auto& checkin : checkins) {
        auto [it, inserted] = slots.try_emplace(checkin.user_id, users.size());
        if (inserted) users.emplace_back(checkin.user_id, std::vector<CheckIn>{});
        users[it->second].second.push_back(std::move(checkin));
    }
    for (auto& [user, sequence] : users) {
        std::stable_sort(sequence.begin(), sequence.end(),
                         [](const CheckIn& a, const CheckIn& b) {
                             return a.timestamp.instant < b.timestamp.instant;
                         });
    }
    return users;
}

namespace {

using IndexList = std::vector<std::size_t>;

IndexList all_indices(std::size_t n) {
    IndexList indices(n);
    for (std::size_t i = 0; i < n; ++i) indices[i] = i;
    return indices;
}

IndexList pass_collapse(const std::vector<CheckIn>& seq, const IndexList& live) {
    IndexList kept;
    kept.reserve(live.size());
    for (const std::size_t idx : live) {
        if (!kept.empty() && seq[kept.back()].venue_id == seq[idx].venue_id)
            kept.back() = idx;  // the last of a run survives
        else
            kept.push_back(idx);
    }
    return kept;
}

IndexList pass_dwell(const std::vector<CheckIn>& seq, const IndexList& live,
                     std::int64_t min_dwell, DropPolicy policy) {
    IndexList kept;
    kept.reserve(live.size());
    for (const std::size_t idx : live) {
        if (!kept.empty()) {
            const std::int64_t gap =
                seq[idx].timestamp.instant - seq[kept.back()].timestamp.instant;
            if (gap < min_dwell) {
                if (policy == DropPolicy::Earlier)
                    kept.back() = idx;
                // DropPolicy::Later: skip idx, the tail stays.
                continue;
            }
        }
        kept.push_back(idx);
    }
    return kept;
}

bool speed_violation(const CheckIn& from, const CheckIn& to, const Venue& from_venue,
                     const Venue& to_venue, double max_speed, double earth_radius) {
    const std::int64_t gap = to.timestamp.instant - from.timestamp.instant;
    const double distance = haversine(from_venue.latitude, from_venue.longitude,
                                      to_venue.latitude, to_venue.longitude, earth_radius);
    if (gap <= 0) return distance > 0.0;  // teleport
    return distance / static_cast<double>(gap) > max_speed;
}

IndexList pass_speed(const std::vector<CheckIn>& seq, const IndexList& live,
                     const VenueMap& venues, double max_speed, double earth_radius,
                     DropPolicy policy, IndexList* missing_out) {
    // Check-ins the filter cannot evaluate are dropped before pairing.
    IndexList resolved;
    resolved.reserve(live.size());
    for (const std::size_t idx : live) {
        if (venues.count(seq[idx].venue_id) != 0) {
            resolved.push_back(idx);
        } else if (missing_out) {
            missing_out->push_back(idx);
        }
    }

    IndexList kept;
    kept.reserve(resolved.size());
    for (const std::size_t idx : resolved) {
        if (!kept.empty()) {
            const Venue& prev_venue = venues.at(seq[kept.back()].venue_id);
            const Venue& cur_venue = venues.at(seq[idx].venue_id);
            if (speed_violation(seq[kept.back()], seq[idx], prev_venue, cur_venue, max_speed,
                                earth_radius)) {
                if (policy == DropPolicy::Earlier)
                    kept.back() = idx;
                // DropPolicy::Later: drop idx, keep comparing against the survivor.
                continue;
            }
        }
        kept.push_back(idx);
    }
    return kept;
}

std::vector<CheckIn> gather(const std::vector<CheckIn>& seq, const IndexList& indices) {
    std::vector<CheckIn> out;
    out.reserve(indices.size());
    for (const std::size_t idx : indices) out.push_back(seq[idx]);
    return out;
}

struct UserOutcome {
    std::vector<std::vector<CheckIn>> trails;
    FilterReport report;
    std::size_t unsegmented = 0;
    std::size_t missing_venues = 0;
};

void mark(std::vector<std::uint8_t>& flags, const IndexList& indices, std::uint8_t bit) {
    for (const std::size_t idx : indices) flags[idx] |= bit;
}

// Complement of `kept` within `live`.
IndexList dropped_between(const IndexList& live, const IndexList& kept) {
    IndexList dropped;
    std::size_t k = 0;
    for (const std::size_t idx : live) {
        if (k < kept.size() && kept[k] == idx)
            ++k;
        else
            dropped.push_back(idx);
    }
    return dropped;
}

UserOutcome process_user(const std::vector<CheckIn>& sequence, const VenueMap& venues,
                         const PipelineConfig& config) {
    constexpr std::uint8_t kRepeat = 1, kDwell = 2, kSpeed = 4, kMissing = 8;

    UserOutcome outcome;
    const std::size_t n = sequence.size();
    const IndexList live = all_indices(n);
    std::vector<std::uint8_t> flags(n, 0);

    const IndexList after_repeat = pass_collapse(sequence, live);
    mark(flags, dropped_between(live, after_repeat), kRepeat);

    const IndexList after_dwell =
        pass_dwell(sequence, after_repeat, config.min_dwell_seconds, config.dwell_drop);
    mark(flags, dropped_between(after_repeat, after_dwell), kDwell);
    // Standalone evaluation: check-ins an earlier filter got to first are
    // still charged to every filter that would have removed them.
    mark(flags, dropped_between(live, pass_dwell(sequence, live, config.min_dwell_seconds,
                                                 config.dwell_drop)),
         kDwell);

    IndexList missing;
    const IndexList after_speed =
        pass_speed(sequence, after_dwell, venues, config.max_speed_mps,
                   config.earth_radius_meters, config.speed_drop, &missing);
    mark(flags, missing, kMissing);
    {
        IndexList dropped = dropped_between(after_dwell, after_speed);
        IndexList non_missing;
        for (const std::size_t idx : dropped)
            if ((flags[idx] & kMissing) == 0) non_missing.push_back(idx);
        mark(flags, non_missing, kSpeed);
    }
    {
        IndexList raw_missing;
        const IndexList raw_kept = pass_speed(sequence, live, venues, config.max_speed_mps,
                                              config.earth_radius_meters, config.speed_drop,
                                              &raw_missing);
        std::vector<std::uint8_t> is_missing(n, 0);
        for (const std::size_t idx : raw_missing) is_missing[idx] = 1;
        for (const std::size_t idx : dropped_between(live, raw_kept))
            if (!is_missing[idx]) flags[idx] |= kSpeed;
    }

    // Dropping the middle of a venue sandwich (v, w, v) in the dwell or speed
    // pass re-creates a consecutive repeat, which no trail may contain; a
    // closing collapse restores the invariant. Gaps only grow under collapse,
    // so the dwell and speed guarantees survive it.
    const IndexList final_kept = pass_collapse(sequence, after_speed);
    mark(flags, dropped_between(after_speed, final_kept), kRepeat);

    for (std::size_t i = 0; i < n; ++i) {
        if (flags[i] & kRepeat) ++outcome.report.removed_repeat;
        if (flags[i] & kDwell) ++outcome.report.removed_dwell;
        if (flags[i] & kSpeed) ++outcome.report.removed_speed;
        if (flags[i] & kMissing) ++outcome.report.removed_missing_venue;
    }
    outcome.report.removed_total = n - final_kept.size();
    outcome.missing_venues = missing.size();

    const std::vector<CheckIn> filtered = gather(sequence, final_kept);
    outcome.trails = segment(filtered, config.gap_limit_seconds);
    std::size_t segmented = 0;
    for (const auto& trail : outcome.trails) segmented += trail.size();
    outcome.unsegmented = filtered.size() - segmented;
    return outcome;
}

}  // namespace

std::vector<CheckIn> collapse_repeats(std::vector<CheckIn> sequence, std::uint64_t* removed) {
    const IndexList kept = pass_collapse(sequence, all_indices(sequence.size()));
    if (removed) *removed += sequence.size() - kept.size();
    return gather(sequence, kept);
}

std::vector<CheckIn> filter_dwell(std::vector<CheckIn> sequence, std::int64_t min_dwell_seconds,
                                  DropPolicy policy, std::uint64_t* removed) {
    const IndexList kept =
        pass_dwell(sequence, all_indices(sequence.size()), min_dwell_seconds, policy);
    if (removed) *removed += sequence.size() - kept.size();
    return gather(sequence, kept);
}

std::vector<CheckIn> filter_speed(std::vector<CheckIn> sequence, const VenueMap& venues,
                                  double max_speed_mps, double earth_radius_meters,
                                  DropPolicy policy, std::uint64_t* removed,
                                  std::uint64_t* missing_venue) {
    IndexList missing;
    const IndexList kept = pass_speed(sequence, all_indices(sequence.size()), venues,
                                      max_speed_mps, earth_radius_meters, policy, &missing);
    if (missing_venue) *missing_venue += missing.size();
    if (removed) *removed += sequence.size() - kept.size() - missing.size();
    return gather(sequence, kept);
}

std::vector<std::vector<CheckIn>> segment(const std::vector<CheckIn>& sequence,
                                          std::int64_t gap_limit_seconds) {
    std::vector<std::vector<CheckIn>> trails;
    std::vector<CheckIn> open;
    for (std::size_t i = 1; i < sequence.size(); ++i) {
        const std::int64_t gap =
            sequence[i].timestamp.instant - sequence[i - 1].timestamp.instant;
        if (gap < gap_limit_seconds) {
            if (open.empty()) open.push_back(sequence[i - 1]);
            open.push_back(sequence[i]);
        } else if (!open.empty()) {
            trails.push_back(std::move(open));
            open.clear();
        }
    }
    if (!open.empty()) trails.push_back(std::move(open));
    return trails;
}

BuildResult build_trails(std::vector<CheckIn> checkins, const VenueMap& venues,
                         const PipelineConfig& config, unsigned threads) {
    config.validate();
    BuildResult result;
    UserSequences users = group_and_sort(std::move(checkins));
    result.users = users.size();

    std::vector<UserOutcome> outcomes(users.size());
    if (threads <= 1 || users.size() < 2) {
        for (std::size_t i = 0; i < users.size(); ++i)
            outcomes[i] = process_user(users[i].second, venues, config);
    } else {
        std::atomic<std::size_t> next{0};
        const unsigned worker_count =
            static_cast<unsigned>(std::min<std::size_t>(threads, users.size()));
        std::vector<std::thread> workers;
        workers.reserve(worker_count);
        for (unsigned w = 0; w < worker_count; ++w) {
            workers.emplace_back([&]() {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= users.size()) break;
                    outcomes[i] = process_user(users[i].second, venues, config);
                }
            });
        }
        for (auto& worker : workers) worker.join();
    }

    for (std::size_t i = 0; i < users.size(); ++i) {
        auto& outcome = outcomes[i];
        result.report += outcome.report;
        result.unsegmented += outcome.unsegmented;
        if (outcome.missing_venues > 0) {
            result.warnings.push_back("user '" + users[i].first + "': " +
                                      std::to_string(outcome.missing_venues) +
                                      " check-in(s) dropped, venue unknown");
        }
        for (auto& trail : outcome.trails)
            result.trails.push_back(RawTrail{users[i].first, std::move(trail)});
    }
    return result;
}

}  // namespace trails
