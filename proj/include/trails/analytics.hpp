#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trails/model.hpp"

namespace trails {

struct Histogram {
    std::map<std::int64_t, std::uint64_t> buckets;
    std::uint64_t total = 0;

    void add(std::int64_t key, std::uint64_t count = 1) {
        buckets[key] += count;
        total += count;
    }

    // Plot view: buckets with key < upper_exclusive.
    Histogram truncated_below(std::int64_t upper_exclusive) const;
};

// Trails as grouped records; tolerant of files that would fail strict Trail
// validation so reports can be computed on anything in the dataset format.
using TrailRecords = std::vector<std::vector<EnrichedCheckIn>>;

struct LengthStats {
    double mean = 0.0;
    double stddev = 0.0;  // population standard deviation
    Histogram histogram;  // keyed by trail length
};
LengthStats trail_length_stats(const TrailRecords& trails);

// Base-2 logarithmic bucket key: k covers [2^k, 2^(k+1)) seconds; zero-length
// durations land in key -1.
std::int64_t duration_bucket(std::int64_t seconds);

// Trail durations (last minus first check-in, seconds) in log buckets.
// exclude_full_day drops trails lasting >= 24 h, matching the plotted view.
Histogram duration_histogram(const TrailRecords& trails, bool exclude_full_day = false);

// Cities bucketed by their check-in count: key = check-ins, value = cities.
Histogram city_checkin_distribution(const TrailRecords& trails);

using PopulationMap = std::unordered_map<std::int64_t, std::int64_t>;
PopulationMap population_map(const std::vector<City>& cities);

using RankedCounts = std::vector<std::pair<std::string, std::uint64_t>>;

// Countries by check-in count, descending, ties by country code. n = 0 keeps
// the whole ranking.
RankedCounts top_countries(const TrailRecords& trails, std::size_t n = 0);

enum class CitySize { Small, Big };

// A big city strictly exceeds the population threshold; cities with unknown
// population count as small.
CitySize classify_city(std::int64_t geonames_id, const PopulationMap& populations,
                       std::int64_t big_city_population);

struct CategoryFilter {
    std::optional<std::string> country;
    std::optional<CitySize> size_class;
};

// Vocabulary terms by check-in count within the filtered subset, descending,
// ties by term. Size-class filtering needs the population map.
RankedCounts top_categories(const TrailRecords& trails, std::size_t n = 0,
                            const CategoryFilter& filter = {},
                            const PopulationMap* populations = nullptr,
                            std::int64_t big_city_population = 100000);

struct SizeSplit {
    std::uint64_t small_trails = 0;
    std::uint64_t small_checkins = 0;
    std::uint64_t big_trails = 0;
    std::uint64_t big_checkins = 0;
};

// Trails and check-ins per city-size class. A check-in counts in its own
// city's class; a trail counts once in every class it touches.
SizeSplit size_split_counts(const TrailRecords& trails, const PopulationMap& populations,
                            std::int64_t big_city_population);

// Writes one stats_<name>.csv per statistic into the directory (created if
// missing). top_n bounds the per-scope category rankings.
void write_reports(const TrailRecords& trails, const PopulationMap& populations,
                   const PipelineConfig& config, const std::filesystem::path& directory,
                   std::size_t top_n = 5);

}  // namespace trails
