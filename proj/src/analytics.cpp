#include "trails/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace trails {

Histogram Histogram::truncated_below(std::int64_t upper_exclusive) const {
    Histogram view;
    for (const auto& [key, count] : buckets) {
        if (key < upper_exclusive) view.add(key, count);
    }
    return view;
}

LengthStats trail_length_stats(const TrailRecords& trails) {
    LengthStats stats;
    if (trails.empty()) return stats;
    double sum = 0.0;
    for (const auto& trail : trails) {
        const auto length = static_cast<std::int64_t>(trail.size());
        stats.histogram.add(length);
        sum += static_cast<double>(length);
    }
    const double n = static_cast<double>(trails.size());
    stats.mean = sum / n;
    double squares = 0.0;
    for (const auto& trail : trails) {
        const double delta = static_cast<double>(trail.size()) - stats.mean;
        squares += delta * delta;
    }
    stats.stddev = std::sqrt(squares / n);
    return stats;
}

std::int64_t duration_bucket(std::int64_t seconds) {
    if (seconds <= 0) return -1;
    std::int64_t key = 0;
    while (seconds > 1) {
        seconds >>= 1;
        ++key;
    }
    return key;
}

Histogram duration_histogram(const TrailRecords& trails, bool exclude_full_day) {
    Histogram histogram;
    for (const auto& trail : trails) {
        if (trail.empty()) continue;
        const std::int64_t duration =
            trail.back().timestamp.instant - trail.front().timestamp.instant;
        if (exclude_full_day && duration >= 86400) continue;
        histogram.add(duration_bucket(duration));
    }
    return histogram;
}

Histogram city_checkin_distribution(const TrailRecords& trails) {
    std::unordered_map<std::int64_t, std::uint64_t> per_city;
    for (const auto& trail : trails)
        for (const auto& checkin : trail) ++per_city[checkin.city_geonames_id];
    Histogram histogram;
    for (const auto& [city, count] : per_city)
        histogram.add(static_cast<std::int64_t>(count));
    return histogram;
}

PopulationMap population_map(const std::vector<City>& cities) {
    PopulationMap populations;
    for (const auto& city : cities)
        if (city.population) populations.emplace(city.geonames_id, *city.population);
    return populations;
}

namespace {

RankedCounts rank(std::unordered_map<std::string, std::uint64_t>&& tallies, std::size_t n) {
    RankedCounts ranked(tallies.begin(), tallies.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (n > 0 && ranked.size() > n) ranked.resize(n);
    return ranked;
}

}  // namespace

RankedCounts top_countries(const TrailRecords& trails, std::size_t n) {
    std::unordered_map<std::string, std::uint64_t> tallies;
    for (const auto& trail : trails)
        for (const auto& checkin : trail) ++tallies[checkin.country_code];
    return rank(std::move(tallies), n);
}

CitySize classify_city(std::int64_t geonames_id, const PopulationMap& populations,
                       std::int64_t big_city_population) {
    const auto it = populations.find(geonames_id);
    if (it == populations.end()) return CitySize::Small;
    return it->second > big_city_population ? CitySize::Big : CitySize::Small;
}

RankedCounts top_categories(const TrailRecords& trails, std::size_t n,
                            const CategoryFilter& filter, const PopulationMap* populations,
                            std::int64_t big_city_population) {
    std::unordered_map<std::string, std::uint64_t> tallies;
    for (const auto& trail : trails) {
        for (const auto& checkin : trail) {
            if (filter.country && checkin.country_code != *filter.country) continue;
            if (filter.size_class) {
                if (!populations)
                    throw std::invalid_argument("size-class filter needs a population map");
                if (classify_city(checkin.city_geonames_id, *populations,
                                  big_city_population) != *filter.size_class)
                    continue;
            }
            ++tallies[checkin.schema_term];
        }
    }
    return rank(std::move(tallies), n);
}

SizeSplit size_split_counts(const TrailRecords& trails, const PopulationMap& populations,
                            std::int64_t big_city_population) {
    SizeSplit split;
    for (const auto& trail : trails) {
        bool touches_small = false;
        bool touches_big = false;
        for (const auto& checkin : trail) {
            const CitySize size =
                classify_city(checkin.city_geonames_id, populations, big_city_population);
            if (size == CitySize::Big) {
                touches_big = true;
                ++split.big_checkins;
            } else {
                touches_small = true;
                ++split.small_checkins;
            }
        }
        if (touches_small) ++split.small_trails;
        if (touches_big) ++split.big_trails;
    }
    return split;
}

namespace {

std::ofstream open_report(const std::filesystem::path& directory, const char* name) {
    std::ofstream out(directory / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report file '" + std::string(name) + "'");
    return out;
}

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.6f", value);
    return buffer;
}

}  // namespace

void write_reports(const TrailRecords& trails, const PopulationMap& populations,
                   const PipelineConfig& config, const std::filesystem::path& directory,
                   std::size_t top_n) {
    std::filesystem::create_directories(directory);

    const LengthStats lengths = trail_length_stats(trails);
    std::uint64_t checkins = 0;
    for (const auto& trail : trails) checkins += trail.size();

    {
        auto out = open_report(directory, "stats_summary.csv");
        out << "stat,value\n";
        out << "trails," << trails.size() << "\n";
        out << "checkins," << checkins << "\n";
        out << "mean_trail_length," << format_double(lengths.mean) << "\n";
        out << "stddev_trail_length," << format_double(lengths.stddev) << "\n";
    }
    {
        auto out = open_report(directory, "stats_trail_length.csv");
        out << "length,trails\n";
        for (const auto& [length, count] : lengths.histogram.buckets)
            out << length << "," << count << "\n";
    }
    {
        const Histogram durations = duration_histogram(trails);
        auto out = open_report(directory, "stats_duration.csv");
        out << "bucket_start_seconds,bucket_end_seconds,trails\n";
        for (const auto& [key, count] : durations.buckets) {
            const std::int64_t start = key < 0 ? 0 : (std::int64_t{1} << key);
            const std::int64_t end = key < 0 ? 1 : (std::int64_t{1} << (key + 1));
            out << start << "," << end << "," << count << "\n";
        }
    }
    {
        const Histogram cities = city_checkin_distribution(trails);
        auto out = open_report(directory, "stats_city_checkins.csv");
        out << "checkins,cities\n";
        for (const auto& [key, count] : cities.buckets) out << key << "," << count << "\n";
    }
    const RankedCounts countries = top_countries(trails);
    {
        auto out = open_report(directory, "stats_top_countries.csv");
        out << "country,checkins\n";
        for (const auto& [country, count] : countries) out << country << "," << count << "\n";
    }
    {
        auto out = open_report(directory, "stats_top_categories.csv");
        out << "scope,term,checkins\n";
        for (const auto& [term, count] : top_categories(trails, top_n))
            out << "all," << term << "," << count << "\n";
        for (std::size_t i = 0; i < countries.size() && i < top_n; ++i) {
            CategoryFilter filter;
            filter.country = countries[i].first;
            for (const auto& [term, count] : top_categories(trails, top_n, filter))
                out << "country:" << countries[i].first << "," << term << "," << count << "\n";
        }
        for (const CitySize size : {CitySize::Small, CitySize::Big}) {
            CategoryFilter filter;
            filter.size_class = size;
            for (const auto& [term, count] :
                 top_categories(trails, top_n, filter, &populations, config.big_city_population))
                out << (size == CitySize::Small ? "small," : "big,") << term << "," << count
                    << "\n";
        }
    }
    {
        const SizeSplit split = size_split_counts(trails, populations, config.big_city_population);
        auto out = open_report(directory, "stats_size_split.csv");
        out << "class,trails,checkins\n";
        out << "small," << split.small_trails << "," << split.small_checkins << "\n";
        out << "big," << split.big_trails << "," << split.big_checkins << "\n";
    }
}

}  // namespace trails
