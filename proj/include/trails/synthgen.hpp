#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "trails/model.hpp"

namespace trails {

// Counter-based pseudo-random scheme (splitmix64 finalizer over seed, stream
// and counter), so any run of the generator reproduces identical corpora from
// a seed. Documented in docs/formats.md.
namespace rng {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t value(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return mix64(mix64(seed + kGolden * (stream + 1)) + kGolden * (counter + 1));
}

constexpr double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return static_cast<double>(value(seed, stream, counter) >> 11) * 0x1.0p-53;
}

}  // namespace rng

struct GenSpec {
    std::uint64_t seed = 1;
    std::uint32_t n_users = 10;
    std::uint32_t n_venues = 100;
    std::uint32_t n_cities = 50;
    std::uint32_t n_checkins = 1000;

    // In-trail gaps are uniform in [continue_gap_min, continue_gap_max);
    // with split_probability the gap is instead uniform in
    // [gap_limit, split_gap_max), forcing a trail break.
    double split_probability = 0.2;
    std::int64_t continue_gap_min_seconds = 60;
    std::int64_t continue_gap_max_seconds = 4 * 3600;
    std::int64_t split_gap_max_seconds = 48 * 3600;

    // Per-check-in probabilities of injecting a filterable anomaly.
    double repeat_rate = 0.0;
    double sub_minute_rate = 0.0;
    double supersonic_rate = 0.0;

    PipelineConfig pipeline;  // thresholds the embedded reference honors

    // Throws std::invalid_argument on rates outside [0, 1], counts that are
    // not positive (venues need >= 2), or inconsistent gap bounds.
    void validate() const;
};

struct GroundTruthTrail {
    std::int64_t trail_id = 0;
    std::vector<std::string> venue_ids;
};

struct AnomalyLabel {
    std::size_t checkin_row = 0;  // 1-based row in the check-in file
    std::string filter;           // "repeat" | "dwell" | "speed"
};

struct Corpus {
    std::vector<CheckIn> checkins;  // file order
    std::vector<Venue> venues;
    std::vector<City> cities;       // the retained gazetteer rows
    std::vector<WikidataCandidate> wikidata;
    std::vector<std::pair<std::string, std::string>> mapping_rows;
    std::vector<TaxonomyRecord> taxonomy_rows;
    std::vector<GroundTruthTrail> ground_truth;
    std::vector<AnomalyLabel> anomalies;
};

// Deterministic corpus plus the trails the pipeline must produce, computed by
// a naive reference implementation embedded here (independent of the
// trailbuild module).
Corpus generate_corpus(const GenSpec& spec);

// Serializes a corpus in the formats the parsers consume: checkins.tsv,
// venues.csv, cities.tsv (GeoNames layout, including a few rows the retention
// rule must drop), wikidata.csv, mapping.csv, taxonomy.csv, ground_truth.tsv
// and anomalies.tsv.
void write_corpus(const Corpus& corpus, const std::filesystem::path& directory);

}  // namespace trails
