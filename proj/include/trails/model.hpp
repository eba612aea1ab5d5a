#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace trails {

// Point in time with second precision plus the UTC offset it was recorded in.
// Ordering and equality compare the absolute instant only; the offset is kept
// so the original local representation can be reproduced on output.
struct Timestamp {
    std::int64_t instant = 0;      // seconds since the Unix epoch, UTC
    std::int32_t offset_minutes = 0;  // signed minutes from UTC, [-1440, 1440]

    static constexpr std::int32_t kMinOffset = -1440;
    static constexpr std::int32_t kMaxOffset = 1440;

    static constexpr bool valid_offset(std::int32_t minutes) {
        return minutes >= kMinOffset && minutes <= kMaxOffset;
    }

    // Seconds since the epoch of the local wall-clock reading.
    constexpr std::int64_t local_seconds() const {
        return instant + static_cast<std::int64_t>(offset_minutes) * 60;
    }

    // Whole minutes carry no seconds in any offset (offsets are whole minutes).
    constexpr bool minute_aligned() const {
        return ((instant % 60) + 60) % 60 == 0;
    }

    friend constexpr bool operator==(const Timestamp& a, const Timestamp& b) {
        return a.instant == b.instant;
    }
    friend constexpr bool operator<(const Timestamp& a, const Timestamp& b) {
        return a.instant < b.instant;
    }
    friend constexpr bool operator<=(const Timestamp& a, const Timestamp& b) {
        return a.instant <= b.instant;
    }
    friend constexpr bool operator>(const Timestamp& a, const Timestamp& b) {
        return a.instant > b.instant;
    }
    friend constexpr bool operator>=(const Timestamp& a, const Timestamp& b) {
        return a.instant >= b.instant;
    }

    // Field-wise equality, offset included. The comparison operators above
    // deliberately ignore the offset.
    constexpr bool identical(const Timestamp& other) const {
        return instant == other.instant && offset_minutes == other.offset_minutes;
    }
};

struct CivilTime {
    int year = 1970;
    unsigned month = 1;   // 1..12
    unsigned day = 1;     // 1..31
    unsigned hour = 0;
    unsigned minute = 0;
    unsigned second = 0;
};

// Proleptic Gregorian calendar <-> epoch day conversions.
std::int64_t days_from_civil(int year, unsigned month, unsigned day);
void civil_from_days(std::int64_t days, int& year, unsigned& month, unsigned& day);
bool valid_civil_date(int year, unsigned month, unsigned day);

// Builds a Timestamp from a local civil reading and its UTC offset.
Timestamp timestamp_from_civil(const CivilTime& local, std::int32_t offset_minutes);

// Local civil reading of a timestamp (applies the stored offset).
CivilTime civil_from_timestamp(const Timestamp& ts);

struct CheckIn {
    std::string venue_id;
    std::string user_id;
    Timestamp timestamp;
};

struct Venue {
    std::string id;
    double latitude = 0.0;    // degrees, [-90, 90]
    double longitude = 0.0;   // degrees, [-180, 180]
    std::string category_id;
};

constexpr bool valid_latitude(double lat) { return lat >= -90.0 && lat <= 90.0; }
constexpr bool valid_longitude(double lon) { return lon >= -180.0 && lon <= 180.0; }

// Gazetteer record. population is absent when the source row carries none;
// wikidata_id is empty until entity linking resolves it.
struct City {
    std::int64_t geonames_id = 0;
    std::string name;
    std::string country_code;  // ISO 3166-1 alpha-2
    double latitude = 0.0;
    double longitude = 0.0;
    std::optional<std::int64_t> population;
    std::string wikidata_id;   // "Q..." or empty
};

// Candidate knowledge-base entity for city linking.
struct WikidataCandidate {
    std::string name;
    double latitude = 0.0;
    double longitude = 0.0;
    std::string qid;
};

using VenueMap = std::unordered_map<std::string, Venue>;

// Category id -> vocabulary term in CURIE form ("schema:BarOrPub").
using CategoryMapping = std::unordered_map<std::string, std::string>;

// Raw taxonomy row; empty parent_id marks a root.
struct TaxonomyRecord {
    std::string id;
    std::string name;
    std::string parent_id;
};

// One fully resolved output record (one row of the published dataset).
struct EnrichedCheckIn {
    std::int64_t trail_id = 0;       // assigned at emission, dense from 1
    std::int64_t anon_user_id = 0;   // assigned at emission, dense from 1
    std::string venue_id;
    std::string category_id;
    std::string schema_term;         // CURIE, e.g. "schema:BarOrPub"
    std::int64_t city_geonames_id = 0;
    std::string city_name;
    std::string country_code;
    std::string wikidata_id;         // "Q..." or empty
    Timestamp timestamp;             // minute-truncated on sealed trails
};

bool operator==(const EnrichedCheckIn& a, const EnrichedCheckIn& b);

// Validated trail: >= 2 check-ins, strictly increasing timestamps, no
// consecutive venue repeats, consecutive gaps within the configured limit.
// Construction is the only mutation point; instances are immutable.
class Trail {
public:
    // Throws std::invalid_argument when any invariant fails. Minute-aligned
    // timestamps get one minute of slack on the gap limit: truncation can
    // stretch a gap that was under the limit at second precision.
    static Trail create(std::int64_t id, std::int64_t user,
                        std::vector<EnrichedCheckIn> checkins,
                        std::int64_t gap_limit_seconds);

    std::int64_t id() const { return id_; }
    std::int64_t user() const { return user_; }
    const std::vector<EnrichedCheckIn>& checkins() const { return checkins_; }
    std::size_t size() const { return checkins_.size(); }

private:
    Trail(std::int64_t id, std::int64_t user, std::vector<EnrichedCheckIn> checkins)
        : id_(id), user_(user), checkins_(std::move(checkins)) {}

    std::int64_t id_;
    std::int64_t user_;
    std::vector<EnrichedCheckIn> checkins_;
};

enum class DropPolicy { Earlier, Later };

// All pipeline thresholds. Defaults: 8 h gap limit, 60 s minimum dwell,
// Mach 1 speed cap, 10 km entity-link radius, 100 000 inhabitant big-city
// cutoff, mean Earth radius.
struct PipelineConfig {
    std::int64_t gap_limit_seconds = 8 * 3600;
    std::int64_t min_dwell_seconds = 60;
    double max_speed_mps = 343.0;
    double link_radius_meters = 10000.0;
    std::int64_t big_city_population = 100000;
    double earth_radius_meters = 6371000.0;

    // Which member of a violating pair each filter removes. The defaults drop
    // the too-briefly-visited earlier check-in and the implausibly-far later
    // one.
    DropPolicy dwell_drop = DropPolicy::Earlier;
    DropPolicy speed_drop = DropPolicy::Later;

    // Throws std::invalid_argument when any threshold is not strictly positive.
    void validate() const;
};

}  // namespace trails
