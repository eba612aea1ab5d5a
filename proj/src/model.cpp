#include "trails/model.hpp"

namespace trails {

// Days-from-civil and its inverse follow Howard Hinnant's public-domain
// chrono-compatible algorithms.
std::int64_t days_from_civil(int year, unsigned month, unsigned day) {
    year -= month <= 2;
    const std::int64_t era = (year >= 0 ? year : year - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(year - era * 400);
    const unsigned doy = (153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t days, int& year, unsigned& month, unsigned& day) {
    days += 719468;
    const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(days - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    day = doy - (153 * mp + 2) / 5 + 1;
    month = mp + (mp < 10 ? 3 : -9);
    year = static_cast<int>(y + (month <= 2));
}

bool valid_civil_date(int year, unsigned month, unsigned day) {
    if (month < 1 || month > 12 || day < 1) return false;
    static constexpr unsigned lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    unsigned max_day = lengths[month - 1];
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    if (month == 2 && leap) max_day = 29;
    return day <= max_day;
}

Timestamp timestamp_from_civil(const CivilTime& local, std::int32_t offset_minutes) {
    const std::int64_t local_epoch =
        days_from_civil(local.year, local.month, local.day) * 86400 +
        static_cast<std::int64_t>(local.hour) * 3600 +
        static_cast<std::int64_t>(local.minute) * 60 + local.second;
    Timestamp ts;
    ts.instant = local_epoch - static_cast<std::int64_t>(offset_minutes) * 60;
    ts.offset_minutes = offset_minutes;
    return ts;
}

CivilTime civil_from_timestamp(const Timestamp& ts) {
    std::int64_t local = ts.local_seconds();
    std::int64_t days = local / 86400;
    std::int64_t rem = local % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    CivilTime civil;
    civil_from_days(days, civil.year, civil.month, civil.day);
    civil.hour = static_cast<unsigned>(rem / 3600);
    civil.minute = static_cast<unsigned>((rem % 3600) / 60);
    civil.second = static_cast<unsigned>(rem % 60);
    return civil;
}

bool operator==(const EnrichedCheckIn& a, const EnrichedCheckIn& b) {
    return a.trail_id == b.trail_id && a.anon_user_id == b.anon_user_id &&
           a.venue_id == b.venue_id && a.category_id == b.category_id &&
           a.schema_term == b.schema_term && a.city_geonames_id == b.city_geonames_id &&
           a.city_name == b.city_name && a.country_code == b.country_code &&
           a.wikidata_id == b.wikidata_id && a.timestamp.identical(b.timestamp);
}

Trail Trail::create(std::int64_t id, std::int64_t user,
                    std::vector<EnrichedCheckIn> checkins,
                    std::int64_t gap_limit_seconds) {
    if (id <= 0) throw std::invalid_argument("trail id must be positive");
    if (user <= 0) throw std::invalid_argument("trail user must be positive");
    if (checkins.size() < 2) throw std::invalid_argument("trail needs at least 2 check-ins");
    for (std::size_t i = 1; i < checkins.size(); ++i) {
        const auto& prev = checkins[i - 1];
        const auto& cur = checkins[i];
        if (!(prev.timestamp < cur.timestamp))
            throw std::invalid_argument("trail timestamps must be strictly increasing");
        if (prev.venue_id == cur.venue_id)
            throw std::invalid_argument("consecutive check-ins share a venue");
        const std::int64_t gap = cur.timestamp.instant - prev.timestamp.instant;
        std::int64_t limit = gap_limit_seconds;
        if (prev.timestamp.minute_aligned() && cur.timestamp.minute_aligned())
            limit += 60;  // truncation slack
        if (gap >= limit)
            throw std::invalid_argument("consecutive gap exceeds the trail limit");
    }
    return Trail(id, user, std::move(checkins));
}

void PipelineConfig::validate() const {
    if (gap_limit_seconds <= 0) throw std::invalid_argument("gap_limit_seconds must be positive");
    if (min_dwell_seconds <= 0) throw std::invalid_argument("min_dwell_seconds must be positive");
    if (!(max_speed_mps > 0.0)) throw std::invalid_argument("max_speed_mps must be positive");
    if (!(link_radius_meters > 0.0)) throw std::invalid_argument("link_radius_meters must be positive");
    if (big_city_population <= 0) throw std::invalid_argument("big_city_population must be positive");
    if (!(earth_radius_meters > 0.0)) throw std::invalid_argument("earth_radius_meters must be positive");
}

}  // namespace trails
