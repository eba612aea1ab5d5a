#include "trails/ingest.hpp"

#include <charconv>
#include <istream>
#include <stdexcept>
#include <utility>

namespace trails {

namespace {

bool parse_double(std::string_view text, double& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool parse_int64(std::string_view text, std::int64_t& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

// Reads physical lines, tolerating CRLF. Throws when the stream goes bad
// (as opposed to plain EOF).
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    bool next(std::string& line) {
        if (!std::getline(in_, line)) {
            if (in_.bad()) throw std::runtime_error("input stream failed mid-read");
            return false;
        }
        strip_cr(line);
        ++line_number_;
        return true;
    }

    std::size_t line_number() const { return line_number_; }

private:
    std::istream& in_;
    std::size_t line_number_ = 0;
};

void add_error(ParseReport& report, std::size_t line, RawRecordError::Reason reason,
               std::string detail) {
    report.errors.push_back(RawRecordError{line, reason, std::move(detail)});
}

bool parse_fixed_digits(std::string_view text, std::size_t& pos, int count, unsigned& out) {
    if (pos + count > text.size()) return false;
    unsigned value = 0;
    for (int i = 0; i < count; ++i) {
        const char c = text[pos + i];
        if (c < '0' || c > '9') return false;
        value = value * 10 + static_cast<unsigned>(c - '0');
    }
    pos += count;
    out = value;
    return true;
}

bool expect_char(std::string_view text, std::size_t& pos, char c) {
    if (pos >= text.size() || text[pos] != c) return false;
    ++pos;
    return true;
}

}  // namespace

const char* to_string(RawRecordError::Reason reason) {
    switch (reason) {
        case RawRecordError::Reason::MalformedTimestamp: return "malformed timestamp";
        case RawRecordError::Reason::BadCoordinate: return "bad coordinate";
        case RawRecordError::Reason::UnknownColumnCount: return "unknown column count";
        case RawRecordError::Reason::EmptyId: return "empty id";
    }
    return "unknown";
}

std::optional<Timestamp> parse_iso8601(std::string_view text, std::string* error) {
    const auto fail = [&](const char* why) -> std::optional<Timestamp> {
        if (error) *error = why;
        return std::nullopt;
    };

    std::size_t pos = 0;
    unsigned year, month, day, hour, minute, second = 0;
    if (!parse_fixed_digits(text, pos, 4, year)) return fail("expected 4-digit year");
    if (!expect_char(text, pos, '-')) return fail("expected '-' after year");
    if (!parse_fixed_digits(text, pos, 2, month)) return fail("expected 2-digit month");
    if (!expect_char(text, pos, '-')) return fail("expected '-' after month");
    if (!parse_fixed_digits(text, pos, 2, day)) return fail("expected 2-digit day");
    if (pos >= text.size() || (text[pos] != 'T' && text[pos] != 't' && text[pos] != ' '))
        return fail("expected date/time separator");
    ++pos;
    if (!parse_fixed_digits(text, pos, 2, hour)) return fail("expected 2-digit hour");
    if (!expect_char(text, pos, ':')) return fail("expected ':' after hour");
    if (!parse_fixed_digits(text, pos, 2, minute)) return fail("expected 2-digit minute");
    if (pos < text.size() && text[pos] == ':') {
        ++pos;
        if (!parse_fixed_digits(text, pos, 2, second)) return fail("expected 2-digit second");
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            std::size_t digits = 0;
            while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
                ++pos;
                ++digits;
            }
            if (digits == 0) return fail("expected fractional digits after '.'");
        }
    }

    if (!valid_civil_date(static_cast<int>(year), month, day)) return fail("invalid calendar date");
    if (hour > 23 || minute > 59 || second > 59) return fail("time of day out of range");

    if (pos >= text.size()) return fail("missing UTC offset");
    std::int32_t offset = 0;
    const char sign_char = text[pos];
    if (sign_char == 'Z' || sign_char == 'z') {
        ++pos;
    } else if (sign_char == '+' || sign_char == '-') {
        ++pos;
        unsigned oh, om = 0;
        if (!parse_fixed_digits(text, pos, 2, oh)) return fail("expected offset hours");
        if (pos < text.size()) {
            std::size_t saved = pos;
            if (text[pos] == ':') {
                ++pos;
                if (!parse_fixed_digits(text, pos, 2, om)) return fail("expected offset minutes");
            } else if (!parse_fixed_digits(text, pos, 2, om)) {
                pos = saved;  // bare "+HH" with trailing junk is caught below
            }
        }
        if (om > 59) return fail("offset minutes out of range");
        offset = static_cast<std::int32_t>(oh * 60 + om);
        if (sign_char == '-') offset = -offset;
    } else {
        return fail("missing UTC offset");
    }
    if (pos != text.size()) return fail("trailing characters");
    if (!Timestamp::valid_offset(offset)) return fail("offset out of range");

    CivilTime civil;
    civil.year = static_cast<int>(year);
    civil.month = month;
    civil.day = day;
    civil.hour = hour;
    civil.minute = minute;
    civil.second = second;
    return timestamp_from_civil(civil, offset);
}

void split_delimited(std::string_view line, char delimiter, std::vector<std::string>& fields) {
    fields.clear();
    std::string current;
    bool in_quotes = false;
    bool field_started = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == delimiter) {
            fields.push_back(std::move(current));
            current.clear();
            field_started = false;
        } else {
            current += c;
            field_started = true;
        }
    }
    fields.push_back(std::move(current));
}

namespace {

// Tab-separated sources (GeoNames dumps, check-in logs) are not quoted;
// treating '"' literally keeps names like `"Ain` intact.
void split_plain(std::string_view line, char delimiter, std::vector<std::string>& fields) {
    fields.clear();
    std::size_t start = 0;
    while (true) {
        const std::size_t end = line.find(delimiter, start);
        if (end == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            return;
        }
        fields.emplace_back(line.substr(start, end - start));
        start = end + 1;
    }
}

void split_row(std::string_view line, char delimiter, std::vector<std::string>& fields) {
    if (delimiter == '\t')
        split_plain(line, delimiter, fields);
    else
        split_delimited(line, delimiter, fields);
}

}  // namespace

void parse_checkins_stream(std::istream& in, const CheckinFormat& format,
                           const CheckinSink& sink, ParseReport& report) {
    const int max_column =
        std::max(format.user_column, std::max(format.venue_column, format.timestamp_column));
    LineReader reader(in);
    std::string line;
    std::vector<std::string> fields;
    bool first = true;
    while (reader.next(line)) {
        ++report.total_lines;
        const std::size_t line_no = reader.line_number();
        if (first && format.has_header) {
            first = false;
            ++report.header_lines;
            continue;
        }
        first = false;
        split_row(line, format.delimiter, fields);
        if (static_cast<int>(fields.size()) <= max_column) {
            add_error(report, line_no, RawRecordError::Reason::UnknownColumnCount,
                      "expected at least " + std::to_string(max_column + 1) + " columns, got " +
                          std::to_string(fields.size()));
            continue;
        }
        std::string& user = fields[static_cast<std::size_t>(format.user_column)];
        std::string& venue = fields[static_cast<std::size_t>(format.venue_column)];
        const std::string& stamp = fields[static_cast<std::size_t>(format.timestamp_column)];
        if (user.empty() || venue.empty()) {
            add_error(report, line_no, RawRecordError::Reason::EmptyId,
                      user.empty() ? "empty user id" : "empty venue id");
            continue;
        }
        std::string why;
        const auto ts = parse_iso8601(stamp, &why);
        if (!ts) {
            add_error(report, line_no, RawRecordError::Reason::MalformedTimestamp,
                      "'" + stamp + "': " + why);
            continue;
        }
        ++report.records;
        sink(CheckIn{std::move(venue), std::move(user), *ts});
    }
}

CheckinParseResult parse_checkins(std::istream& in, const CheckinFormat& format) {
    CheckinParseResult result;
    parse_checkins_stream(
        in, format, [&](CheckIn&& c) { result.checkins.push_back(std::move(c)); }, result.report);
    return result;
}

VenueParseResult parse_venues(std::istream& in, char delimiter) {
    VenueParseResult result;
    LineReader reader(in);
    std::string line;
    std::vector<std::string> fields;
    while (reader.next(line)) {
        ++result.report.total_lines;
        const std::size_t line_no = reader.line_number();
        split_row(line, delimiter, fields);
        if (fields.size() < 4) {
            add_error(result.report, line_no, RawRecordError::Reason::UnknownColumnCount,
                      "expected 4 columns, got " + std::to_string(fields.size()));
            continue;
        }
        if (fields[0].empty()) {
            add_error(result.report, line_no, RawRecordError::Reason::EmptyId, "empty venue id");
            continue;
        }
        double lat, lon;
        if (!parse_double(fields[1], lat) || !parse_double(fields[2], lon) ||
            !valid_latitude(lat) || !valid_longitude(lon)) {
            add_error(result.report, line_no, RawRecordError::Reason::BadCoordinate,
                      "latitude '" + fields[1] + "', longitude '" + fields[2] + "'");
            continue;
        }
        ++result.report.records;
        if (result.venues.count(fields[0]) != 0) {
            result.report.warnings.push_back("line " + std::to_string(line_no) +
                                             ": duplicate venue id '" + fields[0] +
                                             "', keeping the last occurrence");
        }
        Venue venue{std::move(fields[0]), lat, lon, std::move(fields[3])};
        result.venues.insert_or_assign(venue.id, std::move(venue));
    }
    return result;
}

GazetteerParseResult parse_gazetteer(std::istream& in) {
    GazetteerParseResult result;
    LineReader reader(in);
    std::string line;
    std::vector<std::string> fields;
    while (reader.next(line)) {
        ++result.report.total_lines;
        const std::size_t line_no = reader.line_number();
        split_plain(line, '\t', fields);
        if (fields.size() < 15) {
            add_error(result.report, line_no, RawRecordError::Reason::UnknownColumnCount,
                      "expected the 19-column GeoNames layout, got " +
                          std::to_string(fields.size()));
            continue;
        }
        std::int64_t geonames_id;
        if (!parse_int64(fields[0], geonames_id) || geonames_id <= 0) {
            add_error(result.report, line_no, RawRecordError::Reason::EmptyId,
                      "bad geonameid '" + fields[0] + "'");
            continue;
        }
        if (fields[1].empty()) {
            add_error(result.report, line_no, RawRecordError::Reason::EmptyId, "empty city name");
            continue;
        }
        double lat, lon;
        if (!parse_double(fields[4], lat) || !parse_double(fields[5], lon) ||
            !valid_latitude(lat) || !valid_longitude(lon)) {
            add_error(result.report, line_no, RawRecordError::Reason::BadCoordinate,
                      "latitude '" + fields[4] + "', longitude '" + fields[5] + "'");
            continue;
        }
        const std::string& feature_code = fields[7];
        std::optional<std::int64_t> population;
        if (!fields[14].empty()) {
            std::int64_t value;
            if (parse_int64(fields[14], value) && value >= 0) {
                population = value;
            } else {
                result.report.warnings.push_back("line " + std::to_string(line_no) +
                                                 ": unreadable population '" + fields[14] +
                                                 "', treated as absent");
            }
        }
        const bool keep =
            (population && *population > 500) || feature_code == "PPLA4";
        if (!keep) {
            ++result.report.skipped;
            continue;
        }
        ++result.report.records;
        City city;
        city.geonames_id = geonames_id;
        city.name = std::move(fields[1]);
        city.country_code = std::move(fields[8]);
        city.latitude = lat;
        city.longitude = lon;
        city.population = population;
        result.cities.push_back(std::move(city));
    }
    return result;
}

MappingParseResult parse_mapping(std::istream& in, char delimiter) {
    MappingParseResult result;
    LineReader reader(in);
    std::string line;
    std::vector<std::string> fields;
    while (reader.next(line)) {
        ++result.report.total_lines;
        const std::size_t line_no = reader.line_number();
        split_row(line, delimiter, fields);
        if (fields.size() < 2) {
            add_error(result.report, line_no, RawRecordError::Reason::UnknownColumnCount,
                      "expected 2 columns, got " + std::to_string(fields.size()));
            continue;
        }
        if (fields[0].empty() || fields[1].empty()) {
            add_error(result.report, line_no, RawRecordError::Reason::EmptyId,
                      fields[0].empty() ? "empty category id" : "empty term");
            continue;
        }
        if (result.mapping.count(fields[0]) != 0) {
            throw std::runtime_error("duplicate category id '" + fields[0] +
                                     "' in mapping at line " + std::to_string(line_no));
        }
        const std::size_t colon = fields[1].find(':');
        if (colon == std::string::npos || fields[1].compare(0, colon, "schema") != 0) {
            result.report.warnings.push_back("line " + std::to_string(line_no) +
                                             ": term '" + fields[1] +
                                             "' does not use the schema: prefix");
        }
        ++result.report.records;
        result.mapping.emplace(std::move(fields[0]), std::move(fields[1]));
    }
    return result;
}

WikidataParseResult parse_wikidata_cities(std::istream& in, char delimiter) {
    WikidataParseResult result;
    LineReader reader(in);
    std::string line;
    std::vector<std::string> fields;
    while (reader.next(line)) {
        ++result.report.total_lines;
        const std::size_t line_no = reader.line_number();
        split_row(line, delimiter, fields);
        if (fields.size() < 4) {
            add_error(result.report, line_no, RawRecordError::Reason::UnknownColumnCount,
                      "expected 4 columns, got " + std::to_string(fields.size()));
            continue;
        }
        if (fields[0].empty() || fields[1].empty() || fields[2].empty() || fields[3].empty()) {
            ++result.report.skipped;
            result.report.warnings.push_back("line " + std::to_string(line_no) +
                                             ": candidate missing label, coordinates or id; skipped");
            continue;
        }
        double lat, lon;
        if (!parse_double(fields[1], lat) || !parse_double(fields[2], lon) ||
            !valid_latitude(lat) || !valid_longitude(lon)) {
            add_error(result.report, line_no, RawRecordError::Reason::BadCoordinate,
                      "latitude '" + fields[1] + "', longitude '" + fields[2] + "'");
            continue;
        }
        ++result.report.records;
        result.candidates.push_back(
            WikidataCandidate{std::move(fields[0]), lat, lon, std::move(fields[3])});
    }
    return result;
}

TaxonomyParseResult parse_taxonomy(std::istream& in, char delimiter) {
    TaxonomyParseResult result;
    LineReader reader(in);
    std::string line;
    std::vector<std::string> fields;
    std::unordered_map<std::string, bool> seen;
    while (reader.next(line)) {
        ++result.report.total_lines;
        const std::size_t line_no = reader.line_number();
        split_row(line, delimiter, fields);
        if (fields.size() < 2) {
            add_error(result.report, line_no, RawRecordError::Reason::UnknownColumnCount,
                      "expected at least 2 columns, got " + std::to_string(fields.size()));
            continue;
        }
        if (fields[0].empty()) {
            add_error(result.report, line_no, RawRecordError::Reason::EmptyId,
                      "empty category id");
            continue;
        }
        if (!seen.emplace(fields[0], true).second) {
            throw std::runtime_error("duplicate category id '" + fields[0] +
                                     "' in taxonomy at line " + std::to_string(line_no));
        }
        ++result.report.records;
        TaxonomyRecord record;
        record.id = std::move(fields[0]);
        record.name = std::move(fields[1]);
        if (fields.size() >= 3) record.parent_id = std::move(fields[2]);
        result.records.push_back(std::move(record));
    }
    return result;
}

const char* const kStdCsvHeader =
    "trail_id,user_id,venue_id,venue_category,venue_schema,venue_geonames,venue_wikidata,"
    "venue_city_name,venue_country,timestamp";

namespace {

bool unbalanced_quotes(const std::string& text) {
    std::size_t count = 0;
    for (const char c : text)
        if (c == '"') ++count;
    return count % 2 != 0;
}

}  // namespace

StdParseResult parse_std_csv(std::istream& in) {
    StdParseResult result;
    LineReader reader(in);
    std::string record;
    std::string continuation;
    std::vector<std::string> fields;
    bool saw_header = false;
    while (reader.next(record)) {
        const std::size_t start_line = reader.line_number();
        // A quoted field may span physical lines.
        while (unbalanced_quotes(record) && reader.next(continuation)) {
            record += '\n';
            record += continuation;
        }
        ++result.report.total_lines;
        if (!saw_header) {
            if (record != kStdCsvHeader)
                throw std::runtime_error("unexpected dataset header: '" + record + "'");
            saw_header = true;
            ++result.report.header_lines;
            continue;
        }
        split_delimited(record, ',', fields);
        if (fields.size() != 10) {
            add_error(result.report, start_line, RawRecordError::Reason::UnknownColumnCount,
                      "expected 10 columns, got " + std::to_string(fields.size()));
            continue;
        }
        EnrichedCheckIn row;
        if (!parse_int64(fields[0], row.trail_id) || row.trail_id <= 0) {
            add_error(result.report, start_line, RawRecordError::Reason::EmptyId,
                      "bad trail_id '" + fields[0] + "'");
            continue;
        }
        if (!parse_int64(fields[1], row.anon_user_id) || row.anon_user_id <= 0) {
            add_error(result.report, start_line, RawRecordError::Reason::EmptyId,
                      "bad user_id '" + fields[1] + "'");
            continue;
        }
        if (fields[2].empty()) {
            add_error(result.report, start_line, RawRecordError::Reason::EmptyId,
                      "empty venue id");
            continue;
        }
        constexpr std::string_view geonames_prefix = "geonames:";
        if (fields[5].compare(0, geonames_prefix.size(), geonames_prefix) != 0 ||
            !parse_int64(std::string_view(fields[5]).substr(geonames_prefix.size()),
                         row.city_geonames_id)) {
            add_error(result.report, start_line, RawRecordError::Reason::EmptyId,
                      "bad geonames reference '" + fields[5] + "'");
            continue;
        }
        if (!fields[6].empty()) {
            constexpr std::string_view wd_prefix = "wd:";
            if (fields[6].compare(0, wd_prefix.size(), wd_prefix) != 0 ||
                fields[6].size() == wd_prefix.size()) {
                add_error(result.report, start_line, RawRecordError::Reason::EmptyId,
                          "bad wikidata reference '" + fields[6] + "'");
                continue;
            }
            row.wikidata_id = fields[6].substr(wd_prefix.size());
        }
        std::string why;
        const auto ts = parse_iso8601(fields[9], &why);
        if (!ts) {
            add_error(result.report, start_line, RawRecordError::Reason::MalformedTimestamp,
                      "'" + fields[9] + "': " + why);
            continue;
        }
        row.venue_id = std::move(fields[2]);
        row.category_id = std::move(fields[3]);
        row.schema_term = std::move(fields[4]);
        row.city_name = std::move(fields[7]);
        row.country_code = std::move(fields[8]);
        row.timestamp = *ts;
        ++result.report.records;
        result.records.push_back(std::move(row));
        result.line_numbers.push_back(start_line);
    }
    return result;
}

std::vector<std::vector<EnrichedCheckIn>> group_by_trail(std::vector<EnrichedCheckIn> records) {
    std::vector<std::vector<EnrichedCheckIn>> trails;
    for (auto& record : records) {
        if (trails.empty() || trails.back().back().trail_id != record.trail_id)
            trails.emplace_back();
        trails.back().push_back(std::move(record));
    }
    return trails;
}

}  // namespace trails
