#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trails/model.hpp"

namespace trails {

struct RawRecordError {
    enum class Reason {
        MalformedTimestamp,
        BadCoordinate,
        UnknownColumnCount,
        EmptyId,
    };

    std::size_t line_number = 0;  // 1-based physical line
    Reason reason = Reason::UnknownColumnCount;
    std::string detail;
};

const char* to_string(RawRecordError::Reason reason);

// Per-file accounting. For every parser:
//   total_lines == records + errors.size() + header_lines + skipped
struct ParseReport {
    std::vector<RawRecordError> errors;
    std::vector<std::string> warnings;
    std::size_t total_lines = 0;
    std::size_t header_lines = 0;
    std::size_t records = 0;
    std::size_t skipped = 0;
};

// Column layout of a check-in log. The published source collections disagree
// on ordering, so the layout is declared rather than guessed.
struct CheckinFormat {
    char delimiter = '\t';
    bool has_header = false;
    int user_column = 0;
    int venue_column = 1;
    int timestamp_column = 2;
};

// Strict ISO 8601 with a mandatory UTC offset ("2012-04-03T18:19:32-04:00").
// Naive timestamps are rejected: assuming UTC would corrupt the gap rule.
// Fractional seconds are accepted and truncated.
std::optional<Timestamp> parse_iso8601(std::string_view text, std::string* error = nullptr);

// Splits one physical line into fields, honoring RFC 4180 double quotes.
void split_delimited(std::string_view line, char delimiter, std::vector<std::string>& fields);

using CheckinSink = std::function<void(CheckIn&&)>;

// Streams well-formed rows into the sink; malformed rows land in the report.
// Throws std::runtime_error when the stream itself fails mid-read.
void parse_checkins_stream(std::istream& in, const CheckinFormat& format,
                           const CheckinSink& sink, ParseReport& report);

struct CheckinParseResult {
    std::vector<CheckIn> checkins;
    ParseReport report;
};
CheckinParseResult parse_checkins(std::istream& in, const CheckinFormat& format = {});

struct VenueParseResult {
    VenueMap venues;
    ParseReport report;
};
// Delimited columns: id, latitude, longitude, category_id. Duplicate ids keep
// the last occurrence and emit a warning.
VenueParseResult parse_venues(std::istream& in, char delimiter = ',');

struct GazetteerParseResult {
    std::vector<City> cities;
    ParseReport report;
};
// GeoNames 19-field dump. Retains rows with population > 500 or feature code
// PPLA4 (seat of a fourth-order administrative division).
GazetteerParseResult parse_gazetteer(std::istream& in);

struct MappingParseResult {
    CategoryMapping mapping;
    ParseReport report;
};
// Two columns: category id, CURIE term. Duplicate ids are fatal
// (std::runtime_error); an unrecognized prefix is a warning.
MappingParseResult parse_mapping(std::istream& in, char delimiter = ',');

struct WikidataParseResult {
    std::vector<WikidataCandidate> candidates;
    ParseReport report;
};
// Columns: name, latitude, longitude, Q-id. Rows missing a label, coordinates
// or the id are skipped with a warning.
WikidataParseResult parse_wikidata_cities(std::istream& in, char delimiter = ',');

struct TaxonomyParseResult {
    std::vector<TaxonomyRecord> records;
    ParseReport report;
};
// Columns: id, name, parent id (empty for roots). Duplicate ids are fatal.
TaxonomyParseResult parse_taxonomy(std::istream& in, char delimiter = ',');

// The exact header of the published CSV dataset.
extern const char* const kStdCsvHeader;

struct StdParseResult {
    std::vector<EnrichedCheckIn> records;
    std::vector<std::size_t> line_numbers;  // parallel to records
    ParseReport report;
};
// Reads a dataset CSV back into records. Quote-aware, including embedded
// newlines. Throws std::runtime_error when the header line does not match.
StdParseResult parse_std_csv(std::istream& in);

// Groups records into contiguous trail_id runs, preserving order.
std::vector<std::vector<EnrichedCheckIn>> group_by_trail(std::vector<EnrichedCheckIn> records);

}  // namespace trails
