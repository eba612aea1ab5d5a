#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "trails/enrich.hpp"
#include "trails/model.hpp"

namespace trails {

// Dense public identifiers. Users are numbered in order of first appearance,
// trails in emission order, both starting at 1.
struct IdAssignment {
    std::unordered_map<std::string, std::int64_t> user_map;
    std::vector<std::string> user_order;  // user_order[anon_id - 1] = original id
    std::int64_t next_trail_id = 1;
};

// Replaces original user identifiers with dense integers and assigns trail
// ids in place. Deterministic for a given draft order.
IdAssignment anonymize(std::vector<TrailDraft>& drafts);

// Zeroes the seconds of the local reading; the offset is untouched. Truncates,
// never rounds.
Timestamp truncate_minute(const Timestamp& ts);
void truncate_trails(std::vector<TrailDraft>& drafts);

// Converts anonymized, truncated drafts into validated trails.
std::vector<Trail> seal_trails(std::vector<TrailDraft>&& drafts, const PipelineConfig& config);

// "2012-04-03T18:19:00-04:00"; the offset is always rendered as +-HH:MM.
std::string format_timestamp(const Timestamp& ts);

// RFC 4180: quotes a field containing comma, quote, CR or LF.
std::string csv_escape(const std::string& field);

// Writes the dataset CSV (exact published header, one row per check-in,
// LF endings). Returns bytes written; throws std::runtime_error on sink
// failure.
std::uint64_t write_csv(const std::vector<Trail>& trails, std::ostream& out);

// Equivalent RDF Turtle rendering: one resource per check-in carrying the ten
// dataset fields as properties (the wikidata property is omitted when the
// city has no entity). Subjects are ordered by trail id, then position.
std::uint64_t write_turtle(const std::vector<Trail>& trails, std::ostream& out);

}  // namespace trails
