#include "trails/emit.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string_view>

#include "trails/ingest.hpp"

namespace trails {

IdAssignment anonymize(std::vector<TrailDraft>& drafts) {
    IdAssignment ids;
    for (auto& draft : drafts) {
        auto [it, inserted] = ids.user_map.try_emplace(
            draft.user_id, static_cast<std::int64_t>(ids.user_order.size()) + 1);
        if (inserted) ids.user_order.push_back(draft.user_id);
        const std::int64_t anon = it->second;
        const std::int64_t trail_id = ids.next_trail_id++;
        for (auto& checkin : draft.checkins) {
            checkin.trail_id = trail_id;
            checkin.anon_user_id = anon;
        }
    }
    return ids;
}

Timestamp truncate_minute(const Timestamp& ts) {
    // Offsets are whole minutes, so the local seconds equal instant mod 60.
    const std::int64_t seconds = ((ts.instant % 60) + 60) % 60;
    return Timestamp{ts.instant - seconds, ts.offset_minutes};
}

void truncate_trails(std::vector<TrailDraft>& drafts) {
    for (auto& draft : drafts)
        for (auto& checkin : draft.checkins)
            checkin.timestamp = truncate_minute(checkin.timestamp);
}

std::vector<Trail> seal_trails(std::vector<TrailDraft>&& drafts, const PipelineConfig& config) {
    std::vector<Trail> trails;
    trails.reserve(drafts.size());
    for (auto& draft : drafts) {
        if (draft.checkins.empty()) continue;
        const std::int64_t id = draft.checkins.front().trail_id;
        const std::int64_t user = draft.checkins.front().anon_user_id;
        trails.push_back(
            Trail::create(id, user, std::move(draft.checkins), config.gap_limit_seconds));
    }
    drafts.clear();
    return trails;
}

std::string format_timestamp(const Timestamp& ts) {
    const CivilTime civil = civil_from_timestamp(ts);
    const std::int32_t offset = ts.offset_minutes;
    const char sign = offset < 0 ? '-' : '+';
    const std::int32_t magnitude = offset < 0 ? -offset : offset;
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%04d-%02u-%02uT%02u:%02u:%02u%c%02d:%02d",
                  civil.year, civil.month, civil.day, civil.hour, civil.minute, civil.second,
                  sign, magnitude / 60, magnitude % 60);
    return buffer;
}

std::string csv_escape(const std::string& field) {
    const bool needs_quoting =
        field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quoting) return field;
    std::string quoted;
    quoted.reserve(field.size() + 2);
    quoted += '"';
    for (const char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

namespace {

void render_csv_row(const EnrichedCheckIn& c, std::string& row) {
    row.clear();
    row += std::to_string(c.trail_id);
    row += ',';
    row += std::to_string(c.anon_user_id);
    row += ',';
    row += csv_escape(c.venue_id);
    row += ',';
    row += csv_escape(c.category_id);
    row += ',';
    row += csv_escape(c.schema_term);
    row += ",geonames:";
    row += std::to_string(c.city_geonames_id);
    row += ',';
    if (!c.wikidata_id.empty()) {
        row += csv_escape("wd:" + c.wikidata_id);
    }
    row += ',';
    row += csv_escape(c.city_name);
    row += ',';
    row += csv_escape(c.country_code);
    row += ',';
    row += format_timestamp(c.timestamp);
    row += '\n';
}

}  // namespace

std::uint64_t write_csv(const std::vector<Trail>& trails, std::ostream& out) {
    std::uint64_t bytes = 0;
    std::string row;

    row = kStdCsvHeader;
    row += '\n';
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
    bytes += row.size();

    for (const auto& trail : trails) {
        for (const auto& checkin : trail.checkins()) {
            render_csv_row(checkin, row);
            out.write(row.data(), static_cast<std::streamsize>(row.size()));
            bytes += row.size();
        }
    }
    if (!out) throw std::runtime_error("failed writing CSV output");
    return bytes;
}

namespace {

constexpr const char* kTurtlePrologue =
    "@prefix tr: <https://w3id.org/checkin-trails/ns#> .\n"
    "@prefix schema: <http://schema.org/> .\n"
    "@prefix wd: <http://www.wikidata.org/entity/> .\n"
    "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n";

void append_turtle_literal(std::string& out, const std::string& value) {
    out += '"';
    for (const char c : value) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
}

bool safe_local_name(const std::string& name) {
    if (name.empty()) return false;
    for (const char c : name) {
        const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                        (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

void append_iri(std::string& out, const std::string& base, const std::string& value) {
    out += '<';
    out += base;
    static const char* hex = "0123456789ABCDEF";
    for (const unsigned char c : value) {
        const bool safe = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                          (c >= '0' && c <= '9') || c == '-' || c == '.' || c == '_' ||
                          c == '~';
        if (safe) {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xF];
        }
    }
    out += '>';
}

// The vocabulary term is a prefixed name when it is a plain schema.org CURIE;
// anything else is kept as a literal so no information is lost.
void append_schema_term(std::string& out, const std::string& term) {
    constexpr std::string_view prefix = "schema:";
    if (term.size() > prefix.size() && term.compare(0, prefix.size(), prefix) == 0 &&
        safe_local_name(term.substr(prefix.size()))) {
        out += term;
    } else {
        append_turtle_literal(out, term);
    }
}

void render_turtle_subject(const EnrichedCheckIn& c, std::size_t position, std::string& out) {
    out.clear();
    out += "tr:checkin_";
    out += std::to_string(c.trail_id);
    out += '_';
    out += std::to_string(position);
    out += " tr:trail ";
    out += std::to_string(c.trail_id);
    out += " ;\n    tr:user ";
    out += std::to_string(c.anon_user_id);
    out += " ;\n    tr:venue ";
    append_iri(out, "https://foursquare.com/v/", c.venue_id);
    out += " ;\n    tr:venueCategory ";
    append_turtle_literal(out, c.category_id);
    out += " ;\n    tr:venueSchema ";
    append_schema_term(out, c.schema_term);
    out += " ;\n    tr:venueGeonames <https://sws.geonames.org/";
    out += std::to_string(c.city_geonames_id);
    out += "/>";
    if (!c.wikidata_id.empty()) {
        out += " ;\n    tr:venueWikidata ";
        if (safe_local_name(c.wikidata_id)) {
            out += "wd:";
            out += c.wikidata_id;
        } else {
            append_iri(out, "http://www.wikidata.org/entity/", c.wikidata_id);
        }
    }
    out += " ;\n    tr:venueCityName ";
    append_turtle_literal(out, c.city_name);
    out += " ;\n    tr:venueCountry ";
    append_turtle_literal(out, c.country_code);
    out += " ;\n    tr:timestamp ";
    append_turtle_literal(out, format_timestamp(c.timestamp));
    out += "^^xsd:dateTime .\n";
}

}  // namespace

std::uint64_t write_turtle(const std::vector<Trail>& trails, std::ostream& out) {
    std::uint64_t bytes = 0;
    out.write(kTurtlePrologue, static_cast<std::streamsize>(std::string_view(kTurtlePrologue).size()));
    bytes += std::string_view(kTurtlePrologue).size();

    std::string block;
    for (const auto& trail : trails) {
        for (std::size_t i = 0; i < trail.checkins().size(); ++i) {
            block.clear();
            block += '\n';
            std::string subject;
            render_turtle_subject(trail.checkins()[i], i + 1, subject);
            block += subject;
            out.write(block.data(), static_cast<std::streamsize>(block.size()));
            bytes += block.size();
        }
    }
    if (!out) throw std::runtime_error("failed writing Turtle output");
    return bytes;
}

}  // namespace trails
