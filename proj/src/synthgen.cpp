#include "trails/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "trails/emit.hpp"
#include "trails/enrich.hpp"

namespace trails {

namespace {

// Stream ids for the counter-based generator.
enum Stream : std::uint64_t {
    kCityLat = 1,
    kCityLon,
    kCityPop,
    kCityWikidata,
    kCityWikidataJitter,
    kVenueJitter,
    kCheckinUser,
    kCheckinAnomaly,
    kCheckinGap,
    kCheckinVenue,
    kCheckinOffset,
    kUserStart,
    kVenueProbe,
    kFiller,
};

constexpr std::int64_t kEpoch2012 = 1325376000;  // 2012-01-01T00:00:00Z
constexpr double kPi = 3.14159265358979323846;

const std::int32_t kOffsetPalette[] = {-480, -300, -240, -120, -60, 0,
                                       60,   120,  180,  330,  540};

struct CategorySeed {
    const char* id;
    const char* name;
    const char* parent;  // empty = root
    const char* term;    // empty = unmapped
    bool leaf;           // venue palette membership
};

// Small fixed taxonomy exercising direct mappings, ancestor fallback and the
// unmapped-root default.
constexpr CategorySeed kCategories[] = {
    {"cat_food", "Food", "", "schema:FoodEstablishment", false},
    {"cat_transport", "Transport", "", "schema:CivicStructure", false},
    {"cat_shop", "Shops", "", "schema:Store", false},
    {"cat_outdoors", "Outdoors", "", "", false},
    {"cat_restaurant", "Restaurant", "cat_food", "schema:Restaurant", true},
    {"cat_cafe", "Cafe", "cat_food", "schema:CafeOrCoffeeShop", true},
    {"cat_bar", "Bar", "cat_food", "schema:BarOrPub", true},
    {"cat_bakery", "Bakery", "cat_food", "", true},
    {"cat_train", "Train Station", "cat_transport", "schema:TrainStation", true},
    {"cat_airport", "Airport", "cat_transport", "schema:Airport", true},
    {"cat_bus", "Bus Stop", "cat_transport", "", true},
    {"cat_clothes", "Clothing Store", "cat_shop", "schema:ClothingStore", true},
    {"cat_grocery", "Grocery", "cat_shop", "", true},
    {"cat_park", "Park", "cat_outdoors", "", true},
};

double uniform_range(double u, double lo, double hi) { return lo + u * (hi - lo); }

std::string format_coordinate(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

// ---------------------------------------------------------------------------
// Reference pipeline: an independent, deliberately naive restatement of the
// filter and segmentation rules used to produce the ground truth. It supports
// the default drop policies only.
// ---------------------------------------------------------------------------

std::vector<GroundTruthTrail> reference_trails(const std::vector<CheckIn>& checkins,
                                               const std::vector<Venue>& venues,
                                               const PipelineConfig& config) {
    std::unordered_map<std::string, const Venue*> venue_table;
    for (const auto& venue : venues) venue_table[venue.id] = &venue;

    std::vector<std::string> user_order;
    std::unordered_map<std::string, std::vector<std::size_t>> by_user;
    for (std::size_t i = 0; i < checkins.size(); ++i) {
        auto [it, inserted] = by_user.try_emplace(checkins[i].user_id);
        if (inserted) user_order.push_back(checkins[i].user_id);
        it->second.push_back(i);
    }

    std::vector<GroundTruthTrail> trails;
    std::int64_t next_trail_id = 1;
    for (const auto& user : user_order) {
        std::vector<std::size_t> order = by_user.at(user);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return checkins[a].timestamp.instant < checkins[b].timestamp.instant;
        });

        std::vector<const CheckIn*> seq;
        seq.reserve(order.size());
        for (const std::size_t idx : order) seq.push_back(&checkins[idx]);

        // Repeats: the last check-in of each same-venue run survives.
        std::vector<const CheckIn*> collapsed;
        for (const CheckIn* c : seq) {
            if (!collapsed.empty() && collapsed.back()->venue_id == c->venue_id)
                collapsed.back() = c;
            else
                collapsed.push_back(c);
        }

        // Dwell: drop the earlier of any pair under the minimum.
        std::vector<const CheckIn*> dwelled;
        for (const CheckIn* c : collapsed) {
            if (!dwelled.empty() &&
                c->timestamp.instant - dwelled.back()->timestamp.instant <
                    config.min_dwell_seconds)
                dwelled.back() = c;
            else
                dwelled.push_back(c);
        }

        // Speed: drop the later, keep comparing against the survivor.
        std::vector<const CheckIn*> speeded;
        for (const CheckIn* c : dwelled) {
            const auto venue_it = venue_table.find(c->venue_id);
            if (venue_it == venue_table.end()) continue;
            if (!speeded.empty()) {
                const Venue& prev = *venue_table.at(speeded.back()->venue_id);
                const Venue& cur = *venue_it->second;
                const std::int64_t gap =
                    c->timestamp.instant - speeded.back()->timestamp.instant;
                const double distance =
                    haversine(prev.latitude, prev.longitude, cur.latitude, cur.longitude,
                              config.earth_radius_meters);
                const bool violates = gap <= 0 ? distance > 0.0
                                               : distance / static_cast<double>(gap) >
                                                     config.max_speed_mps;
                if (violates) continue;
            }
            speeded.push_back(c);
        }

        // Removals above can re-create consecutive repeats; collapse them so
        // no trail carries a same-venue pair.
        std::vector<const CheckIn*> cleaned;
        for (const CheckIn* c : speeded) {
            if (!cleaned.empty() && cleaned.back()->venue_id == c->venue_id)
                cleaned.back() = c;
            else
                cleaned.push_back(c);
        }
        speeded = std::move(cleaned);

        // Segmentation: a strictly-under-limit gap extends the open trail,
        // anything else closes it; the open tail is emitted.
        std::vector<const CheckIn*> open;
        const auto close = [&]() {
            if (open.empty()) return;
            GroundTruthTrail trail;
            trail.trail_id = next_trail_id++;
            for (const CheckIn* c : open) trail.venue_ids.push_back(c->venue_id);
            trails.push_back(std::move(trail));
            open.clear();
        };
        for (std::size_t i = 1; i < speeded.size(); ++i) {
            if (speeded[i]->timestamp.instant <
                speeded[i - 1]->timestamp.instant + config.gap_limit_seconds) {
                if (open.empty()) open.push_back(speeded[i - 1]);
                open.push_back(speeded[i]);
            } else {
                close();
            }
        }
        close();
    }
    return trails;
}

}  // namespace

void GenSpec::validate() const {
    const auto check_rate = [](double rate, const char* name) {
        if (!(rate >= 0.0 && rate <= 1.0))
            throw std::invalid_argument(std::string(name) + " must be in [0, 1]");
    };
    check_rate(repeat_rate, "repeat_rate");
    check_rate(sub_minute_rate, "sub_minute_rate");
    check_rate(supersonic_rate, "supersonic_rate");
    check_rate(split_probability, "split_probability");
    if (repeat_rate + sub_minute_rate + supersonic_rate > 1.0)
        throw std::invalid_argument("anomaly rates must sum to at most 1");
    if (n_users == 0) throw std::invalid_argument("n_users must be positive");
    if (n_venues < 2) throw std::invalid_argument("n_venues must be at least 2");
    if (n_cities == 0) throw std::invalid_argument("n_cities must be positive");
    if (n_checkins == 0) throw std::invalid_argument("n_checkins must be positive");
    if (continue_gap_min_seconds < 1 ||
        continue_gap_max_seconds <= continue_gap_min_seconds)
        throw std::invalid_argument("continue gap bounds are inconsistent");
    if (continue_gap_min_seconds < pipeline.min_dwell_seconds)
        throw std::invalid_argument("continue_gap_min_seconds is under the dwell minimum");
    if (continue_gap_max_seconds > pipeline.gap_limit_seconds)
        throw std::invalid_argument("continue_gap_max_seconds exceeds the trail gap limit");
    if (split_gap_max_seconds <= pipeline.gap_limit_seconds)
        throw std::invalid_argument("split_gap_max_seconds must exceed the gap limit");
    if (pipeline.dwell_drop != DropPolicy::Earlier || pipeline.speed_drop != DropPolicy::Later)
        throw std::invalid_argument("ground truth supports the default drop policies only");
    pipeline.validate();
}

Corpus generate_corpus(const GenSpec& spec) {
    spec.validate();
    Corpus corpus;
    const std::uint64_t seed = spec.seed;

    // Cities, uniformly over the sphere. Every twentieth is an
    // administrative seat without population (retained by the seat rule).
    corpus.cities.reserve(spec.n_cities);
    for (std::uint32_t i = 0; i < spec.n_cities; ++i) {
        City city;
        city.geonames_id = 1000 + i;
        city.name = "Town " + std::to_string(i);
        city.country_code.push_back(static_cast<char>('A' + (i / 26) % 26));
        city.country_code.push_back(static_cast<char>('A' + i % 26));
        city.latitude =
            std::asin(uniform_range(rng::uniform(seed, kCityLat, i), -1.0, 1.0)) * 180.0 / kPi;
        city.longitude = uniform_range(rng::uniform(seed, kCityLon, i), -180.0, 180.0);
        if (i % 20 == 19) {
            city.population = std::nullopt;
        } else {
            const double u = rng::uniform(seed, kCityPop, i);
            city.population = static_cast<std::int64_t>(
                std::exp(uniform_range(u, std::log(501.0), std::log(5.0e6))));
        }
        corpus.cities.push_back(std::move(city));
    }

    // Wikidata candidates for three quarters of the cities; a tenth of those
    // sit outside the link radius on purpose.
    for (std::uint32_t i = 0; i < spec.n_cities; ++i) {
        const double u = rng::uniform(seed, kCityWikidata, i);
        if (u >= 0.75) continue;
        const City& city = corpus.cities[i];
        WikidataCandidate candidate;
        candidate.name = city.name;
        if (rng::value(seed, kCityWikidata, i + spec.n_cities) % 5 == 0) {
            // Case variant: the match is case-folded.
            for (char& c : candidate.name)
                if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
        }
        const double jitter_lat =
            uniform_range(rng::uniform(seed, kCityWikidataJitter, 2 * i), -0.02, 0.02);
        const double jitter_lon =
            uniform_range(rng::uniform(seed, kCityWikidataJitter, 2 * i + 1), -0.02, 0.02);
        const bool too_far = u < 0.075;  // 10% of candidates
        candidate.latitude =
            std::clamp(city.latitude + jitter_lat + (too_far ? 0.5 : 0.0), -90.0, 90.0);
        candidate.longitude = std::clamp(city.longitude + jitter_lon, -180.0, 180.0);
        candidate.qid = "Q" + std::to_string(5000 + i);
        corpus.wikidata.push_back(std::move(candidate));
    }

    // Venues, round-robin over cities so every city hosts several.
    std::vector<const char*> palette;
    for (const auto& category : kCategories)
        if (category.leaf) palette.push_back(category.id);
    std::vector<std::vector<std::uint32_t>> city_venues(spec.n_cities);
    corpus.venues.reserve(spec.n_venues);
    for (std::uint32_t j = 0; j < spec.n_venues; ++j) {
        const std::uint32_t city_idx = j % spec.n_cities;
        const City& city = corpus.cities[city_idx];
        Venue venue;
        char id[16];
        std::snprintf(id, sizeof(id), "v%06u", j);
        venue.id = id;
        venue.latitude = std::clamp(
            city.latitude + uniform_range(rng::uniform(seed, kVenueJitter, 2 * j), -0.02, 0.02),
            -90.0, 90.0);
        venue.longitude = std::clamp(
            city.longitude +
                uniform_range(rng::uniform(seed, kVenueJitter, 2 * j + 1), -0.02, 0.02),
            -180.0, 180.0);
        venue.category_id = palette[rng::value(seed, kVenueJitter, j) % palette.size()];
        city_venues[city_idx].push_back(j);
        corpus.venues.push_back(std::move(venue));
    }
    const auto venue_city = [&](std::uint32_t j) { return j % spec.n_cities; };

    for (const auto& category : kCategories) {
        corpus.taxonomy_rows.push_back(TaxonomyRecord{category.id, category.name,
                                                      category.parent});
        if (category.term[0] != '\0')
            corpus.mapping_rows.emplace_back(category.id, category.term);
    }

    const auto venue_distance = [&](std::uint32_t a, std::uint32_t b) {
        return haversine(corpus.venues[a].latitude, corpus.venues[a].longitude,
                         corpus.venues[b].latitude, corpus.venues[b].longitude,
                         spec.pipeline.earth_radius_meters);
    };

    // A venue other than `avoid`, by raw draw.
    const auto different_venue = [&](std::uint64_t draw, std::uint32_t avoid) {
        std::uint32_t idx = static_cast<std::uint32_t>(draw % (spec.n_venues - 1));
        if (idx >= avoid) ++idx;
        return idx;
    };

    struct UserState {
        std::vector<std::size_t> rows;  // indices into the flat check-in list
        std::int64_t instant = 0;
        std::uint32_t venue = 0;
        bool started = false;
    };
    std::vector<UserState> users(spec.n_users);

    struct PendingCheckin {
        CheckIn checkin;
        std::size_t generation_index;
        std::string label;  // anomaly filter or empty
    };
    std::vector<PendingCheckin> pending;
    pending.reserve(spec.n_checkins);

    for (std::uint32_t k = 0; k < spec.n_checkins; ++k) {
        const std::uint32_t user_idx =
            static_cast<std::uint32_t>(rng::value(seed, kCheckinUser, k) % spec.n_users);
        UserState& state = users[user_idx];

        std::string label;
        std::uint32_t venue_idx;
        std::int64_t gap = 0;

        if (!state.started) {
            state.started = true;
            state.instant =
                kEpoch2012 +
                static_cast<std::int64_t>(rng::value(seed, kUserStart, user_idx) %
                                          (200 * 86400));
            venue_idx =
                static_cast<std::uint32_t>(rng::value(seed, kCheckinVenue, k) % spec.n_venues);
        } else {
            const double anomaly = rng::uniform(seed, kCheckinAnomaly, k);
            const double gap_u = rng::uniform(seed, kCheckinGap, k);
            if (anomaly < spec.repeat_rate) {
                label = "repeat";
                venue_idx = state.venue;
                gap = static_cast<std::int64_t>(
                    uniform_range(gap_u, static_cast<double>(spec.continue_gap_min_seconds),
                                  static_cast<double>(spec.continue_gap_max_seconds)));
            } else if (anomaly < spec.repeat_rate + spec.sub_minute_rate) {
                label = "dwell";
                gap = static_cast<std::int64_t>(uniform_range(
                    gap_u, 0.0, static_cast<double>(spec.pipeline.min_dwell_seconds)));
                venue_idx = different_venue(rng::value(seed, kCheckinVenue, k), state.venue);
            } else if (anomaly <
                       spec.repeat_rate + spec.sub_minute_rate + spec.supersonic_rate) {
                label = "speed";
                gap = static_cast<std::int64_t>(uniform_range(gap_u, 300.0, 1800.0));
                // Farthest of a few probes; almost always a clear violation.
                venue_idx = different_venue(rng::value(seed, kVenueProbe, k * 8), state.venue);
                double best = venue_distance(state.venue, venue_idx);
                for (std::uint32_t p = 1; p < 8; ++p) {
                    const std::uint32_t probe = different_venue(
                        rng::value(seed, kVenueProbe, k * 8 + p), state.venue);
                    const double distance = venue_distance(state.venue, probe);
                    if (distance > best) {
                        best = distance;
                        venue_idx = probe;
                    }
                }
            } else {
                const bool split = rng::uniform(seed, kCheckinAnomaly, k + spec.n_checkins) <
                                   spec.split_probability;
                gap = split
                          ? spec.pipeline.gap_limit_seconds +
                                static_cast<std::int64_t>(uniform_range(
                                    gap_u, 0.0,
                                    static_cast<double>(spec.split_gap_max_seconds -
                                                        spec.pipeline.gap_limit_seconds)))
                          : static_cast<std::int64_t>(uniform_range(
                                gap_u, static_cast<double>(spec.continue_gap_min_seconds),
                                static_cast<double>(spec.continue_gap_max_seconds)));
                // Stay within half the speed limit for the drawn gap so clean
                // corpora never trip the speed filter by accident.
                const double reach =
                    0.5 * spec.pipeline.max_speed_mps * static_cast<double>(gap);
                bool found = false;
                double best = -1.0;
                std::uint32_t best_idx = 0;
                for (std::uint32_t p = 0; p < 8; ++p) {
                    const std::uint32_t probe = different_venue(
                        rng::value(seed, kVenueProbe, k * 8 + p), state.venue);
                    const double distance = venue_distance(state.venue, probe);
                    if (distance <= reach && distance > best) {
                        best = distance;
                        best_idx = probe;
                        found = true;
                    }
                }
                if (!found) {
                    // Same-city hop, or bump the gap when the city has no
                    // alternative venue.
                    const auto& neighbors = city_venues[venue_city(state.venue)];
                    std::uint32_t fallback = state.venue;
                    if (neighbors.size() > 1) {
                        std::uint32_t pick = static_cast<std::uint32_t>(
                            rng::value(seed, kCheckinVenue, k) % (neighbors.size() - 1));
                        std::size_t self = 0;
                        while (neighbors[self] != state.venue) ++self;
                        fallback = neighbors[pick >= self ? pick + 1 : pick];
                    } else {
                        fallback =
                            different_venue(rng::value(seed, kCheckinVenue, k), state.venue);
                        const double distance = venue_distance(state.venue, fallback);
                        const auto needed = static_cast<std::int64_t>(
                            distance / (0.5 * spec.pipeline.max_speed_mps)) + 1;
                        gap = std::max(gap, needed);
                    }
                    venue_idx = fallback;
                } else {
                    venue_idx = best_idx;
                }
            }
            state.instant += gap;
        }
        state.venue = venue_idx;

        CheckIn checkin;
        checkin.user_id = "u" + std::to_string(100000 + user_idx);
        checkin.venue_id = corpus.venues[venue_idx].id;
        checkin.timestamp.instant = state.instant;
        checkin.timestamp.offset_minutes =
            kOffsetPalette[rng::value(seed, kCheckinOffset, k) %
                           (sizeof(kOffsetPalette) / sizeof(kOffsetPalette[0]))];
        pending.push_back(PendingCheckin{std::move(checkin), k, std::move(label)});
    }

    std::stable_sort(pending.begin(), pending.end(),
                     [](const PendingCheckin& a, const PendingCheckin& b) {
                         return a.checkin.timestamp.instant < b.checkin.timestamp.instant;
                     });

    corpus.checkins.reserve(pending.size());
    for (std::size_t row = 0; row < pending.size(); ++row) {
        if (!pending[row].label.empty())
            corpus.anomalies.push_back(AnomalyLabel{row + 1, pending[row].label});
        corpus.checkins.push_back(std::move(pending[row].checkin));
    }

    corpus.ground_truth = reference_trails(corpus.checkins, corpus.venues, spec.pipeline);
    return corpus;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

}  // namespace

void write_corpus(const Corpus& corpus, const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);

    {
        auto out = open_out(directory / "checkins.tsv");
        for (const auto& checkin : corpus.checkins) {
            out << checkin.user_id << '\t' << checkin.venue_id << '\t'
                << format_timestamp(checkin.timestamp) << '\n';
        }
    }
    {
        auto out = open_out(directory / "venues.csv");
        for (const auto& venue : corpus.venues) {
            out << venue.id << ',' << format_coordinate(venue.latitude) << ','
                << format_coordinate(venue.longitude) << ',' << venue.category_id << '\n';
        }
    }
    {
        auto out = open_out(directory / "cities.tsv");
        const auto write_city = [&](const City& city, const char* feature_code,
                                    const std::string& population) {
            out << city.geonames_id << '\t' << city.name << '\t' << city.name << '\t' << '\t'
                << format_coordinate(city.latitude) << '\t'
                << format_coordinate(city.longitude) << '\t' << 'P' << '\t' << feature_code
                << '\t' << city.country_code << '\t' << '\t' << '\t' << '\t' << '\t' << '\t'
                << population << '\t' << '\t' << '\t' << "Etc/UTC" << '\t' << "2024-01-01"
                << '\n';
        };
        std::size_t filler_counter = 0;
        for (const auto& city : corpus.cities) {
            write_city(city, city.population ? "PPL" : "PPLA4",
                       city.population ? std::to_string(*city.population) : std::string());
            // Interleave hamlet rows the retention rule must drop.
            if (filler_counter % 10 == 0) {
                City hamlet;
                hamlet.geonames_id = 900000 + static_cast<std::int64_t>(filler_counter);
                hamlet.name = "Hamlet " + std::to_string(filler_counter);
                hamlet.country_code = city.country_code;
                hamlet.latitude = city.latitude;
                hamlet.longitude = city.longitude;
                write_city(hamlet, "PPL",
                           std::to_string(rng::value(0, kFiller, filler_counter) % 501));
            }
            ++filler_counter;
        }
    }
    {
        auto out = open_out(directory / "wikidata.csv");
        for (const auto& candidate : corpus.wikidata) {
            out << candidate.name << ',' << format_coordinate(candidate.latitude) << ','
                << format_coordinate(candidate.longitude) << ',' << candidate.qid << '\n';
        }
    }
    {
        auto out = open_out(directory / "mapping.csv");
        for (const auto& [category, term] : corpus.mapping_rows)
            out << category << ',' << term << '\n';
    }
    {
        auto out = open_out(directory / "taxonomy.csv");
        for (const auto& record : corpus.taxonomy_rows)
            out << record.id << ',' << record.name << ',' << record.parent_id << '\n';
    }
    {
        auto out = open_out(directory / "ground_truth.tsv");
        for (const auto& trail : corpus.ground_truth) {
            out << trail.trail_id << '\t';
            for (std::size_t i = 0; i < trail.venue_ids.size(); ++i) {
                if (i > 0) out << ',';
                out << trail.venue_ids[i];
            }
            out << '\n';
        }
    }
    {
        auto out = open_out(directory / "anomalies.tsv");
        for (const auto& anomaly : corpus.anomalies)
            out << anomaly.checkin_row << '\t' << anomaly.filter << '\n';
    }
}

}  // namespace trails
