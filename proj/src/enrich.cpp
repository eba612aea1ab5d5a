#include "trails/enrich.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace trails {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

// Multiplicative slack when pruning in chord space. Chord and haversine
// distances are monotone images of the same angle; the slack absorbs their
// last-ulp disagreements so ranking by haversine never loses a candidate.
constexpr double kPruneSlack = 1.0 + 1e-12;
constexpr double kPruneFloor = 1e-30;

}  // namespace

double haversine(double lat1, double lon1, double lat2, double lon2,
                 double earth_radius_meters) {
    const double phi1 = lat1 * kDegToRad;
    const double phi2 = lat2 * kDegToRad;
    const double dphi = (lat2 - lat1) * kDegToRad;
    const double dlambda = (lon2 - lon1) * kDegToRad;
    const double sin_dphi = std::sin(dphi / 2.0);
    const double sin_dlambda = std::sin(dlambda / 2.0);
    const double a =
        sin_dphi * sin_dphi + std::cos(phi1) * std::cos(phi2) * sin_dlambda * sin_dlambda;
    // atan2 keeps precision near the antipode where asin(sqrt(a)) degrades.
    const double angle = 2.0 * std::atan2(std::sqrt(a), std::sqrt(std::max(0.0, 1.0 - a)));
    return earth_radius_meters * angle;
}

SpatialIndex SpatialIndex::build(std::vector<City> cities, double earth_radius_meters) {
    if (cities.empty()) throw std::invalid_argument("cannot index an empty gazetteer");
    SpatialIndex index;
    index.earth_radius_ = earth_radius_meters;
    index.cities_ = std::move(cities);
    index.points_.resize(index.cities_.size());
    for (std::size_t i = 0; i < index.cities_.size(); ++i) {
        const double phi = index.cities_[i].latitude * kDegToRad;
        const double lambda = index.cities_[i].longitude * kDegToRad;
        index.points_[i] = Point{std::cos(phi) * std::cos(lambda),
                                 std::cos(phi) * std::sin(lambda), std::sin(phi)};
    }
    index.build_range(0, index.cities_.size(), 0);
    return index;
}

void SpatialIndex::build_range(std::size_t lo, std::size_t hi, unsigned depth) {
    if (hi - lo <= 1) return;
    const unsigned axis = depth % 3;
    const std::size_t mid = lo + (hi - lo) / 2;

    const auto coordinate = [axis](const Point& p) {
        return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
    };
    // Indirect nth_element so cities_ and points_ stay parallel.
    std::vector<std::size_t> order(hi - lo);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = lo + i;
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(mid - lo),
                     order.end(), [&](std::size_t a, std::size_t b) {
                         const double ca = coordinate(points_[a]);
                         const double cb = coordinate(points_[b]);
                         if (ca != cb) return ca < cb;
                         return cities_[a].geonames_id < cities_[b].geonames_id;
                     });

    std::vector<City> reordered_cities;
    std::vector<Point> reordered_points;
    reordered_cities.reserve(order.size());
    reordered_points.reserve(order.size());
    for (const std::size_t idx : order) {
        reordered_cities.push_back(std::move(cities_[idx]));
        reordered_points.push_back(points_[idx]);
    }
    std::move(reordered_cities.begin(), reordered_cities.end(),
              cities_.begin() + static_cast<std::ptrdiff_t>(lo));
    std::copy(reordered_points.begin(), reordered_points.end(),
              points_.begin() + static_cast<std::ptrdiff_t>(lo));

    build_range(lo, mid, depth + 1);
    build_range(mid + 1, hi, depth + 1);
}

void SpatialIndex::search(std::size_t lo, std::size_t hi, unsigned depth, const Point& query,
                          double query_lat, double query_lon, double& best_chord2,
                          double& best_distance, std::size_t& best_index) const {
    if (lo >= hi) return;
    const std::size_t mid = lo + (hi - lo) / 2;
    const Point& p = points_[mid];

    const double dx = query.x - p.x;
    const double dy = query.y - p.y;
    const double dz = query.z - p.z;
    const double chord2 = dx * dx + dy * dy + dz * dz;
    if (chord2 <= best_chord2 * kPruneSlack + kPruneFloor) {
        const City& candidate = cities_[mid];
        const double distance = haversine(query_lat, query_lon, candidate.latitude,
                                          candidate.longitude, earth_radius_);
        const bool better =
            best_index == points_.size() || distance < best_distance ||
            (distance == best_distance &&
             candidate.geonames_id < cities_[best_index].geonames_id);
        if (better) {
            best_distance = distance;
            best_chord2 = chord2;
            best_index = mid;
        }
    }

    const unsigned axis = depth % 3;
    const double qc = axis == 0 ? query.x : (axis == 1 ? query.y : query.z);
    const double pc = axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
    const double plane = qc - pc;
    const bool left_first = plane < 0.0;

    if (left_first)
        search(lo, mid, depth + 1, query, query_lat, query_lon, best_chord2, best_distance,
               best_index);
    else
        search(mid + 1, hi, depth + 1, query, query_lat, query_lon, best_chord2, best_distance,
               best_index);

    if (plane * plane <= best_chord2 * kPruneSlack + kPruneFloor) {
        if (left_first)
            search(mid + 1, hi, depth + 1, query, query_lat, query_lon, best_chord2,
                   best_distance, best_index);
        else
            search(lo, mid, depth + 1, query, query_lat, query_lon, best_chord2, best_distance,
                   best_index);
    }
}

std::size_t SpatialIndex::nearest_index(double latitude, double longitude) const {
    const double phi = latitude * kDegToRad;
    const double lambda = longitude * kDegToRad;
    const Point query{std::cos(phi) * std::cos(lambda), std::cos(phi) * std::sin(lambda),
                      std::sin(phi)};
    double best_chord2 = std::numeric_limits<double>::infinity();
    double best_distance = std::numeric_limits<double>::infinity();
    std::size_t best_index = points_.size();
    search(0, points_.size(), 0, query, latitude, longitude, best_chord2, best_distance,
           best_index);
    return best_index;
}

const City& SpatialIndex::nearest(double latitude, double longitude) const {
    return cities_[nearest_index(latitude, longitude)];
}

Taxonomy::Taxonomy(const std::vector<TaxonomyRecord>& records) {
    for (const auto& record : records) {
        if (record.id.empty()) throw std::runtime_error("taxonomy record with empty id");
        if (!nodes_.emplace(record.id, Node{record.name, record.parent_id}).second)
            throw std::runtime_error("duplicate taxonomy id '" + record.id + "'");
    }
    for (const auto& [id, node] : nodes_) {
        if (!node.parent.empty() && nodes_.count(node.parent) == 0)
            throw std::runtime_error("taxonomy id '" + id + "' references unknown parent '" +
                                     node.parent + "'");
    }
    // Walking more steps than there are nodes means a parent loop.
    for (const auto& [id, node] : nodes_) {
        std::size_t steps = 0;
        const std::string* current = &node.parent;
        while (!current->empty()) {
            if (++steps > nodes_.size())
                throw std::runtime_error("taxonomy cycle through id '" + id + "'");
            current = &nodes_.at(*current).parent;
        }
    }
}

bool Taxonomy::contains(const std::string& id) const { return nodes_.count(id) != 0; }

const std::string* Taxonomy::parent_of(const std::string& id) const {
    const auto it = nodes_.find(id);
    if (it == nodes_.end() || it->second.parent.empty()) return nullptr;
    return &it->second.parent;
}

std::string map_category(const std::string& category_id, const CategoryMapping& mapping,
                         const Taxonomy& taxonomy, bool* unknown_category,
                         const std::string& default_term) {
    if (unknown_category) *unknown_category = false;
    const auto direct = mapping.find(category_id);
    if (direct != mapping.end()) return direct->second;
    if (!taxonomy.contains(category_id)) {
        if (unknown_category) *unknown_category = true;
        return default_term;
    }
    const std::string* ancestor = taxonomy.parent_of(category_id);
    while (ancestor) {
        const auto hit = mapping.find(*ancestor);
        if (hit != mapping.end()) return hit->second;
        ancestor = taxonomy.parent_of(*ancestor);
    }
    return default_term;
}

std::string normalize_name(std::string_view name) {
    std::string normalized(name);
    for (char& c : normalized)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return normalized;
}

WikidataCatalog::WikidataCatalog(std::vector<WikidataCandidate> candidates)
    : candidates_(std::move(candidates)) {
    for (std::size_t i = 0; i < candidates_.size(); ++i)
        by_name_[normalize_name(candidates_[i].name)].push_back(i);
}

std::optional<std::string> WikidataCatalog::link(const City& city, double link_radius_meters,
                                                 double earth_radius_meters) const {
    const auto it = by_name_.find(normalize_name(city.name));
    if (it == by_name_.end()) return std::nullopt;
    const WikidataCandidate* best = nullptr;
    double best_distance = 0.0;
    for (const std::size_t idx : it->second) {
        const WikidataCandidate& candidate = candidates_[idx];
        const double distance = haversine(city.latitude, city.longitude, candidate.latitude,
                                          candidate.longitude, earth_radius_meters);
        if (distance >= link_radius_meters) continue;
        if (!best || distance < best_distance ||
            (distance == best_distance && candidate.qid < best->qid)) {
            best = &candidate;
            best_distance = distance;
        }
    }
    if (!best) return std::nullopt;
    return best->qid;
}

std::optional<std::string> link_wikidata(const City& city, const WikidataCatalog& candidates,
                                         double link_radius_meters,
                                         double earth_radius_meters) {
    return candidates.link(city, link_radius_meters, earth_radius_meters);
}

std::vector<TrailDraft> enrich_trails(const std::vector<RawTrail>& trails,
                                      const VenueMap& venues, const SpatialIndex& index,
                                      const WikidataCatalog& wikidata,
                                      const CategoryMapping& mapping, const Taxonomy& taxonomy,
                                      const PipelineConfig& config, unsigned threads,
                                      EnrichStats* stats) {
    // Distinct venues, in first-use order so the work split is deterministic.
    std::unordered_map<std::string, std::size_t> venue_slot;
    std::vector<const Venue*> unique_venues;
    for (const auto& trail : trails) {
        for (const auto& checkin : trail.checkins) {
            const auto [it, inserted] =
                venue_slot.try_emplace(checkin.venue_id, unique_venues.size());
            if (!inserted) continue;
            const auto venue_it = venues.find(checkin.venue_id);
            if (venue_it == venues.end())
                throw std::runtime_error("venue '" + checkin.venue_id +
                                         "' missing from the venue table");
            unique_venues.push_back(&venue_it->second);
        }
    }

    std::vector<std::size_t> venue_city(unique_venues.size());
    const auto geocode_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            venue_city[i] =
                index.nearest_index(unique_venues[i]->latitude, unique_venues[i]->longitude);
    };
    if (threads <= 1 || unique_venues.size() < 256) {
        geocode_range(0, unique_venues.size());
    } else {
        const unsigned worker_count = threads;
        std::vector<std::thread> workers;
        const std::size_t chunk =
            (unique_venues.size() + worker_count - 1) / worker_count;
        for (unsigned w = 0; w < worker_count; ++w) {
            const std::size_t lo = std::min<std::size_t>(w * chunk, unique_venues.size());
            const std::size_t hi = std::min<std::size_t>(lo + chunk, unique_venues.size());
            if (lo < hi) workers.emplace_back(geocode_range, lo, hi);
        }
        for (auto& worker : workers) worker.join();
    }

    // Per-city entity links, resolved once per distinct city. A city that
    // already carries a Q-id (pre-linked gazetteer) keeps it.
    std::unordered_map<std::size_t, std::string> city_qid;
    for (const std::size_t city_idx : venue_city) {
        if (city_qid.count(city_idx) != 0) continue;
        const City& city = index.cities()[city_idx];
        std::string qid = city.wikidata_id;
        if (qid.empty())
            qid = link_wikidata(city, wikidata, config.link_radius_meters,
                                config.earth_radius_meters)
                      .value_or(std::string{});
        if (stats) {
            if (qid.empty())
                ++stats->unlinked_cities;
            else
                ++stats->linked_cities;
        }
        city_qid.emplace(city_idx, std::move(qid));
    }

    // Per-category terms.
    std::unordered_map<std::string, std::pair<std::string, bool>> category_term;
    for (const Venue* venue : unique_venues) {
        if (category_term.count(venue->category_id) != 0) continue;
        bool unknown = false;
        std::string term = map_category(venue->category_id, mapping, taxonomy, &unknown);
        category_term.emplace(venue->category_id, std::make_pair(std::move(term), unknown));
    }

    std::vector<TrailDraft> drafts;
    drafts.reserve(trails.size());
    for (const auto& trail : trails) {
        TrailDraft draft;
        draft.user_id = trail.user_id;
        draft.checkins.reserve(trail.checkins.size());
        for (const auto& checkin : trail.checkins) {
            const std::size_t slot = venue_slot.at(checkin.venue_id);
            const Venue& venue = *unique_venues[slot];
            const City& city = index.cities()[venue_city[slot]];
            const auto& [term, unknown] = category_term.at(venue.category_id);
            if (unknown && stats) ++stats->unknown_categories;

            EnrichedCheckIn enriched;
            enriched.venue_id = checkin.venue_id;
            enriched.category_id = venue.category_id;
            enriched.schema_term = term;
            enriched.city_geonames_id = city.geonames_id;
            enriched.city_name = city.name;
            enriched.country_code = city.country_code;
            enriched.wikidata_id = city_qid.at(venue_city[slot]);
            enriched.timestamp = checkin.timestamp;
            draft.checkins.push_back(std::move(enriched));
        }
        drafts.push_back(std::move(draft));
    }
    return drafts;
}

}  // namespace trails
