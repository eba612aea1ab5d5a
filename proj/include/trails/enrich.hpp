#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trails/model.hpp"
#include "trails/trailbuild.hpp"

namespace trails {

// Great-circle distance in meters between two points given in degrees.
double haversine(double lat1, double lon1, double lat2, double lon2,
                 double earth_radius_meters);

// Nearest-city index over gazetteer coordinates. Immutable after build and
// safe to share across threads. Queries return exactly the city a linear scan
// minimizing haversine distance would pick, ties broken by smallest
// geonames_id; the k-d traversal prunes conservatively and ranks surviving
// candidates with the same haversine call the oracle uses.
class SpatialIndex {
public:
    static SpatialIndex build(std::vector<City> cities,
                              double earth_radius_meters = 6371000.0);

    const City& nearest(double latitude, double longitude) const;
    std::size_t nearest_index(double latitude, double longitude) const;

    const std::vector<City>& cities() const { return cities_; }
    std::size_t size() const { return cities_.size(); }
    double earth_radius() const { return earth_radius_; }

private:
    SpatialIndex() = default;

    struct Point {
        double x, y, z;
    };

    void build_range(std::size_t lo, std::size_t hi, unsigned depth);
    void search(std::size_t lo, std::size_t hi, unsigned depth, const Point& query,
                double query_lat, double query_lon, double& best_chord2,
                double& best_distance, std::size_t& best_index) const;

    std::vector<City> cities_;   // reordered into tree layout
    std::vector<Point> points_;  // unit vectors, parallel to cities_
    double earth_radius_ = 6371000.0;
};

// Venue category taxonomy: a rooted forest keyed by category id.
// Construction rejects duplicate ids, dangling parents and cycles.
class Taxonomy {
public:
    Taxonomy() = default;
    explicit Taxonomy(const std::vector<TaxonomyRecord>& records);

    bool contains(const std::string& id) const;
    // nullptr for roots and unknown ids.
    const std::string* parent_of(const std::string& id) const;
    std::size_t size() const { return nodes_.size(); }

private:
    struct Node {
        std::string name;
        std::string parent;  // empty for roots
    };
    std::unordered_map<std::string, Node> nodes_;
};

// Mapped term for a category: the category's own mapping if present,
// otherwise the nearest mapped ancestor, otherwise the default term.
// A category id missing from the taxonomy also yields the default term and
// sets *unknown_category.
std::string map_category(const std::string& category_id, const CategoryMapping& mapping,
                         const Taxonomy& taxonomy, bool* unknown_category = nullptr,
                         const std::string& default_term = "schema:Place");

// ASCII case-folded copy used for entity-name comparison. Inputs are expected
// to be NFC-normalized UTF-8 (GeoNames and Wikidata exports are); non-ASCII
// bytes pass through untouched.
std::string normalize_name(std::string_view name);

// Name-indexed Wikidata candidate table.
class WikidataCatalog {
public:
    WikidataCatalog() = default;
    explicit WikidataCatalog(std::vector<WikidataCandidate> candidates);

    std::size_t size() const { return candidates_.size(); }

    // Q-id of the nearest candidate whose normalized name equals the city's
    // and whose distance is strictly under link_radius; ties by lexicographic
    // Q-id; nullopt when no candidate qualifies.
    std::optional<std::string> link(const City& city, double link_radius_meters,
                                    double earth_radius_meters) const;

private:
    std::vector<WikidataCandidate> candidates_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_name_;
};

std::optional<std::string> link_wikidata(const City& city, const WikidataCatalog& candidates,
                                         double link_radius_meters,
                                         double earth_radius_meters);

// Enriched trail awaiting id assignment and privacy truncation.
struct TrailDraft {
    std::string user_id;  // original identifier, replaced at emission
    std::vector<EnrichedCheckIn> checkins;
};

struct EnrichStats {
    std::uint64_t unknown_categories = 0;  // check-ins whose category is not in the taxonomy
    std::uint64_t linked_cities = 0;       // distinct cities that gained a Q-id
    std::uint64_t unlinked_cities = 0;
};

// Resolves every check-in to its nearest city, the city's Wikidata entity and
// the venue's vocabulary term. Trail structure, order and timestamps are
// untouched. Throws std::runtime_error on a venue id missing from the table
// (upstream filtering guarantees resolvability).
std::vector<TrailDraft> enrich_trails(const std::vector<RawTrail>& trails,
                                      const VenueMap& venues, const SpatialIndex& index,
                                      const WikidataCatalog& wikidata,
                                      const CategoryMapping& mapping, const Taxonomy& taxonomy,
                                      const PipelineConfig& config, unsigned threads = 1,
                                      EnrichStats* stats = nullptr);

}  // namespace trails
