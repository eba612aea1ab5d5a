#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "trails/analytics.hpp"
#include "trails/emit.hpp"
#include "trails/enrich.hpp"
#include "trails/ingest.hpp"
#include "trails/model.hpp"
#include "trails/synthgen.hpp"
#include "trails/trailbuild.hpp"
#include "trails/validate.hpp"

namespace {

using json = nlohmann::json;
using trails::PipelineConfig;

constexpr int kExitOk = 0;
constexpr int kExitViolations = 1;
constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitIo = 4;

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    std::int64_t lap_ms() {
        const auto now = std::chrono::steady_clock::now();
        const auto elapsed =
            std::chrono::duration_cast<std::chrono::milliseconds>(now - start_).count();
        start_ = now;
        return elapsed;
    }

private:
    std::chrono::steady_clock::time_point start_;
};

std::string fnv1a64_hex(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
    std::uint64_t hash = 0xcbf29ce484222325ull;
    char buffer[1 << 16];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 0x100000001b3ull;
        }
        if (in.eof()) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
    return hex;
}

json file_entry(const std::filesystem::path& path) {
    json entry;
    entry["path"] = path.string();
    entry["bytes"] = static_cast<std::uint64_t>(std::filesystem::file_size(path));
    entry["fnv1a64"] = fnv1a64_hex(path);
    return entry;
}

bool parse_drop_policy(const std::string& text, trails::DropPolicy& out) {
    if (text == "earlier") {
        out = trails::DropPolicy::Earlier;
        return true;
    }
    if (text == "later") {
        out = trails::DropPolicy::Later;
        return true;
    }
    return false;
}

// Flat key=value file; '#' starts a comment.
void load_config_file(const std::filesystem::path& path, PipelineConfig& config) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file '" + path.string() + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        const std::string trimmed = line.substr(first, last - first + 1);
        const std::size_t eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key=value");
        const std::string key = trimmed.substr(0, eq);
        const std::string value = trimmed.substr(eq + 1);
        try {
            if (key == "gap_limit_seconds")
                config.gap_limit_seconds = std::stoll(value);
            else if (key == "min_dwell_seconds")
                config.min_dwell_seconds = std::stoll(value);
            else if (key == "max_speed_mps")
                config.max_speed_mps = std::stod(value);
            else if (key == "link_radius_meters")
                config.link_radius_meters = std::stod(value);
            else if (key == "big_city_population")
                config.big_city_population = std::stoll(value);
            else if (key == "earth_radius_meters")
                config.earth_radius_meters = std::stod(value);
            else if (key == "dwell_drop" || key == "speed_drop") {
                trails::DropPolicy policy;
                if (!parse_drop_policy(value, policy))
                    throw std::runtime_error("expected 'earlier' or 'later'");
                (key == "dwell_drop" ? config.dwell_drop : config.speed_drop) = policy;
            } else {
                throw std::runtime_error("unknown key '" + key + "'");
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("config line " + std::to_string(line_no) + ": " +
                                     e.what());
        }
    }
}

json config_json(const PipelineConfig& config) {
    json snapshot;
    snapshot["gap_limit_seconds"] = config.gap_limit_seconds;
    snapshot["min_dwell_seconds"] = config.min_dwell_seconds;
    snapshot["max_speed_mps"] = config.max_speed_mps;
    snapshot["link_radius_meters"] = config.link_radius_meters;
    snapshot["big_city_population"] = config.big_city_population;
    snapshot["earth_radius_meters"] = config.earth_radius_meters;
    snapshot["dwell_drop"] =
        config.dwell_drop == trails::DropPolicy::Earlier ? "earlier" : "later";
    snapshot["speed_drop"] =
        config.speed_drop == trails::DropPolicy::Earlier ? "earlier" : "later";
    return snapshot;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    return in;
}

void print_parse_problems(const char* input, const trails::ParseReport& report) {
    for (const auto& warning : report.warnings)
        std::cerr << input << ": warning: " << warning << "\n";
    std::size_t shown = 0;
    for (const auto& error : report.errors) {
        if (shown == 10) {
            std::cerr << input << ": ... and " << (report.errors.size() - shown)
                      << " more malformed rows\n";
            break;
        }
        std::cerr << input << ": line " << error.line_number << ": "
                  << trails::to_string(error.reason) << " (" << error.detail << ")\n";
        ++shown;
    }
}

struct BuildArgs {
    std::string checkins, venues, cities, mapping, taxonomy, wikidata, config_file;
    std::string out_csv, out_ttl, manifest_path;
    unsigned threads = 1;
    std::string delimiter = "tab";
    std::string venues_delimiter = "comma";
    bool header = false;
    int user_col = 0, venue_col = 1, timestamp_col = 2;
};

int run_build(const BuildArgs& args, const PipelineConfig& config) {
    Stopwatch watch;
    json manifest;
    manifest["config"] = config_json(config);

    // -- ingest ------------------------------------------------------------
    trails::CheckinFormat format;
    format.delimiter = args.delimiter == "comma" ? ',' : '\t';
    format.has_header = args.header;
    format.user_column = args.user_col;
    format.venue_column = args.venue_col;
    format.timestamp_column = args.timestamp_col;

    std::vector<trails::CheckIn> checkins;
    trails::ParseReport checkin_report;
    trails::VenueParseResult venue_result;
    trails::GazetteerParseResult gazetteer;
    trails::MappingParseResult mapping;
    trails::TaxonomyParseResult taxonomy_rows;
    trails::WikidataParseResult wikidata;
    try {
        {
            auto in = open_input(args.checkins);
            trails::parse_checkins_stream(
                in, format, [&](trails::CheckIn&& c) { checkins.push_back(std::move(c)); },
                checkin_report);
        }
        {
            auto in = open_input(args.venues);
            venue_result = trails::parse_venues(in, args.venues_delimiter == "tab" ? '\t' : ',');
        }
        {
            auto in = open_input(args.cities);
            gazetteer = trails::parse_gazetteer(in);
        }
        {
            auto in = open_input(args.mapping);
            mapping = trails::parse_mapping(in);
        }
        {
            auto in = open_input(args.taxonomy);
            taxonomy_rows = trails::parse_taxonomy(in);
        }
        if (!args.wikidata.empty()) {
            auto in = open_input(args.wikidata);
            wikidata = trails::parse_wikidata_cities(in);
        }
    } catch (const std::exception& e) {
        std::cerr << "build: ingest failed: " << e.what() << "\n";
        return kExitParse;
    }
    print_parse_problems("checkins", checkin_report);
    print_parse_problems("venues", venue_result.report);
    print_parse_problems("cities", gazetteer.report);
    print_parse_problems("mapping", mapping.report);
    print_parse_problems("taxonomy", taxonomy_rows.report);
    print_parse_problems("wikidata", wikidata.report);

    manifest["inputs"]["checkins"] = file_entry(args.checkins);
    manifest["inputs"]["venues"] = file_entry(args.venues);
    manifest["inputs"]["cities"] = file_entry(args.cities);
    manifest["inputs"]["mapping"] = file_entry(args.mapping);
    manifest["inputs"]["taxonomy"] = file_entry(args.taxonomy);
    if (!args.wikidata.empty()) manifest["inputs"]["wikidata"] = file_entry(args.wikidata);

    const std::uint64_t parsed_checkins = checkin_report.records;
    manifest["counts"]["parsed_checkins"] = parsed_checkins;
    manifest["counts"]["checkin_parse_errors"] = checkin_report.errors.size();
    manifest["counts"]["venues"] = venue_result.venues.size();
    manifest["counts"]["cities"] = gazetteer.cities.size();
    manifest["timings_ms"]["ingest"] = watch.lap_ms();

    // -- trailbuild ----------------------------------------------------------
    trails::BuildResult built;
    try {
        built = trails::build_trails(std::move(checkins), venue_result.venues, config,
                                     args.threads);
    } catch (const std::exception& e) {
        std::cerr << "build: trailbuild failed: " << e.what() << "\n";
        return kExitParse;
    }
    for (const auto& warning : built.warnings) std::cerr << "trailbuild: " << warning << "\n";
    manifest["counts"]["users"] = built.users;
    manifest["counts"]["removed_repeat"] = built.report.removed_repeat;
    manifest["counts"]["removed_dwell"] = built.report.removed_dwell;
    manifest["counts"]["removed_speed"] = built.report.removed_speed;
    manifest["counts"]["removed_missing_venue"] = built.report.removed_missing_venue;
    manifest["counts"]["removed_total"] = built.report.removed_total;
    manifest["counts"]["unsegmented"] = built.unsegmented;
    manifest["counts"]["trails"] = built.trails.size();
    manifest["timings_ms"]["trailbuild"] = watch.lap_ms();

    // -- enrich --------------------------------------------------------------
    std::vector<trails::Trail> sealed;
    try {
        const trails::Taxonomy taxonomy(taxonomy_rows.records);
        const trails::WikidataCatalog catalog(std::move(wikidata.candidates));
        const trails::SpatialIndex index =
            trails::SpatialIndex::build(std::move(gazetteer.cities), config.earth_radius_meters);
        trails::EnrichStats enrich_stats;
        auto drafts =
            trails::enrich_trails(built.trails, venue_result.venues, index, catalog,
                                  mapping.mapping, taxonomy, config, args.threads,
                                  &enrich_stats);
        manifest["counts"]["cities_linked"] = enrich_stats.linked_cities;
        manifest["counts"]["cities_unlinked"] = enrich_stats.unlinked_cities;
        manifest["counts"]["unknown_categories"] = enrich_stats.unknown_categories;
        manifest["timings_ms"]["enrich"] = watch.lap_ms();

        trails::anonymize(drafts);
        trails::truncate_trails(drafts);
        sealed = trails::seal_trails(std::move(drafts), config);
    } catch (const std::exception& e) {
        std::cerr << "build: enrich failed: " << e.what() << "\n";
        return kExitParse;
    }

    std::uint64_t emitted_checkins = 0;
    std::uint64_t emitted_users = 0;
    for (const auto& trail : sealed) {
        emitted_checkins += trail.size();
        emitted_users = std::max<std::uint64_t>(emitted_users,
                                                static_cast<std::uint64_t>(trail.user()));
    }
    manifest["counts"]["emitted_checkins"] = emitted_checkins;
    manifest["counts"]["emitted_users"] = emitted_users;

    // -- emit ----------------------------------------------------------------
    try {
        if (!args.out_csv.empty()) {
            std::ofstream out(args.out_csv, std::ios::binary);
            if (!out) throw std::runtime_error("cannot open '" + args.out_csv + "'");
            const std::uint64_t bytes = trails::write_csv(sealed, out);
            out.flush();
            if (!out) throw std::runtime_error("short write to '" + args.out_csv + "'");
            manifest["outputs"]["csv"]["path"] = args.out_csv;
            manifest["outputs"]["csv"]["bytes"] = bytes;
        }
        if (!args.out_ttl.empty()) {
            std::ofstream out(args.out_ttl, std::ios::binary);
            if (!out) throw std::runtime_error("cannot open '" + args.out_ttl + "'");
            const std::uint64_t bytes = trails::write_turtle(sealed, out);
            out.flush();
            if (!out) throw std::runtime_error("short write to '" + args.out_ttl + "'");
            manifest["outputs"]["turtle"]["path"] = args.out_ttl;
            manifest["outputs"]["turtle"]["bytes"] = bytes;
        }
    } catch (const std::exception& e) {
        std::cerr << "build: emit failed: " << e.what() << "\n";
        return kExitIo;
    }
    manifest["timings_ms"]["emit"] = watch.lap_ms();

    // parsed - removed - unsegmented = emitted; anything else is a bug.
    if (parsed_checkins != built.report.removed_total + built.unsegmented + emitted_checkins) {
        std::cerr << "build: stage counts do not reconcile\n";
        return kExitParse;
    }

    const std::string manifest_path =
        !args.manifest_path.empty()
            ? args.manifest_path
            : (!args.out_csv.empty() ? args.out_csv : args.out_ttl) + ".manifest.json";
    try {
        std::ofstream out(manifest_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open '" + manifest_path + "'");
        out << manifest.dump(2) << "\n";
        if (!out) throw std::runtime_error("short write to '" + manifest_path + "'");
    } catch (const std::exception& e) {
        std::cerr << "build: manifest failed: " << e.what() << "\n";
        return kExitIo;
    }

    std::cout << "build: " << parsed_checkins << " check-ins -> " << sealed.size()
              << " trails (" << emitted_checkins << " check-ins, " << emitted_users
              << " users); removed " << built.report.removed_total << ", unsegmented "
              << built.unsegmented << "\n";
    return kExitOk;
}

struct StatsArgs {
    std::string input, gazetteer, report_dir, config_file;
    std::size_t top_n = 5;
};

int run_stats(const StatsArgs& args, const PipelineConfig& config) {
    trails::StdParseResult parsed;
    trails::GazetteerParseResult gazetteer;
    try {
        auto in = open_input(args.input);
        parsed = trails::parse_std_csv(in);
        auto cities = open_input(args.gazetteer);
        gazetteer = trails::parse_gazetteer(cities);
    } catch (const std::exception& e) {
        std::cerr << "stats: " << e.what() << "\n";
        return kExitParse;
    }
    print_parse_problems("input", parsed.report);
    if (!parsed.report.errors.empty()) {
        std::cerr << "stats: input is not a well-formed dataset file\n";
        return kExitParse;
    }

    const auto trails_grouped = trails::group_by_trail(std::move(parsed.records));
    const auto populations = trails::population_map(gazetteer.cities);
    try {
        trails::write_reports(trails_grouped, populations, config, args.report_dir,
                              args.top_n);
    } catch (const std::exception& e) {
        std::cerr << "stats: " << e.what() << "\n";
        return kExitIo;
    }
    std::cout << "stats: " << trails_grouped.size() << " trails analyzed; reports in "
              << args.report_dir << "\n";
    return kExitOk;
}

struct GenArgs {
    std::string out_dir;
    trails::GenSpec spec;
};

int run_gen(const GenArgs& args) {
    trails::Corpus corpus;
    try {
        corpus = trails::generate_corpus(args.spec);
    } catch (const std::exception& e) {
        std::cerr << "gen: invalid spec: " << e.what() << "\n";
        return kExitUsage;
    }
    json manifest;
    try {
        trails::write_corpus(corpus, args.out_dir);
        manifest["spec"]["seed"] = args.spec.seed;
        manifest["spec"]["users"] = args.spec.n_users;
        manifest["spec"]["venues"] = args.spec.n_venues;
        manifest["spec"]["cities"] = args.spec.n_cities;
        manifest["spec"]["checkins"] = args.spec.n_checkins;
        manifest["spec"]["split_probability"] = args.spec.split_probability;
        manifest["spec"]["repeat_rate"] = args.spec.repeat_rate;
        manifest["spec"]["sub_minute_rate"] = args.spec.sub_minute_rate;
        manifest["spec"]["supersonic_rate"] = args.spec.supersonic_rate;
        for (const char* name : {"checkins.tsv", "venues.csv", "cities.tsv", "wikidata.csv",
                                 "mapping.csv", "taxonomy.csv", "ground_truth.tsv",
                                 "anomalies.tsv"}) {
            manifest["outputs"][name] =
                file_entry(std::filesystem::path(args.out_dir) / name);
        }
        std::ofstream out(std::filesystem::path(args.out_dir) / "manifest.json",
                          std::ios::binary);
        out << manifest.dump(2) << "\n";
        if (!out) throw std::runtime_error("cannot write manifest");
    } catch (const std::exception& e) {
        std::cerr << "gen: " << e.what() << "\n";
        return kExitIo;
    }
    std::cout << "gen: " << corpus.checkins.size() << " check-ins, "
              << corpus.ground_truth.size() << " ground-truth trails in " << args.out_dir
              << "\n";
    return kExitOk;
}

struct ValidateArgs {
    std::string input, venues, config_file;
};

int run_validate(const ValidateArgs& args, const PipelineConfig& config) {
    trails::StdParseResult parsed;
    trails::VenueParseResult venue_result;
    try {
        auto in = open_input(args.input);
        parsed = trails::parse_std_csv(in);
        if (!args.venues.empty()) {
            auto venues_in = open_input(args.venues);
            venue_result = trails::parse_venues(venues_in);
        }
    } catch (const std::exception& e) {
        std::cerr << "validate: " << e.what() << "\n";
        return kExitParse;
    }

    if (!parsed.report.errors.empty()) {
        print_parse_problems("input", parsed.report);
        std::cerr << "validate: input is not a well-formed dataset file\n";
        return kExitParse;
    }

    const auto violations = trails::validate_records(
        parsed.records, parsed.line_numbers, config,
        args.venues.empty() ? nullptr : &venue_result.venues);
    for (const auto& violation : violations)
        std::cout << "line " << violation.line << ": " << violation.what << "\n";
    std::cout << "validate: " << parsed.records.size() << " rows, " << violations.size()
              << " violation(s)\n";
    return violations.empty() ? kExitOk : kExitViolations;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"check-in trail dataset pipeline"};
    app.require_subcommand(1);

    BuildArgs build_args;
    PipelineConfig build_config;
    auto* build = app.add_subcommand("build", "run the full pipeline over raw inputs");
    build->add_option("--checkins", build_args.checkins, "check-in log")
        ->required()
        ->check(CLI::ExistingFile);
    build->add_option("--venues", build_args.venues, "venue table")
        ->required()
        ->check(CLI::ExistingFile);
    build->add_option("--cities", build_args.cities, "GeoNames cities dump")
        ->required()
        ->check(CLI::ExistingFile);
    build->add_option("--mapping", build_args.mapping, "category mapping CSV")
        ->required()
        ->check(CLI::ExistingFile);
    build->add_option("--taxonomy", build_args.taxonomy, "category taxonomy CSV")
        ->required()
        ->check(CLI::ExistingFile);
    build->add_option("--wikidata", build_args.wikidata, "Wikidata candidate CSV")
        ->check(CLI::ExistingFile);
    build->add_option("--config", build_args.config_file, "pipeline config file")
        ->check(CLI::ExistingFile);
    build->add_option("--out-csv", build_args.out_csv, "dataset CSV output");
    build->add_option("--out-ttl", build_args.out_ttl, "dataset Turtle output");
    build->add_option("--manifest", build_args.manifest_path, "manifest path");
    build->add_option("--threads", build_args.threads, "worker threads")
        ->check(CLI::Range(1u, 64u));
    build->add_option("--delimiter", build_args.delimiter, "check-in delimiter")
        ->check(CLI::IsMember({"tab", "comma"}));
    build->add_option("--venues-delimiter", build_args.venues_delimiter,
                      "venue table delimiter")
        ->check(CLI::IsMember({"tab", "comma"}));
    build->add_flag("--header", build_args.header, "check-in log has a header line");
    build->add_option("--user-col", build_args.user_col, "user column index");
    build->add_option("--venue-col", build_args.venue_col, "venue column index");
    build->add_option("--timestamp-col", build_args.timestamp_col, "timestamp column index");
    auto* b_gap = build->add_option("--gap-limit", build_config.gap_limit_seconds,
                                    "trail gap limit, seconds");
    auto* b_dwell = build->add_option("--min-dwell", build_config.min_dwell_seconds,
                                      "minimum dwell, seconds");
    auto* b_speed =
        build->add_option("--max-speed", build_config.max_speed_mps, "speed cap, m/s");
    auto* b_radius = build->add_option("--link-radius", build_config.link_radius_meters,
                                       "entity link radius, meters");
    auto* b_big = build->add_option("--big-city", build_config.big_city_population,
                                    "big-city population cutoff");

    StatsArgs stats_args;
    PipelineConfig stats_config;
    auto* stats = app.add_subcommand("stats", "descriptive statistics over a dataset file");
    stats->add_option("--input", stats_args.input, "dataset CSV")
        ->required()
        ->check(CLI::ExistingFile);
    stats->add_option("--gazetteer", stats_args.gazetteer, "GeoNames cities dump")
        ->required()
        ->check(CLI::ExistingFile);
    stats->add_option("--report-dir", stats_args.report_dir, "report directory")->required();
    stats->add_option("--config", stats_args.config_file, "pipeline config file")
        ->check(CLI::ExistingFile);
    stats->add_option("--top", stats_args.top_n, "rows per ranking");

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "deterministic synthetic corpus generator");
    gen->add_option("--out-dir", gen_args.out_dir, "output directory")->required();
    gen->add_option("--seed", gen_args.spec.seed, "seed");
    gen->add_option("--users", gen_args.spec.n_users, "users");
    gen->add_option("--venues", gen_args.spec.n_venues, "venues");
    gen->add_option("--cities", gen_args.spec.n_cities, "cities");
    gen->add_option("--checkins", gen_args.spec.n_checkins, "check-ins");
    gen->add_option("--split-prob", gen_args.spec.split_probability, "trail split probability");
    gen->add_option("--repeat-rate", gen_args.spec.repeat_rate, "repeat anomaly rate");
    gen->add_option("--sub-minute-rate", gen_args.spec.sub_minute_rate,
                    "sub-minute anomaly rate");
    gen->add_option("--supersonic-rate", gen_args.spec.supersonic_rate,
                    "supersonic anomaly rate");

    ValidateArgs validate_args;
    PipelineConfig validate_config;
    auto* validate = app.add_subcommand("validate", "check dataset invariants");
    validate->add_option("--input", validate_args.input, "dataset CSV")
        ->required()
        ->check(CLI::ExistingFile);
    validate->add_option("--venues", validate_args.venues, "venue table for speed checks")
        ->check(CLI::ExistingFile);
    validate->add_option("--config", validate_args.config_file, "pipeline config file")
        ->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (build->parsed()) {
            // Precedence: defaults < config file < explicit flags.
            PipelineConfig from_file;
            if (!build_args.config_file.empty()) load_config_file(build_args.config_file, from_file);
            if (b_gap->count() == 0) build_config.gap_limit_seconds = from_file.gap_limit_seconds;
            if (b_dwell->count() == 0) build_config.min_dwell_seconds = from_file.min_dwell_seconds;
            if (b_speed->count() == 0) build_config.max_speed_mps = from_file.max_speed_mps;
            if (b_radius->count() == 0)
                build_config.link_radius_meters = from_file.link_radius_meters;
            if (b_big->count() == 0)
                build_config.big_city_population = from_file.big_city_population;
            build_config.earth_radius_meters = from_file.earth_radius_meters;
            build_config.dwell_drop = from_file.dwell_drop;
            build_config.speed_drop = from_file.speed_drop;
            build_config.validate();
            if (build_args.out_csv.empty() && build_args.out_ttl.empty()) {
                std::cerr << "build: need --out-csv and/or --out-ttl\n";
                return kExitUsage;
            }
            return run_build(build_args, build_config);
        }
        if (stats->parsed()) {
            if (!stats_args.config_file.empty())
                load_config_file(stats_args.config_file, stats_config);
            stats_config.validate();
            return run_stats(stats_args, stats_config);
        }
        if (gen->parsed()) return run_gen(gen_args);
        if (validate->parsed()) {
            if (!validate_args.config_file.empty())
                load_config_file(validate_args.config_file, validate_config);
            validate_config.validate();
            return run_validate(validate_args, validate_config);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    return kExitUsage;
}
