#ifndef CBIR_RETRIEVAL_HPP
#define CBIR_RETRIEVAL_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbir/distance.hpp"
#include "cbir/features.hpp"
#include "cbir/pnm.hpp"

namespace cbir {

inline constexpr const char* kIndexVersion = "1";

// Group weighting of the fused rank. Defaults are the paper-optimal
// coefficients; override per experiment.
struct Weights {
    double shape = 0.1612;
    double color = 0.4839;
    double texture = 0.1936;
    double vein = 0.1613;

    std::array<double, 4> to_array() const { return {shape, color, texture, vein}; }

    friend bool operator==(const Weights&, const Weights&) = default;
};

struct NormStats {
    std::array<double, kFeatureLength> min{};
    std::array<double, kFeatureLength> max{};
};

inline NormStats compute_norm_stats(const std::vector<FeatureVector>& records) {
    if (records.empty())
        throw build_error("norm stats: no records");
    NormStats stats;
    const auto first = records.front().flatten();
    stats.min = first;
    stats.max = first;
    for (const FeatureVector& rec : records) {
        const auto flat = rec.flatten();
        for (int i = 0; i < kFeatureLength; ++i) {
            stats.min[i] = std::min(stats.min[i], flat[i]);
            stats.max[i] = std::max(stats.max[i], flat[i]);
        }
    }
    return stats;
}

// Min-max normalization into [0, 1]; constant features map to 0 and query
// values beyond the reference range are clamped.
inline std::array<double, kFeatureLength> normalize(const FeatureVector& v,
                                                    const NormStats& stats) {
    std::array<double, kFeatureLength> out = v.flatten();
    for (int i = 0; i < kFeatureLength; ++i) {
        const double range = stats.max[i] - stats.min[i];
        out[i] = range > 0.0 ? std::clamp((out[i] - stats.min[i]) / range, 0.0, 1.0) : 0.0;
    }
    return out;
}

/**
 * Immutable collection of reference leaves plus the statistics and weights
 * a query needs. Normalized copies of the records are cached up front so
 * queries touch read-only state only.
 */
struct FeatureIndex {
    std::vector<FeatureVector> records;
    NormStats stats;
    Weights weights;
    ExtractionParams params;
    std::string version = kIndexVersion;
    std::uint64_t layout_hash = feature_layout_hash();

    std::vector<std::array<double, kFeatureLength>> normalized;

    void rebuild_normalized() {
        normalized.clear();
        normalized.reserve(records.size());
        for (const FeatureVector& rec : records)
            normalized.push_back(normalize(rec, stats));
    }

    void finalize() {
        stats = compute_norm_stats(records);
        rebuild_normalized();
    }
};

inline FeatureIndex make_index(std::vector<FeatureVector> records, Weights weights = {},
                               ExtractionParams params = {}) {
    FeatureIndex index;
    index.records = std::move(records);
    index.weights = weights;
    index.params = params;
    index.finalize();
    return index;
}

// ------------------------------------------------------------
// Ranking
// ------------------------------------------------------------

inline double fuse_score(const std::array<double, 4>& group_distances, const Weights& w) {
    return w.shape * group_distances[0] + w.color * group_distances[1]
         + w.texture * group_distances[2] + w.vein * group_distances[3];
}

struct LeafScore {
    std::string leaf_id;
    std::string species;
    double score = 0.0;
    std::array<double, 4> group_distances{};
};

struct RankEntry {
    std::string species;
    double score = 0.0;
    std::string best_leaf_id;
    std::array<double, 4> group_distances{}; // of the best leaf
};

struct RankedResult {
    std::vector<RankEntry> entries; // ascending score
};

namespace detail {

inline std::array<double, 4> group_distances(Measure measure,
                                             const std::array<double, kFeatureLength>& q,
                                             const std::array<double, kFeatureLength>& r,
                                             double epsilon) {
    std::array<double, 4> d{};
    for (std::size_t g = 0; g < kFeatureGroups.size(); ++g) {
        const auto span = kFeatureGroups[g];
        d[g] = distance(measure,
                        std::span<const double>(q.data() + span.offset, span.length),
                        std::span<const double>(r.data() + span.offset, span.length),
                        epsilon);
    }
    return d;
}

} // namespace detail

/**
 * Scores every reference leaf against the query: the measure applied per
 * feature group on normalized vectors, fused by the index weights. Sorted
 * ascending with ties broken by leaf id.
 */
inline std::vector<LeafScore> rank_leaves(const FeatureVector& query,
                                          const FeatureIndex& index, Measure measure,
                                          double epsilon = kDefaultEpsilon) {
    if (index.records.empty())
        throw input_error("rank: empty index");
    const auto q = normalize(query, index.stats);

    std::vector<LeafScore> scores;
    scores.reserve(index.records.size());
    for (std::size_t i = 0; i < index.records.size(); ++i) {
        LeafScore ls;
        ls.leaf_id = index.records[i].leaf_id;
        ls.species = index.records[i].species;
        ls.group_distances = detail::group_distances(measure, q, index.normalized[i], epsilon);
        ls.score = fuse_score(ls.group_distances, index.weights);
        scores.push_back(std::move(ls));
    }
    std::sort(scores.begin(), scores.end(), [](const LeafScore& a, const LeafScore& b) {
        if (a.score != b.score)
            return a.score < b.score;
        return a.leaf_id < b.leaf_id;
    });
    return scores;
}

// Species score = minimum fused score over that species' leaves.
inline RankedResult rank(const FeatureVector& query, const FeatureIndex& index,
                         Measure measure, double epsilon = kDefaultEpsilon) {
    const auto leaves = rank_leaves(query, index, measure, epsilon);

    std::map<std::string, const LeafScore*> best;
    for (const LeafScore& ls : leaves) {
        auto [it, inserted] = best.try_emplace(ls.species, &ls);
        // leaves are sorted, so the first hit per species is its minimum
        (void)it;
        (void)inserted;
    }

    RankedResult result;
    result.entries.reserve(best.size());
    for (const auto& [species, ls] : best) {
        RankEntry e;
        e.species = species;
        e.score = ls->score;
        e.best_leaf_id = ls->leaf_id;
        e.group_distances = ls->group_distances;
        result.entries.push_back(std::move(e));
    }
    std::sort(result.entries.begin(), result.entries.end(),
              [](const RankEntry& a, const RankEntry& b) {
                  if (a.score != b.score)
                      return a.score < b.score;
                  if (a.best_leaf_id != b.best_leaf_id)
                      return a.best_leaf_id < b.best_leaf_id;
                  return a.species < b.species;
              });
    return result;
}

inline std::vector<std::string> top_k(const RankedResult& result, std::size_t k) {
    if (k < 1)
        throw input_error("top_k: k must be >= 1");
    std::vector<std::string> species;
    for (const RankEntry& e : result.entries) {
        if (species.size() >= k)
            break;
        species.push_back(e.species);
    }
    return species;
}

// ------------------------------------------------------------
// Index construction from a dataset directory
// ------------------------------------------------------------

namespace detail {

inline bool is_raster_file(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".ppm" || ext == ".pgm" || ext == ".pnm";
}

inline std::vector<std::filesystem::path> sorted_entries(const std::filesystem::path& dir,
                                                         bool dirs_only) {
    std::vector<std::filesystem::path> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (dirs_only ? entry.is_directory()
                      : (entry.is_regular_file() && is_raster_file(entry.path())))
            out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace detail

/**
 * Builds an index from `<root>/<species>/<image files>`. Unreadable or
 * unsegmentable images are reported to `log` and skipped; a species with no
 * valid image aborts the build. Deterministic: directories and files are
 * visited in lexicographic order.
 */
inline FeatureIndex build_index(const std::filesystem::path& dataset_dir,
                                ExtractionParams params = {}, Weights weights = {},
                                std::ostream* log = nullptr) {
    if (!std::filesystem::is_directory(dataset_dir))
        throw build_error("build_index: not a directory: " + dataset_dir.string());

    std::vector<FeatureVector> records;
    const auto species_dirs = detail::sorted_entries(dataset_dir, true);
    if (species_dirs.empty())
        throw build_error("build_index: no species directories in " + dataset_dir.string());

    for (const auto& species_dir : species_dirs) {
        const std::string species = species_dir.filename().string();
        std::size_t valid = 0;
        for (const auto& file : detail::sorted_entries(species_dir, false)) {
            try {
                FeatureVector fv = extract_features(read_pnm(file.string()), params);
                fv.species = species;
                fv.leaf_id = species + "/" + file.stem().string();
                records.push_back(std::move(fv));
                ++valid;
                if (log)
                    *log << "indexed " << records.back().leaf_id << "\n";
            } catch (const error& e) {
                if (log)
                    *log << "warning: skipping " << file.string() << ": " << e.what() << "\n";
            }
        }
        if (valid == 0)
            throw build_error("build_index: species has no valid images: " + species);
    }
    return make_index(std::move(records), weights, params);
}

// ------------------------------------------------------------
// Persistence: one JSON header line, one JSON line per reference leaf
// ------------------------------------------------------------

namespace detail {

inline nlohmann::json params_to_json(const ExtractionParams& p) {
    return {{"gray_levels", p.gray_levels}, {"radial_bins", p.radial_bins},
            {"angular_bins", p.angular_bins}, {"gfd_m", p.gfd_m},
            {"gfd_n", p.gfd_n}, {"idm_literal", p.idm_literal},
            {"vein_margin", p.vein_margin}};
}

inline ExtractionParams params_from_json(const nlohmann::json& j) {
    ExtractionParams p;
    p.gray_levels = j.at("gray_levels").get<int>();
    p.radial_bins = j.at("radial_bins").get<int>();
    p.angular_bins = j.at("angular_bins").get<int>();
    p.gfd_m = j.at("gfd_m").get<int>();
    p.gfd_n = j.at("gfd_n").get<int>();
    p.idm_literal = j.at("idm_literal").get<bool>();
    p.vein_margin = j.at("vein_margin").get<int>();
    return p;
}

} // namespace detail

inline void save_index(const FeatureIndex& index, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw input_error("save_index: cannot open " + path);

    nlohmann::json header = {
        {"version", index.version},
        {"layout_hash", index.layout_hash},
        {"params", detail::params_to_json(index.params)},
        {"weights", {{"shape", index.weights.shape}, {"color", index.weights.color},
                     {"texture", index.weights.texture}, {"vein", index.weights.vein}}},
        {"norm_stats", {{"min", index.stats.min}, {"max", index.stats.max}}},
    };
    out << header.dump() << "\n";

    for (const FeatureVector& rec : index.records) {
        nlohmann::json line = {
            {"leaf_id", rec.leaf_id}, {"species", rec.species},
            {"shape", rec.shape}, {"color", rec.color},
            {"texture", rec.texture}, {"vein", rec.vein},
        };
        out << line.dump() << "\n";
    }
    if (!out)
        throw input_error("save_index: write failed for " + path);
}

inline FeatureIndex load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw input_error("load_index: cannot open " + path);

    std::string line;
    if (!std::getline(in, line))
        throw input_error("load_index: empty file " + path);

    FeatureIndex index;
    try {
        const nlohmann::json header = nlohmann::json::parse(line);
        index.version = header.at("version").get<std::string>();
        index.layout_hash = header.at("layout_hash").get<std::uint64_t>();
        index.params = detail::params_from_json(header.at("params"));
        index.weights.shape = header.at("weights").at("shape").get<double>();
        index.weights.color = header.at("weights").at("color").get<double>();
        index.weights.texture = header.at("weights").at("texture").get<double>();
        index.weights.vein = header.at("weights").at("vein").get<double>();
        index.stats.min = header.at("norm_stats").at("min").get<std::array<double, kFeatureLength>>();
        index.stats.max = header.at("norm_stats").at("max").get<std::array<double, kFeatureLength>>();

        if (index.version != kIndexVersion)
            throw input_error("load_index: unsupported version " + index.version);
        if (index.layout_hash != feature_layout_hash())
            throw input_error("load_index: feature layout mismatch");

        while (std::getline(in, line)) {
            if (line.empty())
                continue;
            const nlohmann::json j = nlohmann::json::parse(line);
            FeatureVector rec;
            rec.leaf_id = j.at("leaf_id").get<std::string>();
            rec.species = j.at("species").get<std::string>();
            rec.shape = j.at("shape").get<std::array<double, kShapeLength>>();
            rec.color = j.at("color").get<std::array<double, kColorLength>>();
            rec.texture = j.at("texture").get<std::array<double, kTextureLength>>();
            rec.vein = j.at("vein").get<std::array<double, kVeinLength>>();
            index.records.push_back(std::move(rec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("load_index: malformed index: ") + e.what());
    }
    if (index.records.empty())
        throw input_error("load_index: index has no records");
    index.rebuild_normalized();
    return index;
}

} // namespace cbir

#endif // CBIR_RETRIEVAL_HPP
