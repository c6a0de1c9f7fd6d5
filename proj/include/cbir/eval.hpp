#ifndef CBIR_EVAL_HPP
#define CBIR_EVAL_HPP

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "cbir/retrieval.hpp"

namespace cbir {

// ------------------------------------------------------------
// Scalar metrics
// ------------------------------------------------------------

// Fraction of queries whose true species appears among the top k.
inline double accuracy(const std::vector<RankedResult>& results,
                       const std::vector<std::string>& truths, std::size_t k) {
    if (results.empty())
        throw evaluation_error("accuracy: empty query set");
    if (results.size() != truths.size())
        throw evaluation_error("accuracy: one truth label required per query");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto species = top_k(results[i], k);
        if (std::find(species.begin(), species.end(), truths[i]) != species.end())
            ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(results.size());
}

// precision = r / retrieved, recall = r / relevant_in_db, r counting
// retrieved leaves of the true species.
inline std::pair<double, double> precision_recall(const std::vector<std::string>& retrieved,
                                                  const std::string& truth,
                                                  std::size_t relevant_in_db) {
    if (retrieved.empty())
        throw evaluation_error("precision_recall: nothing retrieved");
    if (relevant_in_db < 1)
        throw evaluation_error("precision_recall: no relevant images in database");
    const std::size_t r = static_cast<std::size_t>(
        std::count(retrieved.begin(), retrieved.end(), truth));
    return {static_cast<double>(r) / static_cast<double>(retrieved.size()),
            static_cast<double>(r) / static_cast<double>(relevant_in_db)};
}

// ------------------------------------------------------------
// Experiment protocol
// ------------------------------------------------------------

struct EvalRow {
    Measure measure = Measure::city_block;
    int refs_per_class = 0;
    double top1 = 0.0;
    double top3 = 0.0;
    double top5 = 0.0;
    double seconds = 0.0; // distance evaluation + ranking, single-threaded
};

struct RppPoint {
    int depth = 0;
    double recall = 0.0;
    double precision = 0.0;
};

struct EvalReport {
    std::vector<EvalRow> rows;
    std::map<Measure, std::vector<RppPoint>> rpp; // at the largest refs count
};

/**
 * Feature vectors of one dataset, split deterministically: per class the
 * lexicographically first `max_refs` images form the reference pool and the
 * remainder are held out as queries. Features are extracted once and shared
 * by every measure.
 */
struct SplitDataset {
    std::vector<std::string> class_names;
    std::vector<std::vector<FeatureVector>> ref_pool; // per class, max_refs entries
    std::vector<std::vector<FeatureVector>> queries;  // per class, >= 1 entry
};

inline SplitDataset load_split_dataset(const std::filesystem::path& dataset_dir,
                                       int max_refs, const ExtractionParams& params = {},
                                       std::ostream* log = nullptr) {
    if (max_refs < 1)
        throw evaluation_error("split: refs per class must be >= 1");
    if (!std::filesystem::is_directory(dataset_dir))
        throw evaluation_error("split: not a directory: " + dataset_dir.string());

    SplitDataset split;
    const auto species_dirs = detail::sorted_entries(dataset_dir, true);
    if (species_dirs.empty())
        throw evaluation_error("split: no species directories in " + dataset_dir.string());

    for (const auto& species_dir : species_dirs) {
        const std::string species = species_dir.filename().string();
        std::vector<FeatureVector> extracted;
        for (const auto& file : detail::sorted_entries(species_dir, false)) {
            try {
                FeatureVector fv = extract_features(read_pnm(file.string()), params);
                fv.species = species;
                fv.leaf_id = species + "/" + file.stem().string();
                extracted.push_back(std::move(fv));
                if (log)
                    *log << "extracted " << extracted.back().leaf_id << "\n";
            } catch (const error& e) {
                if (log)
                    *log << "warning: skipping " << file.string() << ": " << e.what() << "\n";
            }
        }
        if (extracted.size() < static_cast<std::size_t>(max_refs) + 1)
            throw evaluation_error("split: class '" + species + "' needs at least "
                                   + std::to_string(max_refs + 1) + " images, has "
                                   + std::to_string(extracted.size()));
        split.class_names.push_back(species);
        split.ref_pool.emplace_back(extracted.begin(), extracted.begin() + max_refs);
        split.queries.emplace_back(extracted.begin() + max_refs, extracted.end());
    }
    return split;
}

/**
 * Runs the full protocol: for each reference count, an index over the first
 * n pool images per class; for each measure, top-1/3/5 accuracy and the
 * wall time of the query batch. The recall-precision curve is taken at the
 * largest reference count, averaging both coordinates across queries at
 * each retrieval depth.
 */
inline EvalReport run_experiment(const std::filesystem::path& dataset_dir,
                                 const std::vector<Measure>& measures, Weights weights,
                                 std::vector<int> refs_per_class_list,
                                 const ExtractionParams& params = {},
                                 double epsilon = kDefaultEpsilon,
                                 std::ostream* log = nullptr) {
    if (measures.empty())
        throw evaluation_error("run_experiment: no measures selected");
    if (refs_per_class_list.empty())
        throw evaluation_error("run_experiment: no reference counts given");
    for (int n : refs_per_class_list)
        if (n < 1)
            throw evaluation_error("run_experiment: reference counts must be >= 1");

    const int max_refs = *std::max_element(refs_per_class_list.begin(),
                                           refs_per_class_list.end());
    const SplitDataset split = load_split_dataset(dataset_dir, max_refs, params, log);

    std::vector<FeatureVector> all_queries;
    std::vector<std::string> truths;
    for (std::size_t c = 0; c < split.queries.size(); ++c)
        for (const FeatureVector& q : split.queries[c]) {
            all_queries.push_back(q);
            truths.push_back(split.class_names[c]);
        }

    EvalReport report;
    for (int refs : refs_per_class_list) {
        std::vector<FeatureVector> records;
        for (const auto& pool : split.ref_pool)
            records.insert(records.end(), pool.begin(), pool.begin() + refs);
        const FeatureIndex index = make_index(std::move(records), weights, params);

        for (Measure measure : measures) {
            std::vector<RankedResult> results;
            results.reserve(all_queries.size());
            const auto t0 = std::chrono::steady_clock::now();
            for (const FeatureVector& q : all_queries)
                results.push_back(rank(q, index, measure, epsilon));
            const auto t1 = std::chrono::steady_clock::now();

            EvalRow row;
            row.measure = measure;
            row.refs_per_class = refs;
            row.top1 = accuracy(results, truths, 1);
            row.top3 = accuracy(results, truths, 3);
            row.top5 = accuracy(results, truths, 5);
            row.seconds = std::chrono::duration<double>(t1 - t0).count();
            report.rows.push_back(row);
            if (log)
                *log << "measure " << measure_name(measure) << " refs " << refs
                     << " top1 " << row.top1 << "\n";

            if (refs == max_refs) {
                const int depth_max = static_cast<int>(index.records.size());
                std::vector<double> precision_sum(depth_max, 0.0);
                std::vector<double> recall_sum(depth_max, 0.0);
                for (std::size_t qi = 0; qi < all_queries.size(); ++qi) {
                    const auto leaves = rank_leaves(all_queries[qi], index, measure, epsilon);
                    int relevant_seen = 0;
                    for (int d = 0; d < depth_max; ++d) {
                        if (leaves[d].species == truths[qi])
                            ++relevant_seen;
                        precision_sum[d] += static_cast<double>(relevant_seen) / (d + 1);
                        recall_sum[d] += static_cast<double>(relevant_seen) / refs;
                    }
                }
                std::vector<RppPoint> curve(depth_max);
                for (int d = 0; d < depth_max; ++d) {
                    curve[d].depth = d + 1;
                    curve[d].recall = recall_sum[d] / static_cast<double>(all_queries.size());
                    curve[d].precision = precision_sum[d] / static_cast<double>(all_queries.size());
                }
                report.rpp[measure] = std::move(curve);
            }
        }
    }
    return report;
}

// ------------------------------------------------------------
// CSV emission
// ------------------------------------------------------------

inline void write_report_csv(const EvalReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw input_error("write_report_csv: cannot open " + path.string());
    out << "measure,refs_per_class,top1,top3,top5,seconds\n";
    char buf[256];
    for (const EvalRow& row : report.rows) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%.6f,%.6f,%.6f,%.6f\n",
                      measure_name(row.measure).c_str(), row.refs_per_class,
                      row.top1, row.top3, row.top5, row.seconds);
        out << buf;
    }
}

inline void write_rpp_csv(const EvalReport& report, const std::filesystem::path& dir) {
    for (const auto& [measure, curve] : report.rpp) {
        const auto path = dir / ("rpp_" + measure_name(measure) + ".csv");
        std::ofstream out(path);
        if (!out)
            throw input_error("write_rpp_csv: cannot open " + path.string());
        out << "depth,recall,precision\n";
        char buf[128];
        for (const RppPoint& p : curve) {
            std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f\n", p.depth, p.recall, p.precision);
            out << buf;
        }
    }
}

} // namespace cbir

#endif // CBIR_EVAL_HPP
