#pragma once

#include "fwpd/dataset.hpp"
#include "fwpd/evaluation.hpp"
#include "fwpd/hac.hpp"
#include "fwpd/missingness.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fwpd {

// A clustering pipeline in the comparison. Text forms:
//   kmeans_fwpd            penalized k-means on the masked data
//   hac_fwpd:<sl|al|cl>    HAC on the penalized dissimilarity matrix
//   <imp>+kmeans           impute then standard k-means
//   <imp>+hac:<sl|al|cl>   impute then HAC on Euclidean distances
//   pds+hac:<sl|al|cl>     HAC on partial-distance-scaled distances
// where <imp> is zi | mi | mi_class | knni[:k] | svdi[:fraction].
struct MethodSpec {
    enum class Algo { kmeans_fwpd, hac_fwpd, impute_kmeans, impute_hac, pds_hac };
    Algo algo = Algo::kmeans_fwpd;
    Linkage linkage = Linkage::average;
    std::string imputer;         // zi | mi | mi_class | knni | svdi
    std::size_t knn_k = 5;
    double eigen_fraction = 0.10;
    std::string name;            // canonical text form

    bool is_fwpd() const { return algo == Algo::kmeans_fwpd || algo == Algo::hac_fwpd; }
    bool uses_kmeans_reference() const {
        return algo == Algo::kmeans_fwpd || algo == Algo::impute_kmeans;
    }
};

MethodSpec parse_method(const std::string& text);

struct ExperimentConfig {
    std::string dataset_path;
    std::string missing_token = "?";
    bool has_labels = true;
    std::vector<MethodSpec> methods;
    double alpha = 0.25;
    std::size_t k = 0; // 0: use the number of label classes
    MissingnessSpec missingness;
    std::size_t runs = 1;
    std::uint64_t base_seed = 1;
    bool normalize = true;
    double significance = 0.05;
    std::string output_dir = ".";

    void validate() const;
};

// Flat "key = value" file, '#' comments. Recognized keys: dataset,
// missing_token, has_labels, methods, alpha, k, runs, seed, missingness,
// normalize, significance, output_dir.
ExperimentConfig load_config(const std::string& path);
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

struct MethodOutcome {
    std::string name;
    std::vector<double> nmi_scores, ari_scores; // one entry per run
    double nmi_mean = 0.0, nmi_sd = 0.0;
    double ari_mean = 0.0, ari_sd = 0.0;
};

struct MethodComparison {
    std::string name; // contender compared against the reference method
    ComparisonVerdict nmi_cmp, ari_cmp;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<MethodOutcome> methods;
    std::string reference; // first penalized method; empty if none configured
    std::vector<MethodComparison> wtl;
    std::vector<std::uint64_t> run_seeds;
    // Digest of the mask and the shared k-means init of each run; methods
    // within a run all consume inputs with this digest.
    std::vector<std::string> run_fingerprints;
};

// Protocol per run r: derive seed base_seed + r; mask the (optionally
// normalized) full data; hand every method the same mask and the same
// k-means initializer; score each result against the reference clustering
// of the fully observed data (standard k-means with the shared init for
// k-means pipelines, standard HAC with the matching linkage for HAC ones).
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// summary.csv, runs.csv, wtl.csv, seeds.csv and summary.md in out_dir;
// numbers are fixed to 4 decimals so identical configs emit identical bytes.
void write_report(const ExperimentReport& rep, const std::string& out_dir);

} // namespace fwpd
