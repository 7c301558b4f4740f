#pragma once

#include "fwpd/dataset.hpp"
#include "fwpd/dissimilarity.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fwpd {

// Cluster membership; assignment[i] is the 0-based cluster of instance i.
// File exports shift to 1-based ids.
struct Membership {
    std::vector<int> assignment;

    bool operator==(const Membership& other) const { return assignment == other.assignment; }
};

// Centroid over a subset of features: values[l] is meaningful iff gamma
// contains l. gamma only ever grows while an optimization is running.
struct Centroid {
    std::vector<double> values;
    FeatureSet gamma;
};

// A cluster's feature set grew during a centroid update.
struct FeasibilityEvent {
    int iteration = 0; // 1-based
    int cluster = 0;   // 0-based
    std::vector<std::size_t> added;
};

struct KMeansTrace {
    // Objective right after the centroid update of iteration t: f(U^t, Z^t).
    std::vector<double> objective_after_update;
    // Objective right after the argmin reassignment against Z^t, before any
    // empty-cluster repair. This is the value the monotonicity guarantee
    // covers.
    std::vector<double> objective_after_assign;
    // Objective of the iterate actually carried forward (equals
    // objective_after_assign unless an empty cluster was repaired).
    std::vector<double> objective_after_repair;
    std::vector<FeasibilityEvent> adjustments;
    std::vector<int> repair_iterations;
    // Digest of every membership iterate: entry 0 is the initializer, entry
    // t the membership produced by iteration t. Lets tests check that
    // iterates never repeat between feasibility adjustments.
    std::vector<std::uint64_t> membership_hashes;
    int iterations = 0;
    bool converged = false;
    // How often a centroid update raised the objective although no cluster's
    // feature set grew. Plain means need not minimize the penalized
    // objective exactly, so this is monitored rather than asserted.
    int update_increases = 0;
    // Centroids of the final iteration (carryover features still included);
    // the converged membership is the pointwise argmin against these.
    std::vector<Centroid> terminal_centroids;
};

struct KMeansResult {
    Membership membership;
    std::vector<Centroid> centroids; // member means over member unions only
    double objective = 0.0;          // evaluated with the final centroids
    KMeansTrace trace;
};

// Uniform assignment of instances to k clusters, redrawn (bounded) until all
// clusters are nonempty; falls back to round-robin if the draws keep failing.
Membership init_random(std::size_t n, std::size_t k, std::uint64_t seed);

// One centroid per cluster: per-feature means of the members observing the
// feature, over the union of member feature sets. When prev is given,
// features of prev's gamma that no current member observes keep their
// previous value (and stay in gamma), so gamma never shrinks.
std::vector<Centroid> update_centroids(const IncompleteDataset& ds, const Membership& U,
                                       std::size_t k, const std::vector<Centroid>* prev);

double point_to_centroid(const DissimilarityContext& ctx, const IncompleteDataset& ds,
                         std::size_t i, const Centroid& z);

// Pointwise argmin; ties resolved to the lowest cluster index.
Membership assign(const DissimilarityContext& ctx, const IncompleteDataset& ds,
                  const std::vector<Centroid>& Z);

double objective(const DissimilarityContext& ctx, const IncompleteDataset& ds,
                 const Membership& U, const std::vector<Centroid>& Z);

std::vector<FeasibilityEvent> detect_feasibility_adjustments(const std::vector<Centroid>& prev,
                                                             const std::vector<Centroid>& next,
                                                             int iteration);

KMeansResult kmeans_fwpd(const IncompleteDataset& ds, const DissimilarityContext& ctx,
                         std::size_t k, std::uint64_t seed, int max_iter = 1000);
KMeansResult kmeans_fwpd_with_init(const IncompleteDataset& ds, const DissimilarityContext& ctx,
                                   std::size_t k, const Membership& init, int max_iter = 1000);

// Standard Lloyd iteration (squared Euclidean, mean centroids) on fully
// observed row-major data, sharing the init/tie/repair semantics above.
struct LloydResult {
    Membership membership;
    std::vector<double> centroids; // k x m row-major
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
};
LloydResult lloyd(const std::vector<double>& data, std::size_t n, std::size_t m, std::size_t k,
                  const Membership& init, int max_iter = 1000);
LloydResult lloyd_seeded(const std::vector<double>& data, std::size_t n, std::size_t m,
                         std::size_t k, std::uint64_t seed, int max_iter = 1000);

// One 1-based label per line.
void write_labels_csv(const Membership& U, const std::string& path);
std::vector<int> load_labels_csv(const std::string& path);

// iteration,objective_update,objective_assign,objective_iterate,adjustments,repairs
void write_trace_csv(const KMeansTrace& trace, const std::string& path);

// cluster,feature,value rows restricted to each centroid's feature set.
void write_centroids_csv(const std::vector<Centroid>& centroids, const std::string& path);

} // namespace fwpd
