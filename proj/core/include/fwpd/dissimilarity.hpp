#pragma once

#include "fwpd/dataset.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace fwpd {

// Euclidean distance over the features both instances observe; 0 when the
// common subspace is empty.
double observed_distance(const IncompleteDataset& ds, std::size_t i, std::size_t j);

// Largest observed distance over all unordered pairs.
double max_observed_distance(const IncompleteDataset& ds);

// Weighted penalty: fraction of total observation weight carried by features
// outside the common observed subspace of gi and gj.
double feature_weighted_penalty(const ObservationWeights& w, const FeatureSet& gi,
                                const FeatureSet& gj);

// Symmetric-difference variant used for absent (rather than unobserved)
// features: weight of features defined for exactly one of the two instances,
// normalized by the weight of the union of their definition sets.
double feature_weighted_penalty_absent(const ObservationWeights& nu, const FeatureSet& gi,
                                       const FeatureSet& gj);

// Frozen per-dataset quantities needed to evaluate the dissimilarity: the
// observation weights, the normalizer d_max, and the distance/penalty
// trade-off alpha (must lie strictly inside (0,1)).
struct DissimilarityContext {
    ObservationWeights weights;
    double d_max = 0.0;
    double alpha = 0.0;
};

DissimilarityContext build_context(const IncompleteDataset& ds, double alpha);

// delta(i,j) = (1-alpha) * d(i,j)/d_max + alpha * p(i,j). When every pairwise
// distance is zero (d_max == 0) the distance term is dropped.
double dissimilarity(const DissimilarityContext& ctx, const IncompleteDataset& ds, std::size_t i,
            std::size_t j);

// Variant for datasets whose gaps mean "feature does not exist" rather than
// "value unrecorded": same distance term, symmetric-difference penalty.
double dissimilarity_absent(const DissimilarityContext& ctx, const IncompleteDataset& ds, std::size_t i,
                   std::size_t j);

// Dense symmetric matrix. The diagonal holds self-dissimilarities, which are
// nonzero under FWPD for instances with unobserved features.
struct DissimilarityMatrix {
    std::size_t n = 0;
    std::vector<double> entries; // row-major n*n

    double at(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
    double& at(std::size_t i, std::size_t j) { return entries[i * n + j]; }
};

DissimilarityMatrix pairwise_matrix(const DissimilarityContext& ctx, const IncompleteDataset& ds);
DissimilarityMatrix pairwise_matrix_absent(const DissimilarityContext& ctx,
                                           const IncompleteDataset& ds);

// Plain observed distances (no penalty, no normalization); on fully
// observed data this is the Euclidean distance matrix.
DissimilarityMatrix observed_distance_matrix(const IncompleteDataset& ds);

// Square CSV with a header row of instance indices; 12 significant digits.
void write_matrix_csv(const DissimilarityMatrix& m, const std::string& path);
DissimilarityMatrix load_matrix_csv(const std::string& path);

// Smallest strictly positive value, over all ordered role assignments of
// distinct instance triples (i,j,k), of
//   p[(gi|gk)\gj] + p[(gi&gk)\gj] + p[gj\(gi|gk)] + p[S\(gi|gj|gk)].
// nullopt when no triple yields a positive value (e.g. fully observed data).
std::optional<double> min_positive_rho(const IncompleteDataset& ds);

// Checks delta(i,j) + delta(j,k) >= delta(k,i) - eps^2 over all triples.
struct TriangleReport {
    bool ok = true;
    double worst_violation = 0.0; // max over triples of delta(k,i) - delta(i,j) - delta(j,k)
    std::size_t i = 0, j = 0, k = 0;
};
TriangleReport check_relaxed_triangle(const DissimilarityMatrix& m, double eps);

} // namespace fwpd
