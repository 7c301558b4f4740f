#pragma once

#include "fwpd/dataset.hpp"
#include "fwpd/dissimilarity.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace fwpd {

// Fully observed matrix produced by an imputer.
struct CompletedDataset {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values; // row-major
    std::string provenance;     // which imputer, with parameters
    bool converged = true;      // iterative imputers may flag non-convergence

    double value(std::size_t i, std::size_t l) const { return values[i * cols + l]; }
    // The completed matrix as a dataset with a full mask (labels carried over).
    IncompleteDataset to_dataset(const IncompleteDataset& source) const;
};

CompletedDataset impute_zero(const IncompleteDataset& ds);

// Column means over observed entries. With class_balanced, a gap is filled
// by the unweighted mean of per-class observed means (classes that never
// observe the feature are skipped); requires labels.
CompletedDataset impute_mean(const IncompleteDataset& ds, bool class_balanced = false);

// For each gap, the mean of the feature over the k nearest neighbors by
// observed distance that observe it; neighbors that miss the feature are
// skipped in ranking order. Falls back to the column mean when no neighbor
// observes the feature. k >= n is clamped to n-1 with a warning on stderr.
CompletedDataset impute_knn(const IncompleteDataset& ds, std::size_t k);

// Iterative low-rank completion: initialize gaps with column means, then
// refit each row by least squares on the top right singular vectors
// restricted to its observed coordinates, until the filled cells move less
// than tol (max-abs) or max_rounds is hit (flagged via converged=false).
// Rank r = max(1, round(eigen_fraction * min(n, m))).
CompletedDataset impute_svd(const IncompleteDataset& ds, double eigen_fraction = 0.10,
                            int max_rounds = 100, double tol = 1e-6);

// Partial-distance scaling: sqrt((m/|common|) * sum over common squared
// diffs). Pairs with no common observed feature get a sentinel of twice the
// largest finite entry.
DissimilarityMatrix pds_matrix(const IncompleteDataset& ds);

} // namespace fwpd
