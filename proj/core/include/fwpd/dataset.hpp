#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fwpd {

// Set of feature indices, one byte per feature. Datasets at this scale have
// at most a few thousand features, so the flat representation keeps the set
// algebra trivial and branch-predictable.
class FeatureSet {
public:
    FeatureSet() = default;
    explicit FeatureSet(std::size_t universe) : bits_(universe, 0) {}

    std::size_t universe() const { return bits_.size(); }
    bool contains(std::size_t l) const { return bits_[l] != 0; }
    void insert(std::size_t l) { bits_[l] = 1; }
    void erase(std::size_t l) { bits_[l] = 0; }

    std::size_t count() const;
    bool empty() const { return count() == 0; }
    bool is_subset_of(const FeatureSet& other) const;
    bool operator==(const FeatureSet& other) const { return bits_ == other.bits_; }

    FeatureSet intersect(const FeatureSet& other) const;
    FeatureSet unite(const FeatureSet& other) const;
    FeatureSet difference(const FeatureSet& other) const; // this \ other
    FeatureSet complement() const;                        // universe \ this

    std::vector<std::size_t> elements() const;

private:
    std::vector<std::uint8_t> bits_;
};

// Data matrix with per-cell observedness. Unobserved cells hold quiet NaN so
// that any accidental use of a missing value is loud rather than silently
// wrong. Invariants (every row and every column observes at least one cell,
// mask/value agreement) are enforced by validate(), which all constructors
// and loaders call.
struct IncompleteDataset {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;        // row-major, rows*cols; NaN where unobserved
    std::vector<std::uint8_t> mask;    // 1 = observed
    std::vector<int> labels;           // dense ids starting at 0; empty if unlabeled
    std::vector<std::string> label_names;   // dense id -> original token
    std::vector<std::string> feature_names; // empty if the file had no header

    double value(std::size_t i, std::size_t l) const { return values[i * cols + l]; }
    bool observed(std::size_t i, std::size_t l) const { return mask[i * cols + l] != 0; }
    bool has_labels() const { return !labels.empty(); }
    bool fully_observed() const;

    FeatureSet feature_set(std::size_t i) const;
    std::vector<FeatureSet> feature_sets() const;

    void set_cell(std::size_t i, std::size_t l, double v);
    void clear_cell(std::size_t i, std::size_t l);

    // Throws validation_error naming the first offending row or column.
    void validate() const;
};

// Builds a dataset from row vectors; NaN entries are treated as unobserved.
IncompleteDataset dataset_from_rows(const std::vector<std::vector<double>>& rows_in,
                                    std::vector<int> labels = {});

// CSV loader. Cells equal to missing_token (or empty) are unobserved. If
// has_labels, the last column is a categorical label mapped to dense ids in
// first-appearance order. An optional header is recognized when every
// feature cell of the first row is non-numeric and not the missing token.
IncompleteDataset load_csv(const std::string& path, const std::string& missing_token,
                           bool has_labels);

// Inverse of load_csv: header if feature_names present, labels appended if
// present, unobserved cells written as missing_token. Values use enough
// digits to round-trip exactly.
void write_csv(const IncompleteDataset& ds, const std::string& path,
               const std::string& missing_token);

// Count of instances observing each feature. Guaranteed positive per the
// dataset invariants; total is the sum over all features.
struct ObservationWeights {
    std::vector<long long> w;
    long long total = 0;
};
ObservationWeights observation_weights(const IncompleteDataset& ds);

// Per-feature mean and standard deviation over observed entries only.
// Features whose observed values have zero spread get sd = 1 so that
// normalization degrades to centering.
struct FeatureStats {
    std::vector<double> mean;
    std::vector<double> sd;
};
FeatureStats observed_feature_stats(const IncompleteDataset& ds);

// Z-scores each feature over its observed entries; mask is unchanged.
IncompleteDataset normalize_zscore(const IncompleteDataset& ds);

} // namespace fwpd
