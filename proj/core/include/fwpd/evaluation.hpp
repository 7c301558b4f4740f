#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fwpd {

// Joint counts of two labelings over the same instances; label values are
// mapped to dense ids in first-appearance order.
struct ContingencyTable {
    std::size_t r = 0, c = 0;
    std::vector<long long> counts; // r x c
    std::vector<long long> row_sums, col_sums;
    long long total = 0;

    long long at(std::size_t i, std::size_t j) const { return counts[i * c + j]; }
};

ContingencyTable contingency_table(const std::vector<int>& a, const std::vector<int>& b);

// Mutual information over sqrt of the entropy product, natural log.
// Conventions: both labelings constant -> 1; exactly one constant -> 0.
double nmi(const std::vector<int>& a, const std::vector<int>& b);

// Adjusted Rand index with the permutation-model expectation; when the
// adjusted denominator is zero the value is 1 (both labelings' pair
// structure already agrees maximally).
double ari(const std::vector<int>& a, const std::vector<int>& b);

// Two-sided rank-sum test with midranks for ties. Small samples are scored
// by full permutation enumeration; larger ones by the tie-corrected normal
// approximation (the crossover keeps enumeration under ~100k subsets).
struct RankSumResult {
    double statistic = 0.0; // rank sum of the first sample
    double p_value = 1.0;
    bool exact = false;     // which branch produced p_value
};
RankSumResult rank_sum_test(const std::vector<double>& a, const std::vector<double>& b);

// Win/tie/loss call for "a versus b on this score": a significant p-value
// turns the mean ordering into win or loss, anything else is a tie.
enum class Verdict { win, tie, loss };
struct ComparisonVerdict {
    double p_value = 1.0;
    double mean_a = 0.0, mean_b = 0.0;
    Verdict verdict = Verdict::tie;
};
ComparisonVerdict compare_scores(const std::vector<double>& a, const std::vector<double>& b,
                                 double level = 0.05);

std::string verdict_name(Verdict v);

} // namespace fwpd
