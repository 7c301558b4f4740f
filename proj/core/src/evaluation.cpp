#include "fwpd/evaluation.hpp"
#include "fwpd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace fwpd {

ContingencyTable contingency_table(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw validation_error("labelings have different lengths");
    if (a.empty()) throw validation_error("labelings are empty");

    auto densify = [](const std::vector<int>& v) {
        std::unordered_map<int, int> ids;
        std::vector<int> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            auto it = ids.find(v[i]);
            if (it == ids.end()) it = ids.emplace(v[i], static_cast<int>(ids.size())).first;
            out[i] = it->second;
        }
        return std::pair(out, ids.size());
    };
    auto [da, nr] = densify(a);
    auto [db, nc] = densify(b);

    ContingencyTable t;
    t.r = nr;
    t.c = nc;
    t.counts.assign(nr * nc, 0);
    t.row_sums.assign(nr, 0);
    t.col_sums.assign(nc, 0);
    t.total = static_cast<long long>(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++t.counts[da[i] * nc + db[i]];
        ++t.row_sums[da[i]];
        ++t.col_sums[db[i]];
    }
    return t;
}

namespace {

double entropy(const std::vector<long long>& sums, long long total) {
    double h = 0.0;
    for (long long s : sums) {
        if (s == 0) continue;
        double p = static_cast<double>(s) / static_cast<double>(total);
        h -= p * std::log(p);
    }
    return h;
}

} // namespace

double nmi(const std::vector<int>& a, const std::vector<int>& b) {
    ContingencyTable t = contingency_table(a, b);
    double ha = entropy(t.row_sums, t.total);
    double hb = entropy(t.col_sums, t.total);
    if (ha == 0.0 && hb == 0.0) return 1.0; // two constant labelings agree trivially
    if (ha == 0.0 || hb == 0.0) return 0.0;

    double mi = 0.0;
    double n = static_cast<double>(t.total);
    for (std::size_t i = 0; i < t.r; ++i)
        for (std::size_t j = 0; j < t.c; ++j) {
            long long nij = t.at(i, j);
            if (nij == 0) continue;
            double pij = static_cast<double>(nij) / n;
            mi += pij * std::log(n * static_cast<double>(nij) /
                                 (static_cast<double>(t.row_sums[i]) *
                                  static_cast<double>(t.col_sums[j])));
        }
    mi = std::max(0.0, mi);
    return std::clamp(mi / std::sqrt(ha * hb), 0.0, 1.0);
}

double ari(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() < 2) throw validation_error("adjusted Rand index needs at least two instances");
    ContingencyTable t = contingency_table(a, b);
    auto choose2 = [](long long x) { return static_cast<double>(x) * (x - 1) / 2.0; };

    double index = 0.0;
    for (long long nij : t.counts) index += choose2(nij);
    double sum_a = 0.0, sum_b = 0.0;
    for (long long s : t.row_sums) sum_a += choose2(s);
    for (long long s : t.col_sums) sum_b += choose2(s);
    double expected = sum_a * sum_b / choose2(t.total);
    double maximum = 0.5 * (sum_a + sum_b);
    if (maximum == expected) return 1.0;
    return (index - expected) / (maximum - expected);
}

namespace {

std::vector<double> midranks(const std::vector<double>& pooled) {
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) rank[order[t]] = r;
        i = j + 1;
    }
    return rank;
}

double combinations(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        c *= static_cast<double>(n - k + i) / static_cast<double>(i);
        if (c > 1e18) return c;
    }
    return c;
}

} // namespace

RankSumResult rank_sum_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw validation_error("rank-sum test needs nonempty samples");
    const std::size_t na = a.size(), nb = b.size(), n = na + nb;

    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<double> rank = midranks(pooled);

    RankSumResult res;
    for (std::size_t i = 0; i < na; ++i) res.statistic += rank[i];
    const double mu = static_cast<double>(na) * static_cast<double>(n + 1) / 2.0;
    const double dev = std::abs(res.statistic - mu);

    if (combinations(n, na) <= 100000.0) {
        // Full enumeration of which pooled positions fall in the first
        // sample; two-sided p as the share of subsets at least as extreme.
        res.exact = true;
        std::vector<std::size_t> comb(na);
        std::iota(comb.begin(), comb.end(), std::size_t{0});
        long long total = 0, extreme = 0;
        while (true) {
            double w = 0.0;
            for (std::size_t idx : comb) w += rank[idx];
            ++total;
            if (std::abs(w - mu) >= dev - 1e-12) ++extreme;
            // next combination
            std::size_t i = na;
            while (i > 0) {
                --i;
                if (comb[i] != i + n - na) {
                    ++comb[i];
                    for (std::size_t j = i + 1; j < na; ++j) comb[j] = comb[j - 1] + 1;
                    break;
                }
                if (i == 0) { comb.clear(); break; }
            }
            if (comb.empty()) break;
        }
        res.p_value = static_cast<double>(extreme) / static_cast<double>(total);
        return res;
    }

    // Tie-corrected normal approximation.
    double tie_term = 0.0;
    std::vector<double> sorted(pooled);
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    double var = static_cast<double>(na) * static_cast<double>(nb) / 12.0 *
                 (static_cast<double>(n + 1) -
                  tie_term / (static_cast<double>(n) * static_cast<double>(n - 1)));
    if (var <= 0.0) {
        res.p_value = 1.0; // every pooled value identical
        return res;
    }
    double z = dev / std::sqrt(var);
    res.p_value = std::erfc(z / std::sqrt(2.0));
    return res;
}

ComparisonVerdict compare_scores(const std::vector<double>& a, const std::vector<double>& b,
                                 double level) {
    ComparisonVerdict v;
    v.mean_a = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
    v.mean_b = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(b.size());
    v.p_value = rank_sum_test(a, b).p_value;
    if (v.p_value < level && v.mean_a > v.mean_b) v.verdict = Verdict::win;
    else if (v.p_value < level && v.mean_a < v.mean_b) v.verdict = Verdict::loss;
    else v.verdict = Verdict::tie;
    return v;
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::win: return "win";
        case Verdict::tie: return "tie";
        case Verdict::loss: return "loss";
    }
    return "?";
}

} // namespace fwpd
