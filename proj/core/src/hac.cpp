#include "fwpd/hac.hpp"
#include "fwpd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>

namespace fwpd {

Linkage parse_linkage(const std::string& name) {
    if (name == "sl") return Linkage::single;
    if (name == "al") return Linkage::average;
    if (name == "cl") return Linkage::complete;
    throw validation_error("unknown linkage '" + name + "' (expected sl, al or cl)");
}

std::string linkage_name(Linkage k) {
    switch (k) {
        case Linkage::single: return "sl";
        case Linkage::average: return "al";
        case Linkage::complete: return "cl";
    }
    return "?";
}

double linkage_value(const DissimilarityMatrix& m, const std::vector<std::size_t>& a,
                     const std::vector<std::size_t>& b, Linkage kind) {
    if (a.empty() || b.empty()) throw validation_error("linkage of an empty group");
    for (std::size_t x : a)
        for (std::size_t y : b)
            if (x == y) throw validation_error("linkage groups overlap");
    double mn = std::numeric_limits<double>::infinity();
    double mx = -mn;
    double sum = 0.0;
    for (std::size_t x : a)
        for (std::size_t y : b) {
            double v = m.at(x, y);
            mn = std::min(mn, v);
            mx = std::max(mx, v);
            sum += v;
        }
    switch (kind) {
        case Linkage::single: return mn;
        case Linkage::complete: return mx;
        case Linkage::average: return sum / (static_cast<double>(a.size()) * b.size());
    }
    return 0.0;
}

namespace {

void validate_matrix(const DissimilarityMatrix& m) {
    if (m.n < 2) throw validation_error("need at least two instances to cluster");
    if (m.entries.size() != m.n * m.n) throw validation_error("matrix storage mismatch");
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = i + 1; j < m.n; ++j)
            if (m.at(i, j) != m.at(j, i))
                throw validation_error("dissimilarity matrix is not symmetric at (" +
                                       std::to_string(i) + "," + std::to_string(j) + ")");
}

} // namespace

Dendrogram hac(const DissimilarityMatrix& m, Linkage kind) {
    validate_matrix(m);
    const std::size_t n = m.n;

    // Working state per active slot; a merged pair collapses into the slot
    // with the smaller index, so a slot id is also the smallest original
    // leaf in its cluster — exactly the tie-break key.
    std::vector<bool> active(n, true);
    std::vector<int> node_id(n);
    std::vector<std::size_t> size(n, 1);
    // For average linkage we track cross-cluster SUMS, which update exactly
    // under merges; the linkage is sum / (|A|*|B|).
    std::vector<double> work(m.entries);

    auto link = [&](std::size_t a, std::size_t b) {
        double v = work[a * n + b];
        if (kind == Linkage::average) v /= static_cast<double>(size[a] * size[b]);
        return v;
    };

    for (std::size_t i = 0; i < n; ++i) node_id[i] = static_cast<int>(i);

    Dendrogram dend;
    dend.leaves = n;
    dend.merges.reserve(n - 1);

    for (std::size_t step = 0; step + 1 < n; ++step) {
        std::size_t best_a = n, best_b = n;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < n; ++a) {
            if (!active[a]) continue;
            for (std::size_t b = a + 1; b < n; ++b) {
                if (!active[b]) continue;
                double v = link(a, b);
                if (v < best) { best = v; best_a = a; best_b = b; }
            }
        }

        Merge mg;
        mg.left = node_id[best_a];
        mg.right = node_id[best_b];
        mg.height = best;
        mg.size = static_cast<int>(size[best_a] + size[best_b]);
        dend.merges.push_back(mg);

        for (std::size_t c = 0; c < n; ++c) {
            if (!active[c] || c == best_a || c == best_b) continue;
            double va = work[best_a * n + c];
            double vb = work[best_b * n + c];
            double merged;
            switch (kind) {
                case Linkage::single: merged = std::min(va, vb); break;
                case Linkage::complete: merged = std::max(va, vb); break;
                case Linkage::average: merged = va + vb; break; // cross-sum
            }
            work[best_a * n + c] = merged;
            work[c * n + best_a] = merged;
        }
        active[best_b] = false;
        size[best_a] += size[best_b];
        node_id[best_a] = static_cast<int>(n + step);
    }
    return dend;
}

std::vector<int> cut(const Dendrogram& dend, std::size_t k) {
    const std::size_t n = dend.leaves;
    if (k < 1 || k > n) throw validation_error("cut size must lie in [1, n]");
    if (dend.merges.size() != n - 1) throw validation_error("dendrogram is incomplete");

    // Apply all but the last k-1 merges with union-find over node ids.
    std::vector<int> parent(2 * n - 1);
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) { parent[x] = parent[parent[x]]; x = parent[x]; }
        return x;
    };
    const std::size_t applied = n - k;
    for (std::size_t s = 0; s < applied; ++s) {
        int root = static_cast<int>(n + s);
        parent[find(dend.merges[s].left)] = root;
        parent[find(dend.merges[s].right)] = root;
    }

    std::vector<int> labels(n, 0);
    std::vector<int> seen; // root -> dense label, in first-occurrence order
    std::vector<int> label_of(2 * n - 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        int r = find(static_cast<int>(i));
        if (label_of[r] == 0) {
            seen.push_back(r);
            label_of[r] = static_cast<int>(seen.size());
        }
        labels[i] = label_of[r];
    }
    return labels;
}

void write_merges_csv(const Dendrogram& dend, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "left,right,height,size\n";
    char buf[40];
    for (const Merge& mg : dend.merges) {
        std::snprintf(buf, sizeof(buf), "%.12g", mg.height);
        out << mg.left << ',' << mg.right << ',' << buf << ',' << mg.size << '\n';
    }
    if (!out) throw std::runtime_error("failed while writing " + path);
}

} // namespace fwpd
