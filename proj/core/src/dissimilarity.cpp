#include "fwpd/dissimilarity.hpp"
#include "fwpd/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace fwpd {

double observed_distance(const IncompleteDataset& ds, std::size_t i, std::size_t j) {
    double ss = 0.0;
    for (std::size_t l = 0; l < ds.cols; ++l) {
        if (ds.observed(i, l) && ds.observed(j, l)) {
            double d = ds.value(i, l) - ds.value(j, l);
            ss += d * d;
        }
    }
    return std::sqrt(ss);
}

double max_observed_distance(const IncompleteDataset& ds) {
    double best = 0.0;
    for (std::size_t i = 0; i < ds.rows; ++i)
        for (std::size_t j = i + 1; j < ds.rows; ++j)
            best = std::max(best, observed_distance(ds, i, j));
    return best;
}

namespace {

long long weight_of(const ObservationWeights& w, const FeatureSet& g) {
    long long s = 0;
    for (std::size_t l = 0; l < w.w.size(); ++l)
        if (g.contains(l)) s += w.w[l];
    return s;
}

long long common_weight(const ObservationWeights& w, const FeatureSet& gi, const FeatureSet& gj) {
    long long s = 0;
    for (std::size_t l = 0; l < w.w.size(); ++l)
        if (gi.contains(l) && gj.contains(l)) s += w.w[l];
    return s;
}

} // namespace

double feature_weighted_penalty(const ObservationWeights& w, const FeatureSet& gi,
                                const FeatureSet& gj) {
    // Sum over S \ (gi & gj) equals total minus the common-subspace weight.
    return static_cast<double>(w.total - common_weight(w, gi, gj)) /
           static_cast<double>(w.total);
}

double feature_weighted_penalty_absent(const ObservationWeights& nu, const FeatureSet& gi,
                                       const FeatureSet& gj) {
    long long united = weight_of(nu, gi.unite(gj));
    long long common = common_weight(nu, gi, gj);
    return static_cast<double>(united - common) / static_cast<double>(united);
}

DissimilarityContext build_context(const IncompleteDataset& ds, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw validation_error("alpha must lie strictly between 0 and 1, got " +
                               std::to_string(alpha));
    DissimilarityContext ctx;
    ctx.weights = observation_weights(ds);
    ctx.d_max = max_observed_distance(ds);
    ctx.alpha = alpha;
    return ctx;
}

namespace {

double combine(const DissimilarityContext& ctx, double d, double p) {
    double dterm = ctx.d_max > 0.0 ? (1.0 - ctx.alpha) * d / ctx.d_max : 0.0;
    return dterm + ctx.alpha * p;
}

} // namespace

double dissimilarity(const DissimilarityContext& ctx, const IncompleteDataset& ds, std::size_t i,
            std::size_t j) {
    double d = observed_distance(ds, i, j);
    double p = feature_weighted_penalty(ctx.weights, ds.feature_set(i), ds.feature_set(j));
    return combine(ctx, d, p);
}

double dissimilarity_absent(const DissimilarityContext& ctx, const IncompleteDataset& ds, std::size_t i,
                   std::size_t j) {
    double d = observed_distance(ds, i, j);
    double p = feature_weighted_penalty_absent(ctx.weights, ds.feature_set(i), ds.feature_set(j));
    return combine(ctx, d, p);
}

namespace {

template <typename PairFn>
DissimilarityMatrix fill_matrix(const IncompleteDataset& ds, PairFn&& f) {
    DissimilarityMatrix m;
    m.n = ds.rows;
    m.entries.assign(m.n * m.n, 0.0);
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = i; j < m.n; ++j) {
            double v = f(i, j);
            m.at(i, j) = v;
            m.at(j, i) = v;
        }
    return m;
}

} // namespace

DissimilarityMatrix pairwise_matrix(const DissimilarityContext& ctx, const IncompleteDataset& ds) {
    auto gs = ds.feature_sets();
    return fill_matrix(ds, [&](std::size_t i, std::size_t j) {
        double d = observed_distance(ds, i, j);
        double p = feature_weighted_penalty(ctx.weights, gs[i], gs[j]);
        return combine(ctx, d, p);
    });
}

DissimilarityMatrix pairwise_matrix_absent(const DissimilarityContext& ctx,
                                           const IncompleteDataset& ds) {
    auto gs = ds.feature_sets();
    return fill_matrix(ds, [&](std::size_t i, std::size_t j) {
        double d = observed_distance(ds, i, j);
        double p = feature_weighted_penalty_absent(ctx.weights, gs[i], gs[j]);
        return combine(ctx, d, p);
    });
}

DissimilarityMatrix observed_distance_matrix(const IncompleteDataset& ds) {
    return fill_matrix(ds, [&](std::size_t i, std::size_t j) {
        return observed_distance(ds, i, j);
    });
}

void write_matrix_csv(const DissimilarityMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (std::size_t j = 0; j < m.n; ++j) {
        if (j) out << ',';
        out << j;
    }
    out << '\n';
    char buf[40];
    for (std::size_t i = 0; i < m.n; ++i) {
        for (std::size_t j = 0; j < m.n; ++j) {
            if (j) out << ',';
            std::snprintf(buf, sizeof(buf), "%.12g", m.at(i, j));
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed while writing " + path);
}

DissimilarityMatrix load_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw format_error(path + ": empty matrix file");
    std::vector<double> vals;
    std::size_t nrows = 0, width = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t cnt = 0;
        while (std::getline(ss, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw format_error(path + ": cannot parse matrix entry '" + cell + "'");
            }
            ++cnt;
        }
        if (nrows == 0) width = cnt;
        else if (cnt != width) throw format_error(path + ": ragged matrix row");
        ++nrows;
    }
    if (nrows != width) throw format_error(path + ": matrix is not square");
    DissimilarityMatrix m;
    m.n = nrows;
    m.entries = std::move(vals);
    return m;
}

std::optional<double> min_positive_rho(const IncompleteDataset& ds) {
    auto gs = ds.feature_sets();
    ObservationWeights w = observation_weights(ds);
    auto p_of = [&](const FeatureSet& g) {
        return static_cast<double>(weight_of(w, g)) / static_cast<double>(w.total);
    };
    auto rho = [&](std::size_t i, std::size_t j, std::size_t k) {
        FeatureSet gik_u = gs[i].unite(gs[k]);
        FeatureSet gik_n = gs[i].intersect(gs[k]);
        double r = p_of(gik_u.difference(gs[j]));
        r += p_of(gik_n.difference(gs[j]));
        r += p_of(gs[j].difference(gik_u));
        r += p_of(gik_u.unite(gs[j]).complement());
        return r;
    };
    std::optional<double> best;
    const std::size_t n = ds.rows;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            for (std::size_t c = b + 1; c < n; ++c) {
                // rho is symmetric in its outer arguments, so the three
                // choices of middle element cover all role assignments.
                for (double r : {rho(a, b, c), rho(b, a, c), rho(a, c, b)}) {
                    if (r > 0.0 && (!best || r < *best)) best = r;
                }
            }
    return best;
}

TriangleReport check_relaxed_triangle(const DissimilarityMatrix& m, double eps) {
    TriangleReport rep;
    rep.worst_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.n; ++j) {
            if (j == i) continue;
            for (std::size_t k = 0; k < m.n; ++k) {
                if (k == i || k == j) continue;
                double v = m.at(k, i) - m.at(i, j) - m.at(j, k);
                if (v > rep.worst_violation) {
                    rep.worst_violation = v;
                    rep.i = i; rep.j = j; rep.k = k;
                }
            }
        }
    if (m.n < 3) rep.worst_violation = 0.0;
    // 1e-12 of slack keeps accumulated rounding in the matrix entries from
    // flagging a boundary case.
    rep.ok = rep.worst_violation <= eps * eps + 1e-12;
    return rep;
}

} // namespace fwpd
