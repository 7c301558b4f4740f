#include "fwpd/baselines.hpp"
#include "fwpd/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

namespace fwpd {

IncompleteDataset CompletedDataset::to_dataset(const IncompleteDataset& source) const {
    IncompleteDataset out;
    out.rows = rows;
    out.cols = cols;
    out.values = values;
    out.mask.assign(rows * cols, 1);
    out.labels = source.labels;
    out.label_names = source.label_names;
    out.feature_names = source.feature_names;
    out.validate();
    return out;
}

namespace {

CompletedDataset shell_of(const IncompleteDataset& ds, std::string provenance) {
    CompletedDataset c;
    c.rows = ds.rows;
    c.cols = ds.cols;
    c.values = ds.values;
    c.provenance = std::move(provenance);
    return c;
}

std::vector<double> column_means(const IncompleteDataset& ds) {
    std::vector<double> mean(ds.cols, 0.0);
    for (std::size_t l = 0; l < ds.cols; ++l) {
        double sum = 0.0;
        std::size_t cnt = 0;
        for (std::size_t i = 0; i < ds.rows; ++i)
            if (ds.observed(i, l)) { sum += ds.value(i, l); ++cnt; }
        mean[l] = sum / static_cast<double>(cnt); // cnt >= 1 by dataset invariant
    }
    return mean;
}

} // namespace

CompletedDataset impute_zero(const IncompleteDataset& ds) {
    CompletedDataset c = shell_of(ds, "zi");
    for (std::size_t idx = 0; idx < c.values.size(); ++idx)
        if (!ds.mask[idx]) c.values[idx] = 0.0;
    return c;
}

CompletedDataset impute_mean(const IncompleteDataset& ds, bool class_balanced) {
    if (class_balanced && !ds.has_labels())
        throw validation_error("class-balanced mean imputation requires labels");
    CompletedDataset c = shell_of(ds, class_balanced ? "mi(class-balanced)" : "mi");

    std::vector<double> fill(ds.cols, 0.0);
    if (!class_balanced) {
        fill = column_means(ds);
    } else {
        int ncls = *std::max_element(ds.labels.begin(), ds.labels.end()) + 1;
        for (std::size_t l = 0; l < ds.cols; ++l) {
            std::vector<double> sum(ncls, 0.0);
            std::vector<std::size_t> cnt(ncls, 0);
            for (std::size_t i = 0; i < ds.rows; ++i)
                if (ds.observed(i, l)) {
                    sum[ds.labels[i]] += ds.value(i, l);
                    ++cnt[ds.labels[i]];
                }
            double acc = 0.0;
            int used = 0;
            for (int cid = 0; cid < ncls; ++cid)
                if (cnt[cid] > 0) { acc += sum[cid] / static_cast<double>(cnt[cid]); ++used; }
            fill[l] = acc / static_cast<double>(used);
        }
    }
    for (std::size_t i = 0; i < ds.rows; ++i)
        for (std::size_t l = 0; l < ds.cols; ++l)
            if (!ds.observed(i, l)) c.values[i * ds.cols + l] = fill[l];
    return c;
}

CompletedDataset impute_knn(const IncompleteDataset& ds, std::size_t k) {
    if (k == 0) throw validation_error("neighbor count must be positive");
    if (k >= ds.rows) {
        std::cerr << "impute_knn: k=" << k << " >= n=" << ds.rows << ", clamping to "
                  << (ds.rows - 1) << "\n";
        k = ds.rows - 1;
    }
    CompletedDataset c = shell_of(ds, "knni:" + std::to_string(k));
    std::vector<double> fallback = column_means(ds);

    // Neighbor order per instance: ascending observed distance, index as the
    // deterministic tie-break.
    std::vector<std::size_t> order(ds.rows);
    for (std::size_t i = 0; i < ds.rows; ++i) {
        std::vector<double> dist(ds.rows);
        for (std::size_t j = 0; j < ds.rows; ++j) dist[j] = observed_distance(ds, i, j);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (dist[a] != dist[b]) return dist[a] < dist[b];
            return a < b;
        });
        for (std::size_t l = 0; l < ds.cols; ++l) {
            if (ds.observed(i, l)) continue;
            double sum = 0.0;
            std::size_t got = 0;
            for (std::size_t j : order) {
                if (j == i || !ds.observed(j, l)) continue; // skip gaps, keep ranking order
                sum += ds.value(j, l);
                if (++got == k) break;
            }
            c.values[i * ds.cols + l] =
                got > 0 ? sum / static_cast<double>(got) : fallback[l];
        }
    }
    return c;
}

CompletedDataset impute_svd(const IncompleteDataset& ds, double eigen_fraction, int max_rounds,
                            double tol) {
    if (!(eigen_fraction > 0.0 && eigen_fraction <= 1.0))
        throw validation_error("eigen_fraction must lie in (0, 1]");
    if (max_rounds < 1) throw validation_error("max_rounds must be positive");

    const std::size_t n = ds.rows, m = ds.cols;
    const int r = std::max(1, static_cast<int>(std::lround(
                                  eigen_fraction * static_cast<double>(std::min(n, m)))));

    CompletedDataset c = shell_of(ds, "svdi:r=" + std::to_string(r));
    std::vector<double> mean = column_means(ds);
    Eigen::MatrixXd X(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < m; ++l)
            X(i, l) = ds.observed(i, l) ? ds.value(i, l) : mean[l];

    bool converged = false;
    for (int round = 0; round < max_rounds; ++round) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinV);
        Eigen::MatrixXd V = svd.matrixV().leftCols(r); // m x r

        double moved = 0.0;
        Eigen::MatrixXd Xnew = X;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::size_t> obs;
            for (std::size_t l = 0; l < m; ++l)
                if (ds.observed(i, l)) obs.push_back(l);
            if (obs.size() == m) continue;

            // Least-squares coefficients of this row on the top singular
            // directions, fitted over its observed coordinates only.
            Eigen::MatrixXd Vo(obs.size(), r);
            Eigen::VectorXd xo(obs.size());
            for (std::size_t t = 0; t < obs.size(); ++t) {
                Vo.row(t) = V.row(obs[t]);
                xo(t) = ds.value(i, obs[t]);
            }
            Eigen::VectorXd beta = Vo.colPivHouseholderQr().solve(xo);
            Eigen::VectorXd row = V * beta;
            for (std::size_t l = 0; l < m; ++l) {
                if (ds.observed(i, l)) continue;
                moved = std::max(moved, std::abs(row(l) - X(i, l)));
                Xnew(i, l) = row(l);
            }
        }
        X = std::move(Xnew);
        if (moved < tol) { converged = true; break; }
    }

    if (!converged) {
        c.provenance += " (not converged)";
        c.converged = false;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < m; ++l)
            c.values[i * m + l] = X(i, l);
    return c;
}

DissimilarityMatrix pds_matrix(const IncompleteDataset& ds) {
    const std::size_t n = ds.rows, m = ds.cols;
    DissimilarityMatrix out;
    out.n = n;
    out.entries.assign(n * n, 0.0);

    double max_finite = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> empty_pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double ss = 0.0;
            std::size_t common = 0;
            for (std::size_t l = 0; l < m; ++l)
                if (ds.observed(i, l) && ds.observed(j, l)) {
                    double d = ds.value(i, l) - ds.value(j, l);
                    ss += d * d;
                    ++common;
                }
            if (common == 0) {
                empty_pairs.emplace_back(i, j);
                continue;
            }
            double v = std::sqrt(static_cast<double>(m) / static_cast<double>(common) * ss);
            out.at(i, j) = v;
            out.at(j, i) = v;
            max_finite = std::max(max_finite, v);
        }
    double sentinel = 2.0 * max_finite;
    for (auto [i, j] : empty_pairs) {
        out.at(i, j) = sentinel;
        out.at(j, i) = sentinel;
    }
    return out;
}

} // namespace fwpd
