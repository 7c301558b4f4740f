#include "fwpd/kmeans.hpp"
#include "fwpd/errors.hpp"
#include "fwpd/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace fwpd {

namespace {

void validate_k(std::size_t n, std::size_t k) {
    if (k < 2) throw validation_error("k must be at least 2");
    if (k >= n) throw validation_error("k must be smaller than the number of instances");
}

void validate_membership(const Membership& U, std::size_t n, std::size_t k) {
    if (U.assignment.size() != n)
        throw validation_error("membership length does not match instance count");
    std::vector<std::size_t> counts(k, 0);
    for (int a : U.assignment) {
        if (a < 0 || static_cast<std::size_t>(a) >= k)
            throw validation_error("membership contains an out-of-range cluster id");
        ++counts[static_cast<std::size_t>(a)];
    }
    for (std::size_t j = 0; j < k; ++j)
        if (counts[j] == 0)
            throw validation_error("cluster " + std::to_string(j) + " is empty in the initializer");
}

} // namespace

Membership init_random(std::size_t n, std::size_t k, std::uint64_t seed) {
    validate_k(n, k);
    auto rng = make_rng(seed, seed_tag::kmeans_init);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(k) - 1);
    Membership U;
    for (int attempt = 0; attempt < 100; ++attempt) {
        U.assignment.assign(n, 0);
        std::vector<bool> used(k, false);
        for (std::size_t i = 0; i < n; ++i) {
            int c = pick(rng);
            U.assignment[i] = c;
            used[static_cast<std::size_t>(c)] = true;
        }
        if (std::all_of(used.begin(), used.end(), [](bool b) { return b; })) return U;
    }
    for (std::size_t i = 0; i < n; ++i)
        U.assignment[i] = static_cast<int>(i % k);
    return U;
}

std::vector<Centroid> update_centroids(const IncompleteDataset& ds, const Membership& U,
                                       std::size_t k, const std::vector<Centroid>* prev) {
    const std::size_t m = ds.cols;
    std::vector<Centroid> Z(k);
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < ds.rows; ++i)
        members[static_cast<std::size_t>(U.assignment[i])].push_back(i);

    for (std::size_t j = 0; j < k; ++j) {
        Centroid z;
        z.values.assign(m, std::numeric_limits<double>::quiet_NaN());
        z.gamma = FeatureSet(m);
        if (members[j].empty()) {
            if (prev) { Z[j] = (*prev)[j]; continue; }
            throw validation_error("cluster " + std::to_string(j) + " has no members");
        }
        for (std::size_t l = 0; l < m; ++l) {
            double sum = 0.0;
            std::size_t cnt = 0;
            for (std::size_t i : members[j])
                if (ds.observed(i, l)) { sum += ds.value(i, l); ++cnt; }
            if (cnt > 0) {
                z.values[l] = sum / static_cast<double>(cnt);
                z.gamma.insert(l);
            } else if (prev && (*prev)[j].gamma.contains(l)) {
                // No current member observes l: carry the previous value so
                // the cluster's feature set never shrinks mid-run.
                z.values[l] = (*prev)[j].values[l];
                z.gamma.insert(l);
            }
        }
        Z[j] = std::move(z);
    }
    return Z;
}

double point_to_centroid(const DissimilarityContext& ctx, const IncompleteDataset& ds,
                         std::size_t i, const Centroid& z) {
    double ss = 0.0;
    long long common_w = 0;
    for (std::size_t l = 0; l < ds.cols; ++l) {
        if (ds.observed(i, l) && z.gamma.contains(l)) {
            double d = ds.value(i, l) - z.values[l];
            ss += d * d;
            common_w += ctx.weights.w[l];
        }
    }
    double d = std::sqrt(ss);
    double p = static_cast<double>(ctx.weights.total - common_w) /
               static_cast<double>(ctx.weights.total);
    double dterm = ctx.d_max > 0.0 ? (1.0 - ctx.alpha) * d / ctx.d_max : 0.0;
    return dterm + ctx.alpha * p;
}

namespace {

// n x k matrix of point-to-centroid dissimilarities.
std::vector<double> delta_table(const DissimilarityContext& ctx, const IncompleteDataset& ds,
                                const std::vector<Centroid>& Z) {
    std::vector<double> t(ds.rows * Z.size());
    for (std::size_t i = 0; i < ds.rows; ++i)
        for (std::size_t j = 0; j < Z.size(); ++j)
            t[i * Z.size() + j] = point_to_centroid(ctx, ds, i, Z[j]);
    return t;
}

Membership assign_from_table(const std::vector<double>& table, std::size_t n, std::size_t k) {
    Membership U;
    U.assignment.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        double bestv = table[i * k];
        for (std::size_t j = 1; j < k; ++j) {
            double v = table[i * k + j];
            if (v < bestv) { bestv = v; best = j; }
        }
        U.assignment[i] = static_cast<int>(best);
    }
    return U;
}

// Moves the instance currently farthest from its own centroid into each
// empty cluster (never draining a singleton cluster).
int repair_empty_clusters(Membership& U, const std::vector<double>& table, std::size_t n,
                          std::size_t k) {
    std::vector<std::size_t> counts(k, 0);
    for (int a : U.assignment) ++counts[static_cast<std::size_t>(a)];
    int repairs = 0;
    for (std::size_t j = 0; j < k; ++j) {
        if (counts[j] > 0) continue;
        std::size_t pick = n;
        double worst = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t cur = static_cast<std::size_t>(U.assignment[i]);
            if (counts[cur] < 2) continue;
            double v = table[i * k + cur];
            if (v > worst) { worst = v; pick = i; }
        }
        if (pick == n) throw std::runtime_error("cannot repair empty cluster");
        --counts[static_cast<std::size_t>(U.assignment[pick])];
        U.assignment[pick] = static_cast<int>(j);
        ++counts[j];
        ++repairs;
    }
    return repairs;
}

double objective_from_table(const std::vector<double>& table, const Membership& U,
                            std::size_t k) {
    double f = 0.0;
    for (std::size_t i = 0; i < U.assignment.size(); ++i)
        f += table[i * k + static_cast<std::size_t>(U.assignment[i])];
    return f;
}

std::uint64_t hash_membership(const Membership& U) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int a : U.assignment) {
        h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(a));
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

Membership assign(const DissimilarityContext& ctx, const IncompleteDataset& ds,
                  const std::vector<Centroid>& Z) {
    return assign_from_table(delta_table(ctx, ds, Z), ds.rows, Z.size());
}

double objective(const DissimilarityContext& ctx, const IncompleteDataset& ds,
                 const Membership& U, const std::vector<Centroid>& Z) {
    double f = 0.0;
    for (std::size_t i = 0; i < ds.rows; ++i)
        f += point_to_centroid(ctx, ds, i, Z[static_cast<std::size_t>(U.assignment[i])]);
    return f;
}

std::vector<FeasibilityEvent> detect_feasibility_adjustments(const std::vector<Centroid>& prev,
                                                             const std::vector<Centroid>& next,
                                                             int iteration) {
    std::vector<FeasibilityEvent> events;
    for (std::size_t j = 0; j < next.size(); ++j) {
        FeatureSet grown = next[j].gamma.difference(prev[j].gamma);
        if (!grown.empty()) {
            FeasibilityEvent e;
            e.iteration = iteration;
            e.cluster = static_cast<int>(j);
            e.added = grown.elements();
            events.push_back(std::move(e));
        }
    }
    return events;
}

KMeansResult kmeans_fwpd_with_init(const IncompleteDataset& ds, const DissimilarityContext& ctx,
                                   std::size_t k, const Membership& init, int max_iter) {
    validate_k(ds.rows, k);
    validate_membership(init, ds.rows, k);
    if (max_iter < 1) throw validation_error("max_iter must be positive");

    KMeansResult res;
    KMeansTrace& tr = res.trace;
    Membership U = init;
    std::vector<Centroid> Z;
    tr.membership_hashes.push_back(hash_membership(U));

    for (int t = 1; t <= max_iter; ++t) {
        std::vector<Centroid> Znew =
            update_centroids(ds, U, k, Z.empty() ? nullptr : &Z);
        bool adjusted = false;
        if (!Z.empty()) {
            auto events = detect_feasibility_adjustments(Z, Znew, t);
            adjusted = !events.empty();
            for (auto& e : events) tr.adjustments.push_back(std::move(e));
        }
        Z = std::move(Znew);

        double f_upd = objective(ctx, ds, U, Z);
        if (!tr.objective_after_repair.empty() && !adjusted &&
            f_upd > tr.objective_after_repair.back() + 1e-12)
            ++tr.update_increases;
        tr.objective_after_update.push_back(f_upd);

        auto table = delta_table(ctx, ds, Z);
        Membership Unew = assign_from_table(table, ds.rows, k);
        tr.objective_after_assign.push_back(objective_from_table(table, Unew, k));
        int repairs = repair_empty_clusters(Unew, table, ds.rows, k);
        if (repairs > 0) tr.repair_iterations.push_back(t);
        tr.objective_after_repair.push_back(objective_from_table(table, Unew, k));
        tr.membership_hashes.push_back(hash_membership(Unew));

        tr.iterations = t;
        if (Unew == U) {
            tr.converged = true;
            break;
        }
        U = std::move(Unew);
    }

    tr.terminal_centroids = Z;
    res.membership = std::move(U);
    res.centroids = update_centroids(ds, res.membership, k, nullptr);
    res.objective = objective(ctx, ds, res.membership, res.centroids);
    return res;
}

KMeansResult kmeans_fwpd(const IncompleteDataset& ds, const DissimilarityContext& ctx,
                         std::size_t k, std::uint64_t seed, int max_iter) {
    return kmeans_fwpd_with_init(ds, ctx, k, init_random(ds.rows, k, seed), max_iter);
}

LloydResult lloyd(const std::vector<double>& data, std::size_t n, std::size_t m, std::size_t k,
                  const Membership& init, int max_iter) {
    validate_k(n, k);
    validate_membership(init, n, k);
    if (data.size() != n * m) throw validation_error("data size does not match n*m");

    Membership U = init;
    std::vector<double> Z(k * m, 0.0);
    std::vector<double> table(n * k, 0.0);
    LloydResult res;

    for (int t = 1; t <= max_iter; ++t) {
        std::vector<std::size_t> counts(k, 0);
        std::fill(Z.begin(), Z.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t j = static_cast<std::size_t>(U.assignment[i]);
            ++counts[j];
            for (std::size_t l = 0; l < m; ++l) Z[j * m + l] += data[i * m + l];
        }
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t l = 0; l < m; ++l)
                Z[j * m + l] /= static_cast<double>(counts[j]);

        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < k; ++j) {
                double ss = 0.0;
                for (std::size_t l = 0; l < m; ++l) {
                    double d = data[i * m + l] - Z[j * m + l];
                    ss += d * d;
                }
                table[i * k + j] = ss;
            }

        Membership Unew = assign_from_table(table, n, k);
        repair_empty_clusters(Unew, table, n, k);
        res.iterations = t;
        if (Unew == U) {
            res.converged = true;
            break;
        }
        U = std::move(Unew);
    }

    res.membership = std::move(U);
    res.centroids = std::move(Z);
    res.objective = objective_from_table(table, res.membership, k);
    return res;
}

LloydResult lloyd_seeded(const std::vector<double>& data, std::size_t n, std::size_t m,
                         std::size_t k, std::uint64_t seed, int max_iter) {
    return lloyd(data, n, m, k, init_random(n, k, seed), max_iter);
}

void write_labels_csv(const Membership& U, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (int a : U.assignment) out << (a + 1) << '\n';
    if (!out) throw std::runtime_error("failed while writing " + path);
}

std::vector<int> load_labels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open " + path);
    std::vector<int> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            labels.push_back(std::stoi(line));
        } catch (const std::exception&) {
            throw format_error(path + ": cannot parse label '" + line + "'");
        }
    }
    if (labels.empty()) throw format_error(path + ": no labels");
    return labels;
}

void write_trace_csv(const KMeansTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "iteration,objective_update,objective_assign,objective_iterate,adjustments,repairs\n";
    char buf[40];
    for (int t = 1; t <= trace.iterations; ++t) {
        std::size_t idx = static_cast<std::size_t>(t - 1);
        int adj = 0;
        for (const auto& e : trace.adjustments)
            if (e.iteration == t) ++adj;
        int rep = static_cast<int>(
            std::count(trace.repair_iterations.begin(), trace.repair_iterations.end(), t));
        out << t;
        for (double v : {trace.objective_after_update[idx], trace.objective_after_assign[idx],
                         trace.objective_after_repair[idx]}) {
            std::snprintf(buf, sizeof(buf), "%.12g", v);
            out << ',' << buf;
        }
        out << ',' << adj << ',' << rep << '\n';
    }
    if (!out) throw std::runtime_error("failed while writing " + path);
}

void write_centroids_csv(const std::vector<Centroid>& centroids, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "cluster,feature,value\n";
    char buf[40];
    for (std::size_t j = 0; j < centroids.size(); ++j)
        for (std::size_t l : centroids[j].gamma.elements()) {
            std::snprintf(buf, sizeof(buf), "%.12g", centroids[j].values[l]);
            out << (j + 1) << ',' << l << ',' << buf << '\n';
        }
    if (!out) throw std::runtime_error("failed while writing " + path);
}

} // namespace fwpd
