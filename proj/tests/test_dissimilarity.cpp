#include "fwpd/dissimilarity.hpp"
#include "fwpd/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

using namespace fwpd;
using testsupport::NA;

namespace {

// Penalty computed the long way round, as an independent cross-check of the
// total-minus-common shortcut: sum the weights of every feature outside the
// common observed subspace.
double penalty_oracle(const IncompleteDataset& ds, std::size_t i, std::size_t j) {
    auto w = observation_weights(ds);
    long long num = 0;
    for (std::size_t l = 0; l < ds.cols; ++l)
        if (!(ds.observed(i, l) && ds.observed(j, l))) num += w.w[l];
    return static_cast<double>(num) / static_cast<double>(w.total);
}

} // namespace

TEST_CASE("observed distances on the walkthrough dataset") {
    auto ds = testsupport::worked_example();
    CHECK(observed_distance(ds, 0, 1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(observed_distance(ds, 0, 2) == doctest::Approx(std::sqrt(11.25)).epsilon(1e-12));
    CHECK(observed_distance(ds, 0, 3) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(observed_distance(ds, 0, 4) == 0.0); // no common feature
    CHECK(observed_distance(ds, 1, 2) == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(observed_distance(ds, 1, 3) == doctest::Approx(std::sqrt(9.81)).epsilon(1e-12));
    CHECK(observed_distance(ds, 1, 4) == doctest::Approx(3.2).epsilon(1e-12));
    CHECK(observed_distance(ds, 2, 3) == doctest::Approx(std::sqrt(9.25)).epsilon(1e-12));
    CHECK(observed_distance(ds, 2, 4) == 0.0);
    CHECK(observed_distance(ds, 3, 4) == doctest::Approx(4.1).epsilon(1e-12));
    for (std::size_t i = 0; i < 5; ++i) CHECK(observed_distance(ds, i, i) == 0.0);
    CHECK(max_observed_distance(ds) == doctest::Approx(4.1).epsilon(1e-12));
}

TEST_CASE("penalties on the walkthrough dataset are exact rationals") {
    auto ds = testsupport::worked_example();
    auto w = observation_weights(ds);
    auto gs = ds.feature_sets();
    const double expected[5][5] = {
        {0.3, 0.6, 0.3, 0.3, 1.0},
        {0.6, 0.3, 0.6, 0.3, 0.7},
        {0.3, 0.6, 0.3, 0.3, 1.0},
        {0.3, 0.3, 0.3, 0.0, 0.7},
        {1.0, 0.7, 1.0, 0.7, 0.7},
    };
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) {
            double p = feature_weighted_penalty(w, gs[i], gs[j]);
            CHECK(p == expected[i][j]);
            CHECK(p == penalty_oracle(ds, i, j));
        }
}

TEST_CASE("the combined dissimilarity mixes both terms by alpha") {
    auto ds = testsupport::worked_example();
    auto ctx = build_context(ds, 0.7);
    CHECK(ctx.d_max == doctest::Approx(4.1).epsilon(1e-12));

    CHECK(dissimilarity(ctx, ds, 0, 1) ==
          doctest::Approx(0.3 * (2.0 / 4.1) + 0.7 * 0.6).epsilon(1e-12));
    // Self-dissimilarity reduces to the penalty share of the unobserved part.
    CHECK(dissimilarity(ctx, ds, 0, 0) == doctest::Approx(0.7 * 0.3).epsilon(1e-12));
    CHECK(dissimilarity(ctx, ds, 3, 3) == 0.0);
    CHECK(dissimilarity(ctx, ds, 4, 4) == doctest::Approx(0.7 * 0.7).epsilon(1e-12));
    // A pair with nothing in common is pure penalty.
    CHECK(dissimilarity(ctx, ds, 0, 4) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("alpha must be strictly inside the unit interval") {
    auto ds = testsupport::worked_example();
    CHECK_THROWS_AS(build_context(ds, 0.0), validation_error);
    CHECK_THROWS_AS(build_context(ds, 1.0), validation_error);
    CHECK_THROWS_AS(build_context(ds, -0.2), validation_error);
    CHECK_THROWS_AS(build_context(ds, 1.2), validation_error);
    CHECK_NOTHROW(build_context(ds, 1e-9));
    CHECK_NOTHROW(build_context(ds, 1.0 - 1e-9));
}

TEST_CASE("zero maximum distance drops the distance term") {
    // Two groups observing disjoint features pairwise: all observed
    // distances are zero or over identical values.
    auto ds = dataset_from_rows({{1.0, NA}, {NA, 2.0}, {1.0, 2.0}});
    ds.clear_cell(2, 1);
    // Rebuild: instance 2 observes only feature 0 with the same value.
    CHECK(max_observed_distance(ds) == 0.0);
    auto ctx = build_context(ds, 0.5);
    CHECK(std::isfinite(dissimilarity(ctx, ds, 0, 1)));
    CHECK(dissimilarity(ctx, ds, 0, 1) == doctest::Approx(0.5 * 1.0)); // pure penalty
}

TEST_CASE("semi-metric properties hold on random masked data") {
    std::mt19937_64 rng(2024);
    for (int rep = 0; rep < 100; ++rep) {
        auto ds = testsupport::random_masked_dataset(rng, 12, 6, 0.35);
        auto ctx = build_context(ds, 0.4);
        auto m = pairwise_matrix(ctx, ds);
        for (std::size_t i = 0; i < ds.rows; ++i) {
            bool full_row = ds.feature_set(i).count() == ds.cols;
            // Self-dissimilarity vanishes exactly when everything is observed.
            CHECK((m.at(i, i) == 0.0) == full_row);
            for (std::size_t j = 0; j < ds.rows; ++j) {
                CHECK(m.at(i, j) == m.at(j, i));
                CHECK(m.at(i, j) >= m.at(i, i) - 1e-9);
                CHECK(m.at(i, j) >= 0.0);
                CHECK(m.at(i, j) <= 1.0 + 1e-9);
            }
        }
    }
}

TEST_CASE("absent-feature variant zeroes the diagonal and detects equality") {
    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 50; ++rep) {
        auto ds = testsupport::random_masked_dataset(rng, 10, 5, 0.3);
        auto ctx = build_context(ds, 0.35);
        auto m = pairwise_matrix_absent(ctx, ds);
        for (std::size_t i = 0; i < ds.rows; ++i) {
            CHECK(m.at(i, i) == 0.0);
            for (std::size_t j = i + 1; j < ds.rows; ++j) {
                CHECK(m.at(i, j) == m.at(j, i));
                CHECK(m.at(i, j) >= 0.0);
                bool identical = true;
                for (std::size_t l = 0; l < ds.cols; ++l) {
                    if (ds.observed(i, l) != ds.observed(j, l)) identical = false;
                    else if (ds.observed(i, l) && ds.value(i, l) != ds.value(j, l))
                        identical = false;
                }
                if (identical) CHECK(m.at(i, j) == 0.0);
                else CHECK(m.at(i, j) > 1e-9);
            }
        }
    }
}

TEST_CASE("absent-feature variant treats duplicated instances as equal") {
    auto ds = dataset_from_rows({{1.0, NA, 2.0}, {1.0, NA, 2.0}, {NA, 3.0, 1.0}});
    auto ctx = build_context(ds, 0.5);
    CHECK(dissimilarity_absent(ctx, ds, 0, 1) == 0.0);
    CHECK(dissimilarity_absent(ctx, ds, 0, 2) > 0.0);
    // Same pair under the unobserved-feature reading is penalized: feature 1
    // carries weight even though neither instance records it.
    CHECK(dissimilarity(ctx, ds, 0, 1) > 0.0);
}

TEST_CASE("symmetric-difference penalty normalizes by the union weight") {
    auto ds = dataset_from_rows({{1.0, 2.0, NA}, {NA, 1.0, 3.0}, {1.0, 1.0, 1.0}});
    auto nu = observation_weights(ds); // (2, 3, 2)
    REQUIRE(nu.w == std::vector<long long>{2, 3, 2});
    double p = feature_weighted_penalty_absent(nu, ds.feature_set(0), ds.feature_set(1));
    // Symmetric difference {0, 2} over union {0, 1, 2}.
    CHECK(p == doctest::Approx((2.0 + 2.0) / (2.0 + 3.0 + 2.0)).epsilon(1e-15));
}

TEST_CASE("matrix csv writing round-trips at 12 significant digits") {
    auto ds = testsupport::worked_example();
    auto ctx = build_context(ds, 0.7);
    auto m = pairwise_matrix(ctx, ds);

    testsupport::ScratchDir dir("matrix");
    std::string path = dir.file("m.csv");
    write_matrix_csv(m, path);
    auto back = load_matrix_csv(path);
    REQUIRE(back.n == m.n);
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.n; ++j)
            CHECK(back.at(i, j) == doctest::Approx(m.at(i, j)).epsilon(1e-11));
}

TEST_CASE("malformed matrix files are rejected") {
    testsupport::ScratchDir dir("badmat");
    std::string path = dir.file("m.csv");
    std::ofstream(path) << "0,1\n0,1.5\n1.5,0\n0,0\n";
    CHECK_THROWS_AS(load_matrix_csv(path), format_error);
}

TEST_CASE("smallest positive triple penalty on the walkthrough dataset") {
    auto ds = testsupport::worked_example();
    auto rho = min_positive_rho(ds);
    REQUIRE(rho.has_value());
    CHECK(*rho == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("fully observed data has no positive triple penalty") {
    auto ds = dataset_from_rows({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
    CHECK(!min_positive_rho(ds).has_value());
}

TEST_CASE("fewer than three instances yields no triple penalty") {
    auto ds = dataset_from_rows({{1.0, NA}, {NA, 2.0}});
    CHECK(!min_positive_rho(ds).has_value());
}

TEST_CASE("relaxed triangle inequality holds at the guaranteed slack") {
    auto ds = testsupport::worked_example();
    double eps = *min_positive_rho(ds); // 0.3
    double alpha = 1.0 - eps;           // smallest admissible trade-off
    auto ctx = build_context(ds, alpha);
    auto m = pairwise_matrix(ctx, ds);
    auto rep = check_relaxed_triangle(m, eps);
    CHECK(rep.ok);
    CHECK(rep.worst_violation <= eps * eps + 1e-12);
}

TEST_CASE("triangle checker reports the worst offending triple") {
    DissimilarityMatrix m;
    m.n = 3;
    m.entries = {0.0, 0.1, 0.9,
                 0.1, 0.0, 0.1,
                 0.9, 0.1, 0.0};
    auto rep = check_relaxed_triangle(m, 0.1);
    CHECK(!rep.ok);
    // delta(k,i) - delta(i,j) - delta(j,k) peaks at 0.9 - 0.1 - 0.1.
    CHECK(rep.worst_violation == doctest::Approx(0.7).epsilon(1e-12));
    auto rep2 = check_relaxed_triangle(m, 0.9);
    CHECK(rep2.ok); // 0.7 <= 0.81
}

TEST_CASE("random data satisfies the triangle bound derived from the triple penalty") {
    std::mt19937_64 rng(555);
    int checked = 0;
    for (int rep = 0; rep < 40; ++rep) {
        auto ds = testsupport::random_masked_dataset(rng, 10, 6, 0.4);
        auto rho = min_positive_rho(ds);
        if (!rho) continue;
        double eps = *rho;
        double alpha = std::clamp(1.0 - eps, 1e-9, 1.0 - 1e-9);
        auto ctx = build_context(ds, alpha);
        auto report = check_relaxed_triangle(pairwise_matrix(ctx, ds), eps);
        CHECK(report.ok);
        ++checked;
    }
    CHECK(checked > 0);
}
