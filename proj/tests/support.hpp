#pragma once

// Shared fixtures for the unit tests: the five-instance walkthrough dataset,
// seeded random dataset generators, and a scratch-directory helper.

#include "fwpd/dataset.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

namespace testsupport {

inline constexpr double NA = std::numeric_limits<double>::quiet_NaN();

// Five instances over three features with staggered gaps; observation
// weights are (3,3,4) and the largest pairwise distance is 4.1.
inline fwpd::IncompleteDataset worked_example() {
    return fwpd::dataset_from_rows({
        {NA, 3.0, 2.0},
        {1.2, NA, 4.0},
        {NA, 0.0, 0.5},
        {2.1, 3.0, 1.0},
        {-2.0, NA, NA},
    });
}

// Random values in [-5,5] with cells dropped independently at miss_rate,
// then minimally repaired so every row and column stays observed somewhere.
inline fwpd::IncompleteDataset random_masked_dataset(std::mt19937_64& rng, std::size_t n,
                                                     std::size_t m, double miss_rate) {
    std::uniform_real_distribution<double> val(-5.0, 5.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<std::vector<double>> rows(n, std::vector<double>(m));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < m; ++l)
            rows[i][l] = coin(rng) < miss_rate ? NA : val(rng);

    std::uniform_int_distribution<std::size_t> pick_col(0, m - 1);
    std::uniform_int_distribution<std::size_t> pick_row(0, n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        bool any = false;
        for (std::size_t l = 0; l < m; ++l) any = any || !std::isnan(rows[i][l]);
        if (!any) rows[i][pick_col(rng)] = val(rng);
    }
    for (std::size_t l = 0; l < m; ++l) {
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) any = any || !std::isnan(rows[i][l]);
        if (!any) rows[pick_row(rng)][l] = val(rng);
    }
    return fwpd::dataset_from_rows(rows);
}

inline fwpd::IncompleteDataset random_complete_dataset(std::mt19937_64& rng, std::size_t n,
                                                       std::size_t m) {
    std::uniform_real_distribution<double> val(-5.0, 5.0);
    std::vector<std::vector<double>> rows(n, std::vector<double>(m));
    for (auto& r : rows)
        for (auto& v : r) v = val(rng);
    return fwpd::dataset_from_rows(rows);
}

// Unique scratch directory, removed when the object goes out of scope.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("fwpd_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace testsupport
