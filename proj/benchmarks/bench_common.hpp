#pragma once

#include "fwpd/dataset.hpp"

#include <limits>
#include <random>
#include <vector>

namespace benchsupport {

// Random dataset with ~30% of cells missing, rows/columns kept nonempty.
inline fwpd::IncompleteDataset masked_dataset(std::size_t n, std::size_t m,
                                              std::uint64_t seed = 42) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> val(-5.0, 5.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const double na = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> rows(n, std::vector<double>(m));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < m; ++l)
            rows[i][l] = coin(rng) < 0.3 ? na : val(rng);
        rows[i][i % m] = val(rng);
    }
    for (std::size_t l = 0; l < m; ++l) rows[l % n][l] = val(rng);
    return fwpd::dataset_from_rows(rows);
}

} // namespace benchsupport
