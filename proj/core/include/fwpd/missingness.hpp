#pragma once

#include "fwpd/dataset.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fwpd {

// Which masking process to apply to fully observed data. Masks depend only
// on the seed and the data shape, never on the values, so methods compared
// under the same seed see identical gaps.
enum class MissingnessKind { none, mcar_cap, patch };

struct MissingnessSpec {
    MissingnessKind kind = MissingnessKind::none;
    double cap = 0.0;            // mcar_cap: per-instance removal cap fraction
    std::size_t image_side = 0;  // patch: the data must be image_side^2 pixels wide
    std::size_t patch_side = 0;

    std::string describe() const;
};

// "none" | "mcar:<cap>" | "patch:<image_side>:<patch_side>"
MissingnessSpec parse_missingness(const std::string& text);

// Removes, per instance, r ~ U{0..floor(cap*m)} uniformly chosen cells.
// cap must satisfy 0 < cap < 1 and floor(cap*m) >= 1. If a column ends up
// fully unobserved, the mask is redrawn (bounded) and as a last resort one
// random cell of the column is restored.
IncompleteDataset inject_mcar_cap(const IncompleteDataset& full, double cap, std::uint64_t seed);

// Removes a uniformly placed patch_side x patch_side square from each
// instance viewed as an image_side x image_side image (exactly patch_side^2
// cells per instance). Requires image_side^2 == cols and patch_side <
// image_side.
IncompleteDataset inject_patch(const IncompleteDataset& full, std::size_t image_side,
                               std::size_t patch_side, std::uint64_t seed);

IncompleteDataset inject(const IncompleteDataset& full, const MissingnessSpec& spec,
                         std::uint64_t seed);

// 0/1 grid, one row per instance.
void write_mask_csv(const IncompleteDataset& ds, const std::string& path);

// Re-applies an exported mask to fully observed data (shape-checked; the
// resulting dataset must still satisfy the row/column invariants).
IncompleteDataset apply_mask_csv(const IncompleteDataset& full, const std::string& path);

} // namespace fwpd
