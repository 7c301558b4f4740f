#include "fwpd/missingness.hpp"
#include "fwpd/errors.hpp"
#include "fwpd/random.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace fwpd {

std::string MissingnessSpec::describe() const {
    switch (kind) {
        case MissingnessKind::none: return "none";
        case MissingnessKind::mcar_cap: {
            std::ostringstream os;
            os << "mcar:" << cap;
            return os.str();
        }
        case MissingnessKind::patch:
            return "patch:" + std::to_string(image_side) + ":" + std::to_string(patch_side);
    }
    return "?";
}

MissingnessSpec parse_missingness(const std::string& text) {
    MissingnessSpec spec;
    if (text == "none") return spec;
    if (text.rfind("mcar:", 0) == 0) {
        spec.kind = MissingnessKind::mcar_cap;
        try {
            spec.cap = std::stod(text.substr(5));
        } catch (const std::exception&) {
            throw validation_error("cannot parse missingness '" + text + "'");
        }
        return spec;
    }
    if (text.rfind("patch:", 0) == 0) {
        spec.kind = MissingnessKind::patch;
        std::string rest = text.substr(6);
        auto colon = rest.find(':');
        if (colon == std::string::npos)
            throw validation_error("patch missingness needs image and patch sides: '" + text + "'");
        try {
            spec.image_side = static_cast<std::size_t>(std::stoul(rest.substr(0, colon)));
            spec.patch_side = static_cast<std::size_t>(std::stoul(rest.substr(colon + 1)));
        } catch (const std::exception&) {
            throw validation_error("cannot parse missingness '" + text + "'");
        }
        return spec;
    }
    throw validation_error("unknown missingness '" + text + "' (expected none, mcar:<cap> or "
                           "patch:<image>:<patch>)");
}

namespace {

void require_fully_observed(const IncompleteDataset& full) {
    if (!full.fully_observed())
        throw validation_error("missingness injection needs fully observed input data");
}

std::vector<std::size_t> empty_columns(const std::vector<std::uint8_t>& mask, std::size_t n,
                                       std::size_t m) {
    std::vector<std::size_t> out;
    for (std::size_t l = 0; l < m; ++l) {
        bool any = false;
        for (std::size_t i = 0; i < n && !any; ++i) any = mask[i * m + l] != 0;
        if (!any) out.push_back(l);
    }
    return out;
}

IncompleteDataset apply_mask_vector(const IncompleteDataset& full,
                                    const std::vector<std::uint8_t>& mask) {
    IncompleteDataset out = full;
    for (std::size_t i = 0; i < full.rows; ++i)
        for (std::size_t l = 0; l < full.cols; ++l)
            if (!mask[i * full.cols + l]) out.clear_cell(i, l);
    out.validate();
    return out;
}

} // namespace

IncompleteDataset inject_mcar_cap(const IncompleteDataset& full, double cap, std::uint64_t seed) {
    require_fully_observed(full);
    const std::size_t n = full.rows, m = full.cols;
    if (!(cap > 0.0 && cap < 1.0))
        throw validation_error("mcar cap must lie strictly between 0 and 1");
    const std::size_t rmax = static_cast<std::size_t>(std::floor(cap * static_cast<double>(m)));
    if (rmax < 1)
        throw validation_error("mcar cap too small: floor(cap*m) must be at least 1");
    // rmax <= m-1 since cap < 1, so every instance keeps at least one cell.

    auto rng = make_rng(seed, seed_tag::mask);
    std::vector<std::uint8_t> mask;
    std::vector<std::size_t> idx(m);

    for (int attempt = 0; attempt < 10; ++attempt) {
        mask.assign(n * m, 1);
        std::uniform_int_distribution<std::size_t> count_dist(0, rmax);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = count_dist(rng);
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            // Partial Fisher-Yates: the first r entries are the removed cells.
            for (std::size_t t = 0; t < r; ++t) {
                std::uniform_int_distribution<std::size_t> pick(t, m - 1);
                std::swap(idx[t], idx[pick(rng)]);
                mask[i * m + idx[t]] = 0;
            }
        }
        if (empty_columns(mask, n, m).empty()) return apply_mask_vector(full, mask);
    }
    // Re-draws kept losing a column; restore one random cell per empty column.
    for (std::size_t l : empty_columns(mask, n, m)) {
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        mask[pick(rng) * m + l] = 1;
    }
    return apply_mask_vector(full, mask);
}

IncompleteDataset inject_patch(const IncompleteDataset& full, std::size_t image_side,
                               std::size_t patch_side, std::uint64_t seed) {
    require_fully_observed(full);
    const std::size_t n = full.rows, m = full.cols;
    if (image_side * image_side != m)
        throw validation_error("patch injection: data width " + std::to_string(m) +
                               " is not image_side^2 = " + std::to_string(image_side * image_side));
    if (patch_side < 1 || patch_side >= image_side)
        throw validation_error("patch side must satisfy 1 <= patch_side < image_side");

    auto rng = make_rng(seed, seed_tag::mask);
    std::vector<std::uint8_t> mask;

    for (int attempt = 0; attempt < 10; ++attempt) {
        mask.assign(n * m, 1);
        std::uniform_int_distribution<std::size_t> corner(0, image_side - patch_side);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r0 = corner(rng);
            std::size_t c0 = corner(rng);
            for (std::size_t dr = 0; dr < patch_side; ++dr)
                for (std::size_t dc = 0; dc < patch_side; ++dc)
                    mask[i * m + (r0 + dr) * image_side + (c0 + dc)] = 0;
        }
        if (empty_columns(mask, n, m).empty()) return apply_mask_vector(full, mask);
    }
    for (std::size_t l : empty_columns(mask, n, m)) {
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        mask[pick(rng) * m + l] = 1;
    }
    return apply_mask_vector(full, mask);
}

IncompleteDataset inject(const IncompleteDataset& full, const MissingnessSpec& spec,
                         std::uint64_t seed) {
    switch (spec.kind) {
        case MissingnessKind::none: {
            require_fully_observed(full);
            return full;
        }
        case MissingnessKind::mcar_cap: return inject_mcar_cap(full, spec.cap, seed);
        case MissingnessKind::patch: return inject_patch(full, spec.image_side, spec.patch_side, seed);
    }
    throw validation_error("unknown missingness kind");
}

void write_mask_csv(const IncompleteDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (std::size_t i = 0; i < ds.rows; ++i) {
        for (std::size_t l = 0; l < ds.cols; ++l) {
            if (l) out << ',';
            out << (ds.observed(i, l) ? '1' : '0');
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed while writing " + path);
}

IncompleteDataset apply_mask_csv(const IncompleteDataset& full, const std::string& path) {
    require_fully_observed(full);
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open " + path);
    std::vector<std::uint8_t> mask;
    std::string line;
    std::size_t nrows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t width = 0;
        while (std::getline(ss, cell, ',')) {
            if (cell == "1") mask.push_back(1);
            else if (cell == "0") mask.push_back(0);
            else throw format_error(path + ": mask cells must be 0 or 1, got '" + cell + "'");
            ++width;
        }
        if (width != full.cols)
            throw validation_error(path + ": mask width " + std::to_string(width) +
                                   " does not match data width " + std::to_string(full.cols));
        ++nrows;
    }
    if (nrows != full.rows)
        throw validation_error(path + ": mask has " + std::to_string(nrows) +
                               " rows, data has " + std::to_string(full.rows));
    return apply_mask_vector(full, mask);
}

} // namespace fwpd
