#include "fwpd/dataset.hpp"
#include "fwpd/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace fwpd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

} // namespace

// ---- FeatureSet ------------------------------------------------------------

std::size_t FeatureSet::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t(1)));
}

bool FeatureSet::is_subset_of(const FeatureSet& other) const {
    for (std::size_t l = 0; l < bits_.size(); ++l)
        if (bits_[l] && !other.bits_[l]) return false;
    return true;
}

FeatureSet FeatureSet::intersect(const FeatureSet& other) const {
    FeatureSet r(bits_.size());
    for (std::size_t l = 0; l < bits_.size(); ++l) r.bits_[l] = bits_[l] & other.bits_[l];
    return r;
}

FeatureSet FeatureSet::unite(const FeatureSet& other) const {
    FeatureSet r(bits_.size());
    for (std::size_t l = 0; l < bits_.size(); ++l) r.bits_[l] = bits_[l] | other.bits_[l];
    return r;
}

FeatureSet FeatureSet::difference(const FeatureSet& other) const {
    FeatureSet r(bits_.size());
    for (std::size_t l = 0; l < bits_.size(); ++l) r.bits_[l] = bits_[l] & ~other.bits_[l] & 1;
    return r;
}

FeatureSet FeatureSet::complement() const {
    FeatureSet r(bits_.size());
    for (std::size_t l = 0; l < bits_.size(); ++l) r.bits_[l] = bits_[l] ^ 1;
    return r;
}

std::vector<std::size_t> FeatureSet::elements() const {
    std::vector<std::size_t> out;
    for (std::size_t l = 0; l < bits_.size(); ++l)
        if (bits_[l]) out.push_back(l);
    return out;
}

// ---- IncompleteDataset -----------------------------------------------------

bool IncompleteDataset::fully_observed() const {
    return std::all_of(mask.begin(), mask.end(), [](std::uint8_t b) { return b != 0; });
}

FeatureSet IncompleteDataset::feature_set(std::size_t i) const {
    FeatureSet g(cols);
    for (std::size_t l = 0; l < cols; ++l)
        if (observed(i, l)) g.insert(l);
    return g;
}

std::vector<FeatureSet> IncompleteDataset::feature_sets() const {
    std::vector<FeatureSet> out;
    out.reserve(rows);
    for (std::size_t i = 0; i < rows; ++i) out.push_back(feature_set(i));
    return out;
}

void IncompleteDataset::set_cell(std::size_t i, std::size_t l, double v) {
    values[i * cols + l] = v;
    mask[i * cols + l] = 1;
}

void IncompleteDataset::clear_cell(std::size_t i, std::size_t l) {
    values[i * cols + l] = kNaN;
    mask[i * cols + l] = 0;
}

void IncompleteDataset::validate() const {
    if (rows == 0 || cols == 0) throw validation_error("dataset is empty");
    if (values.size() != rows * cols || mask.size() != rows * cols)
        throw validation_error("dataset storage does not match its declared shape");
    for (std::size_t i = 0; i < rows; ++i) {
        bool any = false;
        for (std::size_t l = 0; l < cols; ++l) {
            bool ob = observed(i, l);
            bool finite = std::isfinite(value(i, l));
            if (ob && !finite)
                throw validation_error("row " + std::to_string(i) +
                                       " has a non-finite observed value in column " +
                                       std::to_string(l));
            if (!ob && !std::isnan(value(i, l)))
                throw validation_error("row " + std::to_string(i) +
                                       " stores a value in unobserved column " + std::to_string(l));
            any = any || ob;
        }
        if (!any) throw validation_error("row " + std::to_string(i) + " observes no features");
    }
    for (std::size_t l = 0; l < cols; ++l) {
        bool any = false;
        for (std::size_t i = 0; i < rows && !any; ++i) any = observed(i, l);
        if (!any) throw validation_error("column " + std::to_string(l) + " is observed by no instance");
    }
    if (!labels.empty() && labels.size() != rows)
        throw validation_error("label count does not match row count");
}

IncompleteDataset dataset_from_rows(const std::vector<std::vector<double>>& rows_in,
                                    std::vector<int> labels) {
    if (rows_in.empty()) throw validation_error("dataset is empty");
    IncompleteDataset ds;
    ds.rows = rows_in.size();
    ds.cols = rows_in.front().size();
    ds.values.assign(ds.rows * ds.cols, kNaN);
    ds.mask.assign(ds.rows * ds.cols, 0);
    for (std::size_t i = 0; i < ds.rows; ++i) {
        if (rows_in[i].size() != ds.cols)
            throw format_error("row " + std::to_string(i) + " has " +
                               std::to_string(rows_in[i].size()) + " cells, expected " +
                               std::to_string(ds.cols));
        for (std::size_t l = 0; l < ds.cols; ++l)
            if (!std::isnan(rows_in[i][l])) ds.set_cell(i, l, rows_in[i][l]);
    }
    ds.labels = std::move(labels);
    if (!ds.labels.empty()) {
        int maxid = *std::max_element(ds.labels.begin(), ds.labels.end());
        ds.label_names.resize(static_cast<std::size_t>(maxid) + 1);
        for (std::size_t c = 0; c < ds.label_names.size(); ++c)
            ds.label_names[c] = std::to_string(c);
    }
    ds.validate();
    return ds;
}

IncompleteDataset load_csv(const std::string& path, const std::string& missing_token,
                           bool has_labels) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open " + path);

    std::vector<std::vector<std::string>> raw;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        raw.push_back(split_fields(line));
    }
    if (raw.empty()) throw format_error(path + ": no rows");

    const std::size_t width = raw.front().size();
    for (std::size_t r = 0; r < raw.size(); ++r)
        if (raw[r].size() != width)
            throw format_error(path + ": row " + std::to_string(r + 1) + " has " +
                               std::to_string(raw[r].size()) + " cells, expected " +
                               std::to_string(width));
    if (has_labels && width < 2) throw format_error(path + ": too few columns for a label column");
    const std::size_t ncols = has_labels ? width - 1 : width;
    if (ncols == 0) throw format_error(path + ": no feature columns");

    auto is_missing = [&](const std::string& s) { return s.empty() || s == missing_token; };

    // Header heuristic: a first row whose feature cells are all non-numeric
    // and non-missing is a header. A mixed first row is malformed.
    std::size_t numeric = 0, textual = 0;
    for (std::size_t l = 0; l < ncols; ++l) {
        const std::string& cell = raw[0][l];
        if (is_missing(cell)) continue;
        double v;
        if (parse_double(cell, v)) ++numeric; else ++textual;
    }
    bool header = textual > 0 && numeric == 0;
    if (textual > 0 && numeric > 0)
        throw format_error(path + ": first row mixes numeric and non-numeric feature cells");

    IncompleteDataset ds;
    if (header) {
        ds.feature_names.assign(raw[0].begin(), raw[0].begin() + ncols);
    }
    const std::size_t first_data = header ? 1 : 0;
    if (first_data >= raw.size()) throw format_error(path + ": header but no data rows");

    ds.rows = raw.size() - first_data;
    ds.cols = ncols;
    ds.values.assign(ds.rows * ds.cols, kNaN);
    ds.mask.assign(ds.rows * ds.cols, 0);

    std::unordered_map<std::string, int> label_ids;
    for (std::size_t r = 0; r < ds.rows; ++r) {
        const auto& cells = raw[first_data + r];
        for (std::size_t l = 0; l < ncols; ++l) {
            const std::string& cell = cells[l];
            if (is_missing(cell)) continue;
            double v;
            if (!parse_double(cell, v))
                throw format_error(path + ": row " + std::to_string(first_data + r + 1) +
                                   ", column " + std::to_string(l + 1) + ": cannot parse '" +
                                   cell + "' as a number");
            ds.set_cell(r, l, v);
        }
        if (has_labels) {
            const std::string& tok = cells[ncols];
            if (tok.empty())
                throw format_error(path + ": row " + std::to_string(first_data + r + 1) +
                                   " has an empty label");
            auto it = label_ids.find(tok);
            if (it == label_ids.end()) {
                int id = static_cast<int>(label_ids.size());
                it = label_ids.emplace(tok, id).first;
                ds.label_names.push_back(tok);
            }
            ds.labels.push_back(it->second);
        }
    }
    ds.validate();
    return ds;
}

void write_csv(const IncompleteDataset& ds, const std::string& path,
               const std::string& missing_token) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    if (!ds.feature_names.empty()) {
        for (std::size_t l = 0; l < ds.cols; ++l) {
            if (l) out << ',';
            out << ds.feature_names[l];
        }
        if (ds.has_labels()) out << ",label";
        out << '\n';
    }
    for (std::size_t i = 0; i < ds.rows; ++i) {
        for (std::size_t l = 0; l < ds.cols; ++l) {
            if (l) out << ',';
            out << (ds.observed(i, l) ? fmt(ds.value(i, l)) : missing_token);
        }
        if (ds.has_labels()) out << ',' << ds.label_names[ds.labels[i]];
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed while writing " + path);
}

ObservationWeights observation_weights(const IncompleteDataset& ds) {
    ObservationWeights ow;
    ow.w.assign(ds.cols, 0);
    for (std::size_t i = 0; i < ds.rows; ++i)
        for (std::size_t l = 0; l < ds.cols; ++l)
            if (ds.observed(i, l)) ++ow.w[l];
    ow.total = std::accumulate(ow.w.begin(), ow.w.end(), 0LL);
    return ow;
}

FeatureStats observed_feature_stats(const IncompleteDataset& ds) {
    FeatureStats st;
    st.mean.assign(ds.cols, 0.0);
    st.sd.assign(ds.cols, 1.0);
    for (std::size_t l = 0; l < ds.cols; ++l) {
        double sum = 0.0;
        std::size_t cnt = 0;
        for (std::size_t i = 0; i < ds.rows; ++i)
            if (ds.observed(i, l)) { sum += ds.value(i, l); ++cnt; }
        double mean = sum / static_cast<double>(cnt);
        double ss = 0.0;
        for (std::size_t i = 0; i < ds.rows; ++i)
            if (ds.observed(i, l)) { double d = ds.value(i, l) - mean; ss += d * d; }
        double var = ss / static_cast<double>(cnt); // population variance
        st.mean[l] = mean;
        st.sd[l] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return st;
}

IncompleteDataset normalize_zscore(const IncompleteDataset& ds) {
    FeatureStats st = observed_feature_stats(ds);
    IncompleteDataset out = ds;
    for (std::size_t i = 0; i < ds.rows; ++i)
        for (std::size_t l = 0; l < ds.cols; ++l)
            if (ds.observed(i, l))
                out.values[i * ds.cols + l] = (ds.value(i, l) - st.mean[l]) / st.sd[l];
    return out;
}

} // namespace fwpd
