#include "fwpd/experiment.hpp"
#include "fwpd/baselines.hpp"
#include "fwpd/errors.hpp"
#include "fwpd/kmeans.hpp"
#include "fwpd/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace fwpd {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw validation_error("cannot parse boolean '" + v + "'");
}

} // namespace

MethodSpec parse_method(const std::string& text) {
    MethodSpec spec;
    spec.name = text;

    auto parse_imputer = [&](const std::string& tok) {
        auto colon = tok.find(':');
        std::string head = colon == std::string::npos ? tok : tok.substr(0, colon);
        std::string arg = colon == std::string::npos ? "" : tok.substr(colon + 1);
        if (head == "zi" || head == "mi" || head == "mi_class") {
            if (!arg.empty()) throw validation_error("imputer '" + head + "' takes no parameter");
            spec.imputer = head;
        } else if (head == "knni") {
            spec.imputer = head;
            if (!arg.empty()) {
                try {
                    spec.knn_k = static_cast<std::size_t>(std::stoul(arg));
                } catch (const std::exception&) {
                    throw validation_error("cannot parse neighbor count in '" + tok + "'");
                }
                if (spec.knn_k == 0) throw validation_error("neighbor count must be positive");
            }
        } else if (head == "svdi") {
            spec.imputer = head;
            if (!arg.empty()) {
                try {
                    spec.eigen_fraction = std::stod(arg);
                } catch (const std::exception&) {
                    throw validation_error("cannot parse eigenvector fraction in '" + tok + "'");
                }
            }
        } else {
            throw validation_error("unknown imputer '" + head + "'");
        }
    };

    auto plus = text.find('+');
    if (plus == std::string::npos) {
        if (text == "kmeans_fwpd") {
            spec.algo = MethodSpec::Algo::kmeans_fwpd;
            return spec;
        }
        if (text.rfind("hac_fwpd:", 0) == 0) {
            spec.algo = MethodSpec::Algo::hac_fwpd;
            spec.linkage = parse_linkage(text.substr(9));
            return spec;
        }
        throw validation_error("unknown method '" + text + "'");
    }

    std::string left = text.substr(0, plus);
    std::string right = text.substr(plus + 1);
    if (right == "kmeans") {
        if (left == "pds") throw validation_error("pds produces a matrix; pair it with hac");
        spec.algo = MethodSpec::Algo::impute_kmeans;
        parse_imputer(left);
        return spec;
    }
    if (right.rfind("hac:", 0) == 0) {
        spec.linkage = parse_linkage(right.substr(4));
        if (left == "pds") {
            spec.algo = MethodSpec::Algo::pds_hac;
            return spec;
        }
        spec.algo = MethodSpec::Algo::impute_hac;
        parse_imputer(left);
        return spec;
    }
    throw validation_error("unknown method '" + text + "'");
}

void ExperimentConfig::validate() const {
    if (dataset_path.empty()) throw validation_error("no dataset configured");
    if (methods.empty()) throw validation_error("no methods configured");
    if (runs < 1) throw validation_error("run count must be positive");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw validation_error("alpha must lie strictly between 0 and 1");
    if (!(significance > 0.0 && significance < 1.0))
        throw validation_error("significance level must lie strictly between 0 and 1");
    if (k == 1) throw validation_error("k must be at least 2");
    if (k == 0 && !has_labels)
        throw validation_error("k can only be inferred from a labeled dataset");
}

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    try {
        if (key == "dataset") cfg.dataset_path = value;
        else if (key == "missing_token") cfg.missing_token = value;
        else if (key == "has_labels") cfg.has_labels = parse_bool(value);
        else if (key == "methods") {
            cfg.methods.clear();
            std::stringstream ss(value);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                tok = trim(tok);
                if (!tok.empty()) cfg.methods.push_back(parse_method(tok));
            }
        } else if (key == "alpha") cfg.alpha = std::stod(value);
        else if (key == "k") cfg.k = static_cast<std::size_t>(std::stoul(value));
        else if (key == "runs") cfg.runs = static_cast<std::size_t>(std::stoul(value));
        else if (key == "seed") cfg.base_seed = std::stoull(value);
        else if (key == "missingness") cfg.missingness = parse_missingness(value);
        else if (key == "normalize") cfg.normalize = parse_bool(value);
        else if (key == "significance") cfg.significance = std::stod(value);
        else if (key == "output_dir") cfg.output_dir = value;
        else throw validation_error("unknown configuration key '" + key + "'");
    } catch (const validation_error&) {
        throw;
    } catch (const std::exception&) {
        throw validation_error("cannot parse value '" + value + "' for key '" + key + "'");
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open " + path);
    ExperimentConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw format_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::vector<int> run_method(const MethodSpec& spec, const IncompleteDataset& masked,
                            double alpha, std::size_t k, const Membership& init) {
    switch (spec.algo) {
        case MethodSpec::Algo::kmeans_fwpd: {
            DissimilarityContext ctx = build_context(masked, alpha);
            return kmeans_fwpd_with_init(masked, ctx, k, init).membership.assignment;
        }
        case MethodSpec::Algo::hac_fwpd: {
            DissimilarityContext ctx = build_context(masked, alpha);
            return cut(hac(pairwise_matrix(ctx, masked), spec.linkage), k);
        }
        case MethodSpec::Algo::pds_hac:
            return cut(hac(pds_matrix(masked), spec.linkage), k);
        case MethodSpec::Algo::impute_kmeans:
        case MethodSpec::Algo::impute_hac: {
            CompletedDataset completed;
            if (spec.imputer == "zi") completed = impute_zero(masked);
            else if (spec.imputer == "mi") completed = impute_mean(masked, false);
            else if (spec.imputer == "mi_class") completed = impute_mean(masked, true);
            else if (spec.imputer == "knni") completed = impute_knn(masked, spec.knn_k);
            else completed = impute_svd(masked, spec.eigen_fraction);
            if (spec.algo == MethodSpec::Algo::impute_kmeans)
                return lloyd(completed.values, completed.rows, completed.cols, k, init)
                    .membership.assignment;
            return cut(hac(observed_distance_matrix(completed.to_dataset(masked)), spec.linkage),
                       k);
        }
    }
    throw std::runtime_error("unreachable method dispatch");
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

} // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    IncompleteDataset raw = load_csv(cfg.dataset_path, cfg.missing_token, cfg.has_labels);
    if (!raw.fully_observed())
        throw validation_error("experiment datasets must be fully observed before injection");

    IncompleteDataset full = cfg.normalize ? normalize_zscore(raw) : raw;
    const std::size_t n = full.rows;

    std::size_t k = cfg.k;
    if (k == 0) {
        k = static_cast<std::size_t>(
                *std::max_element(full.labels.begin(), full.labels.end())) + 1;
        if (k < 2) throw validation_error("dataset has fewer than two label classes");
    }

    bool need_km_ref = std::any_of(cfg.methods.begin(), cfg.methods.end(),
                                   [](const MethodSpec& m) { return m.uses_kmeans_reference(); });
    std::vector<Linkage> hac_links;
    for (const MethodSpec& m : cfg.methods)
        if (m.algo == MethodSpec::Algo::hac_fwpd || m.algo == MethodSpec::Algo::impute_hac ||
            m.algo == MethodSpec::Algo::pds_hac)
            if (std::find(hac_links.begin(), hac_links.end(), m.linkage) == hac_links.end())
                hac_links.push_back(m.linkage);

    // HAC on the fully observed data does not depend on the run seed.
    std::map<Linkage, std::vector<int>> hac_refs;
    if (!hac_links.empty()) {
        DissimilarityMatrix eu = observed_distance_matrix(full);
        for (Linkage L : hac_links) hac_refs[L] = cut(hac(eu, L), k);
    }

    ExperimentReport rep;
    rep.config = cfg;
    rep.methods.resize(cfg.methods.size());
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
        rep.methods[mi].name = cfg.methods[mi].name;

    for (std::size_t r = 0; r < cfg.runs; ++r) {
        const std::uint64_t seed_r = cfg.base_seed + r;
        rep.run_seeds.push_back(seed_r);

        IncompleteDataset masked = inject(full, cfg.missingness, seed_r);
        Membership init = init_random(n, k, seed_r);

        std::uint64_t fp = fnv1a(0xcbf29ce484222325ULL, masked.mask.data(), masked.mask.size());
        fp = fnv1a(fp, init.assignment.data(), init.assignment.size() * sizeof(int));
        rep.run_fingerprints.push_back(hex64(fp));

        std::vector<int> km_ref;
        if (need_km_ref)
            km_ref = lloyd(full.values, n, full.cols, k, init).membership.assignment;

        for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
            const MethodSpec& spec = cfg.methods[mi];
            std::vector<int> labels = run_method(spec, masked, cfg.alpha, k, init);
            const std::vector<int>& ref =
                spec.uses_kmeans_reference() ? km_ref : hac_refs.at(spec.linkage);
            rep.methods[mi].nmi_scores.push_back(nmi(labels, ref));
            rep.methods[mi].ari_scores.push_back(ari(labels, ref));
        }
    }

    for (MethodOutcome& m : rep.methods) {
        m.nmi_mean = mean_of(m.nmi_scores);
        m.nmi_sd = sample_sd(m.nmi_scores);
        m.ari_mean = mean_of(m.ari_scores);
        m.ari_sd = sample_sd(m.ari_scores);
    }

    auto ref_it = std::find_if(cfg.methods.begin(), cfg.methods.end(),
                               [](const MethodSpec& m) { return m.is_fwpd(); });
    if (ref_it != cfg.methods.end() && cfg.methods.size() > 1 && cfg.runs > 1) {
        std::size_t ri = static_cast<std::size_t>(ref_it - cfg.methods.begin());
        rep.reference = cfg.methods[ri].name;
        for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
            if (mi == ri) continue;
            MethodComparison cmp;
            cmp.name = rep.methods[mi].name;
            cmp.nmi_cmp = compare_scores(rep.methods[ri].nmi_scores, rep.methods[mi].nmi_scores,
                                         cfg.significance);
            cmp.ari_cmp = compare_scores(rep.methods[ri].ari_scores, rep.methods[mi].ari_scores,
                                         cfg.significance);
            rep.wtl.push_back(std::move(cmp));
        }
    }
    return rep;
}

namespace {

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

} // namespace

void write_report(const ExperimentReport& rep, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
        throw std::runtime_error("cannot create output directory " + out_dir);

    {
        auto out = open_out(fs::path(out_dir) / "summary.csv");
        out << "method,nmi_mean,nmi_sd,ari_mean,ari_sd\n";
        for (const MethodOutcome& m : rep.methods)
            out << m.name << ',' << fixed4(m.nmi_mean) << ',' << fixed4(m.nmi_sd) << ','
                << fixed4(m.ari_mean) << ',' << fixed4(m.ari_sd) << '\n';
    }
    {
        auto out = open_out(fs::path(out_dir) / "runs.csv");
        out << "run,method,nmi,ari\n";
        for (std::size_t r = 0; r < rep.run_seeds.size(); ++r)
            for (const MethodOutcome& m : rep.methods)
                out << r << ',' << m.name << ',' << fixed4(m.nmi_scores[r]) << ','
                    << fixed4(m.ari_scores[r]) << '\n';
    }
    {
        auto out = open_out(fs::path(out_dir) / "seeds.csv");
        out << "run,seed,fingerprint\n";
        for (std::size_t r = 0; r < rep.run_seeds.size(); ++r)
            out << r << ',' << rep.run_seeds[r] << ',' << rep.run_fingerprints[r] << '\n';
    }
    {
        auto out = open_out(fs::path(out_dir) / "wtl.csv");
        out << "method,vs,nmi_p,nmi_verdict,ari_p,ari_verdict\n";
        for (const MethodComparison& c : rep.wtl)
            out << rep.reference << ',' << c.name << ',' << fixed4(c.nmi_cmp.p_value) << ','
                << verdict_name(c.nmi_cmp.verdict) << ',' << fixed4(c.ari_cmp.p_value) << ','
                << verdict_name(c.ari_cmp.verdict) << '\n';
    }
    {
        auto out = open_out(fs::path(out_dir) / "summary.md");
        const ExperimentConfig& cfg = rep.config;
        out << "# Clustering comparison\n\n";
        out << "- dataset: " << cfg.dataset_path << "\n";
        out << "- missingness: " << cfg.missingness.describe() << "\n";
        out << "- alpha: " << cfg.alpha << ", runs: " << cfg.runs
            << ", base seed: " << cfg.base_seed << "\n\n";
        out << "| method | nmi | ari |\n|---|---|---|\n";
        for (const MethodOutcome& m : rep.methods)
            out << "| " << m.name << " | " << fixed4(m.nmi_mean) << " ± " << fixed4(m.nmi_sd)
                << " | " << fixed4(m.ari_mean) << " ± " << fixed4(m.ari_sd) << " |\n";
        if (!rep.wtl.empty()) {
            out << "\n## " << rep.reference << " versus the rest\n\n";
            out << "| method | nmi p | nmi | ari p | ari |\n|---|---|---|---|---|\n";
            for (const MethodComparison& c : rep.wtl)
                out << "| " << c.name << " | " << fixed4(c.nmi_cmp.p_value) << " | "
                    << verdict_name(c.nmi_cmp.verdict) << " | " << fixed4(c.ari_cmp.p_value)
                    << " | " << verdict_name(c.ari_cmp.verdict) << " |\n";
        }
    }
}

} // namespace fwpd
