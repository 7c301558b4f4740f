// Command line frontend: imputation, dissimilarity matrices, clustering,
// missingness injection, scoring and full method comparisons.

#include "fwpd/baselines.hpp"
#include "fwpd/dataset.hpp"
#include "fwpd/dissimilarity.hpp"
#include "fwpd/errors.hpp"
#include "fwpd/evaluation.hpp"
#include "fwpd/experiment.hpp"
#include "fwpd/hac.hpp"
#include "fwpd/kmeans.hpp"
#include "fwpd/missingness.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct CommonOpts {
    std::uint64_t seed = 1;
    double alpha = 0.25;
    std::string missing_token = "?";
    bool labels = false;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--seed", c.seed, "Seed for all stochastic steps");
    cmd->add_option("--alpha", c.alpha, "Distance/penalty trade-off in (0,1)");
    cmd->add_option("--missing-token", c.missing_token, "Cell token marking a missing value");
    cmd->add_flag("--labels", c.labels, "Treat the last CSV column as class labels");
}

std::string f4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Clustering of incompletely observed data with a feature-weighted penalty"};
    app.require_subcommand(1);

    // ---- impute ----
    CommonOpts imp_c;
    std::string imp_in, imp_out, imp_method = "mi";
    std::size_t imp_k = 5;
    double imp_fraction = 0.10, imp_tol = 1e-6;
    int imp_rounds = 100;
    auto* imp = app.add_subcommand("impute", "Fill missing cells and write a complete CSV");
    imp->add_option("--input", imp_in, "Input CSV")->required();
    imp->add_option("--output", imp_out, "Output CSV")->required();
    imp->add_option("--method", imp_method, "zi | mi | mi_class | knni | svdi");
    imp->add_option("--knn-k", imp_k, "Neighbor count for knni");
    imp->add_option("--eigen-fraction", imp_fraction, "Singular-vector fraction for svdi");
    imp->add_option("--max-rounds", imp_rounds, "Round cap for svdi");
    imp->add_option("--tol", imp_tol, "Convergence tolerance for svdi");
    add_common(imp, imp_c);

    // ---- dissim ----
    CommonOpts dis_c;
    std::string dis_in, dis_out;
    bool dis_absent = false, dis_plain = false;
    auto* dis = app.add_subcommand("dissim", "Write the pairwise dissimilarity matrix");
    dis->add_option("--input", dis_in, "Input CSV")->required();
    dis->add_option("--output", dis_out, "Output matrix CSV")->required();
    dis->add_flag("--absent", dis_absent,
                  "Treat gaps as structurally absent features (symmetric-difference penalty)");
    dis->add_flag("--plain", dis_plain, "Unpenalized observed distances only");
    add_common(dis, dis_c);

    // ---- kmeans ----
    CommonOpts km_c;
    std::string km_in, km_out, km_centroids, km_trace;
    std::size_t km_k = 2;
    int km_max_iter = 1000;
    bool km_standard = false;
    auto* km = app.add_subcommand("kmeans", "Cluster with penalized k-means");
    km->add_option("--input", km_in, "Input CSV")->required();
    km->add_option("--k", km_k, "Cluster count")->required();
    km->add_option("--output", km_out, "Output labels CSV")->required();
    km->add_option("--centroids-out", km_centroids, "Optional centroid CSV");
    km->add_option("--trace-out", km_trace, "Optional per-iteration trace CSV");
    km->add_option("--max-iter", km_max_iter, "Iteration cap");
    km->add_flag("--standard", km_standard,
                 "Plain squared-Euclidean k-means (requires complete data)");
    add_common(km, km_c);

    // ---- hac ----
    CommonOpts hc_c;
    std::string hc_in, hc_matrix, hc_out, hc_merges, hc_linkage = "al";
    std::size_t hc_k = 2;
    bool hc_plain = false;
    auto* hc = app.add_subcommand("hac", "Agglomerative clustering");
    hc->add_option("--input", hc_in, "Input CSV (penalized dissimilarity unless --plain)");
    hc->add_option("--matrix", hc_matrix, "Precomputed square dissimilarity CSV");
    hc->add_option("--linkage", hc_linkage, "sl | al | cl");
    hc->add_option("--k", hc_k, "Cluster count for the reported cut")->required();
    hc->add_option("--output", hc_out, "Output labels CSV")->required();
    hc->add_option("--merges-out", hc_merges, "Optional merge-table CSV");
    hc->add_flag("--plain", hc_plain, "Unpenalized observed distances");
    add_common(hc, hc_c);

    // ---- inject ----
    CommonOpts inj_c;
    std::string inj_in, inj_out, inj_spec, inj_mask_out, inj_mask_in;
    auto* inj = app.add_subcommand("inject", "Mask cells of fully observed data");
    inj->add_option("--input", inj_in, "Input CSV (fully observed)")->required();
    inj->add_option("--output", inj_out, "Output CSV with gaps")->required();
    inj->add_option("--spec", inj_spec, "none | mcar:<cap> | patch:<image>:<patch>");
    inj->add_option("--mask-out", inj_mask_out, "Write the applied 0/1 mask");
    inj->add_option("--mask-in", inj_mask_in, "Re-apply a previously exported mask");
    add_common(inj, inj_c);

    // ---- experiment ----
    CommonOpts exp_c;
    std::string exp_config;
    std::vector<std::string> exp_sets;
    auto* exp = app.add_subcommand("experiment", "Run a seeded method comparison");
    exp->add_option("--config", exp_config, "key = value configuration file")->required();
    exp->add_option("--set", exp_sets, "Override, e.g. --set runs=10")->take_all();
    add_common(exp, exp_c);

    // ---- score ----
    CommonOpts sc_c;
    std::string sc_pred, sc_truth;
    auto* sc = app.add_subcommand("score", "Agreement of two label files");
    sc->add_option("--pred", sc_pred, "Predicted labels, one per line")->required();
    sc->add_option("--truth", sc_truth, "Reference labels, one per line")->required();
    add_common(sc, sc_c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (imp->parsed()) {
            auto ds = fwpd::load_csv(imp_in, imp_c.missing_token, imp_c.labels);
            fwpd::CompletedDataset done;
            if (imp_method == "zi") done = fwpd::impute_zero(ds);
            else if (imp_method == "mi") done = fwpd::impute_mean(ds, false);
            else if (imp_method == "mi_class") done = fwpd::impute_mean(ds, true);
            else if (imp_method == "knni") done = fwpd::impute_knn(ds, imp_k);
            else if (imp_method == "svdi")
                done = fwpd::impute_svd(ds, imp_fraction, imp_rounds, imp_tol);
            else throw fwpd::validation_error("unknown imputation method '" + imp_method + "'");
            fwpd::write_csv(done.to_dataset(ds), imp_out, imp_c.missing_token);
            std::cerr << "imputed " << ds.rows << "x" << ds.cols << " with " << done.provenance
                      << "\n";
        } else if (dis->parsed()) {
            auto ds = fwpd::load_csv(dis_in, dis_c.missing_token, dis_c.labels);
            fwpd::DissimilarityMatrix m;
            if (dis_plain) {
                m = fwpd::observed_distance_matrix(ds);
            } else {
                auto ctx = fwpd::build_context(ds, dis_c.alpha);
                m = dis_absent ? fwpd::pairwise_matrix_absent(ctx, ds)
                               : fwpd::pairwise_matrix(ctx, ds);
            }
            fwpd::write_matrix_csv(m, dis_out);
        } else if (km->parsed()) {
            auto ds = fwpd::load_csv(km_in, km_c.missing_token, km_c.labels);
            if (km_standard) {
                if (!ds.fully_observed())
                    throw fwpd::validation_error("standard k-means needs fully observed data");
                auto res = fwpd::lloyd_seeded(ds.values, ds.rows, ds.cols, km_k, km_c.seed,
                                              km_max_iter);
                fwpd::write_labels_csv(res.membership, km_out);
                std::cerr << "converged=" << res.converged << " iterations=" << res.iterations
                          << " objective=" << res.objective << "\n";
            } else {
                auto ctx = fwpd::build_context(ds, km_c.alpha);
                auto res = fwpd::kmeans_fwpd(ds, ctx, km_k, km_c.seed, km_max_iter);
                fwpd::write_labels_csv(res.membership, km_out);
                if (!km_centroids.empty()) fwpd::write_centroids_csv(res.centroids, km_centroids);
                if (!km_trace.empty()) fwpd::write_trace_csv(res.trace, km_trace);
                std::cerr << "converged=" << res.trace.converged
                          << " iterations=" << res.trace.iterations
                          << " adjustments=" << res.trace.adjustments.size()
                          << " objective=" << res.objective << "\n";
            }
        } else if (hc->parsed()) {
            fwpd::DissimilarityMatrix m;
            if (!hc_matrix.empty()) {
                m = fwpd::load_matrix_csv(hc_matrix);
            } else if (!hc_in.empty()) {
                auto ds = fwpd::load_csv(hc_in, hc_c.missing_token, hc_c.labels);
                if (hc_plain) {
                    m = fwpd::observed_distance_matrix(ds);
                } else {
                    auto ctx = fwpd::build_context(ds, hc_c.alpha);
                    m = fwpd::pairwise_matrix(ctx, ds);
                }
            } else {
                throw fwpd::validation_error("hac needs --input or --matrix");
            }
            auto dend = fwpd::hac(m, fwpd::parse_linkage(hc_linkage));
            fwpd::Membership labels;
            for (int v : fwpd::cut(dend, hc_k)) labels.assignment.push_back(v - 1);
            fwpd::write_labels_csv(labels, hc_out);
            if (!hc_merges.empty()) fwpd::write_merges_csv(dend, hc_merges);
        } else if (inj->parsed()) {
            auto ds = fwpd::load_csv(inj_in, inj_c.missing_token, inj_c.labels);
            fwpd::IncompleteDataset masked;
            if (!inj_mask_in.empty()) {
                masked = fwpd::apply_mask_csv(ds, inj_mask_in);
            } else if (!inj_spec.empty()) {
                masked = fwpd::inject(ds, fwpd::parse_missingness(inj_spec), inj_c.seed);
            } else {
                throw fwpd::validation_error("inject needs --spec or --mask-in");
            }
            fwpd::write_csv(masked, inj_out, inj_c.missing_token);
            if (!inj_mask_out.empty()) fwpd::write_mask_csv(masked, inj_mask_out);
        } else if (exp->parsed()) {
            auto cfg = fwpd::load_config(exp_config);
            for (const std::string& kv : exp_sets) {
                auto eq = kv.find('=');
                if (eq == std::string::npos)
                    throw fwpd::validation_error("override '" + kv + "' is not key=value");
                fwpd::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
            }
            if (exp->count("--seed")) cfg.base_seed = exp_c.seed;
            if (exp->count("--alpha")) cfg.alpha = exp_c.alpha;
            if (exp->count("--missing-token")) cfg.missing_token = exp_c.missing_token;
            auto rep = fwpd::run_experiment(cfg);
            fwpd::write_report(rep, cfg.output_dir);
            for (const auto& m : rep.methods)
                std::cout << m.name << " nmi=" << f4(m.nmi_mean) << "±" << f4(m.nmi_sd)
                          << " ari=" << f4(m.ari_mean) << "±" << f4(m.ari_sd) << "\n";
            std::cerr << "report written to " << cfg.output_dir << "\n";
        } else if (sc->parsed()) {
            auto pred = fwpd::load_labels_csv(sc_pred);
            auto truth = fwpd::load_labels_csv(sc_truth);
            std::cout << "nmi=" << f4(fwpd::nmi(pred, truth)) << "\n";
            std::cout << "ari=" << f4(fwpd::ari(pred, truth)) << "\n";
        }
    } catch (const fwpd::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
