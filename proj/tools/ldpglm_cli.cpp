#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "ldpglm/baselines.hpp"
#include "ldpglm/data.hpp"
#include "ldpglm/harness.hpp"
#include "ldpglm/pipeline.hpp"

using nlohmann::json;
using namespace ldpglm;

namespace {

int cmd_sweep(const std::string& config_path, const std::string& out_path) {
    ExperimentConfig config = parse_config(config_path);
    SweepSummary summary = sweep(config, out_path);
    std::cout << "cells=" << summary.cells << " rows=" << summary.rows
              << " failed_trials=" << summary.failed_trials
              << " seconds=" << summary.seconds << "\n"
              << "raw: " << out_path << "\naggregate: " << out_path
              << ".agg.csv\n";
    return 0;
}

Dataset load_dataset(const std::string& path, const std::string& label_column,
                     double r, double r2, double C) {
    IngestSpec spec;
    spec.path = path;
    RawTable table = load_csv(spec);

    Dataset ds;
    ds.bounds.r = r;
    ds.bounds.r2 = r2;
    ds.bounds.C = C;
    ds.provenance = Provenance::Ingested;

    long label_idx = -1;
    if (!label_column.empty()) {
        for (std::size_t j = 0; j < table.columns.size(); ++j)
            if (table.columns[j] == label_column)
                label_idx = static_cast<long>(j);
        if (label_idx < 0)
            throw MissingColumn("label column '" + label_column +
                                "' not found in " + path);
    }

    const long n = table.cells.rows();
    const long ncols = table.cells.cols();
    const long nfeat = label_idx >= 0 ? ncols - 1 : ncols;
    ds.features.resize(n, nfeat);
    Eigen::VectorXd labels(n);
    for (long i = 0; i < n; ++i) {
        long k = 0;
        for (long j = 0; j < ncols; ++j) {
            if (j == label_idx)
                labels(i) = table.cells(i, j);
            else
                ds.features(i, k++) = table.cells(i, j);
        }
    }
    if (label_idx >= 0) ds.labels = std::move(labels);
    return ds;
}

int cmd_estimate(const std::string& mode_str, const std::string& link_name,
                 const std::string& epsilon_str, double delta,
                 const std::string& private_path,
                 const std::string& public_path,
                 const std::string& label_column, double r, double r2,
                 double C, bool augment, std::uint64_t seed) {
    const Mode mode = mode_str == "nlr" ? Mode::Nlr : Mode::Glm;
    const LinkFunction& link = get_link(link_name);

    PrivacyParams priv;
    priv.epsilon = epsilon_str == "inf"
                       ? std::numeric_limits<double>::infinity()
                       : std::stod(epsilon_str);
    priv.delta = delta;

    Dataset private_data = load_dataset(private_path, label_column, r, r2, C);
    Dataset public_data = load_dataset(public_path, "", r, r2, C);
    if (mode == Mode::Nlr) private_data.bounds.y_bound =
        std::numeric_limits<double>::infinity();

    EstimateOptions opts;
    opts.augment = augment;
    opts.seed = seed;
    EstimatorOutput out =
        estimate(mode, private_data, public_data, link, priv, opts);

    json record;
    record["mode"] = mode_str;
    record["link"] = link_name;
    record["epsilon"] = epsilon_str;
    record["delta"] = priv.disabled() ? json("-") : json(delta);
    record["n_private"] = private_data.n();
    record["m_public"] = public_data.n();
    record["c_hat"] = out.c_hat;
    record["w_ols"] = std::vector<double>(
        out.w_ols.data(), out.w_ols.data() + out.w_ols.size());
    record["w_final"] = std::vector<double>(
        out.w_final.data(), out.w_final.data() + out.w_final.size());
    record["calibration"] = {
        {"method", out.calibration.method == CalibrationMethod::Newton
                       ? "newton"
                       : "bisection"},
        {"iterations", out.calibration.iterations},
        {"residual", out.calibration.residual}};
    record["ols"] = {{"min_singular", out.ols_diag.min_singular_estimate},
                     {"max_singular", out.ols_diag.max_singular_estimate},
                     {"condition_warning", out.ols_diag.condition_warning}};
    record["augmented"] = out.augmented;
    record["privacy_warning"] = out.privacy_warning;
    std::cout << record.dump() << "\n";
    return 0;
}

IngestSpec parse_ingest_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open spec '" + path + "'");
    IngestSpec spec;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string()
                                          : s.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value': " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "path" || key == "csv_path") spec.path = value;
        else if (key == "label_column") spec.label_column = value;
        else if (key == "positive_class") spec.positive_class = std::stod(value);
        else if (key == "drop_columns") {
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!trim(item).empty()) spec.drop_columns.push_back(trim(item));
        }
        else if (key == "r_target") spec.r_target = std::stod(value);
        else if (key == "train_fraction") spec.train_fraction = std::stod(value);
        else if (key == "train_count") spec.train_count = std::stol(value);
        else if (key == "subsample") spec.subsample = std::stol(value);
        else if (key == "seed") spec.seed = std::stoull(value);
        else throw ConfigError("unknown ingest key '" + key + "'");
    }
    if (spec.path.empty() || spec.label_column.empty())
        throw ConfigError("ingest spec needs path and label_column");
    return spec;
}

void write_dataset_csv(const Dataset& ds,
                       const std::vector<std::string>& feature_names,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    for (const auto& name : feature_names) out << name << ',';
    out << "y\n";
    char buf[64];
    for (long i = 0; i < ds.n(); ++i) {
        for (long j = 0; j < ds.p(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", ds.features(i, j));
            out << buf << ',';
        }
        std::snprintf(buf, sizeof(buf), "%g", (*ds.labels)(i));
        out << buf << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

int cmd_ingest(const std::string& spec_path, const std::string& out_train,
               const std::string& out_test) {
    IngestSpec spec = parse_ingest_spec(spec_path);
    PreprocessResult result = ingest(spec);
    write_dataset_csv(result.train, result.feature_names, out_train);
    write_dataset_csv(result.test, result.feature_names, out_test);
    std::cout << "train_rows=" << result.train.n()
              << " test_rows=" << result.test.n()
              << " features=" << result.train.p()
              << " scale=" << result.scale
              << " rescaled_test_rows=" << result.rescaled_test_rows << "\n";
    for (const auto& name : result.dropped_degenerate)
        std::cout << "warning: dropped zero-variance feature '" << name
                  << "'\n";
    return 0;
}

int cmd_verify_constants(long samples, std::uint64_t seed) {
    struct Check {
        std::string name;
        McEstimate est;
        double threshold;
    };
    const int p = 100;
    const Eigen::VectorXd w_ols = Eigen::VectorXd::Constant(
        p, 1.0 / 20.0);  // ||w||_2 = sqrt(p)/20
    const Eigen::VectorXd w_star = Eigen::VectorXd::Constant(
        p, 1.0 / 4.0);   // ||w||_2 = sqrt(p)/4

    std::vector<Check> checks;
    checks.push_back({"logistic f(6) > 1.22 (MC margin 1.15)",
                      population_f_mc(get_link("logistic"), w_ols, 6.0,
                                      samples, seed),
                      1.15});
    checks.push_back({"boosting f(6) > 1.22 (MC margin 1.15)",
                      population_f_mc(get_link("boosting"), w_ols, 6.0,
                                      samples, seed + 1),
                      1.15});
    checks.push_back({"logistic E[Phi''(<x,w*>)] > 1/6",
                      population_f_mc(get_link("logistic"), w_star, 1.0,
                                      samples, seed + 2),
                      1.0 / 6.0});

    bool all_pass = true;
    for (const auto& c : checks) {
        const bool pass = c.est.value > c.threshold;
        all_pass = all_pass && pass;
        std::cout << (pass ? "PASS" : "FAIL") << "  " << c.name
                  << "  estimate=" << c.est.value
                  << " std_error=" << c.est.std_error
                  << " samples=" << c.est.samples
                  << " threshold=" << c.threshold << "\n";
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Locally private GLM / non-linear regression estimator"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a declarative sweep");
    sweep_cmd->add_option("--config", config_path, "config file")->required();
    sweep_cmd->add_option("--out", out_path, "raw metrics CSV")->required();

    std::string mode = "glm", link = "logistic", epsilon = "1";
    double delta = 0.1, r = 1.0, r2 = 0.0, C = 0.0;
    std::string private_path, public_path, label_column = "y";
    bool augment = false;
    std::uint64_t seed = 0;
    auto* est_cmd = app.add_subcommand("estimate", "one estimate from CSVs");
    est_cmd->add_option("--mode", mode, "glm or nlr");
    est_cmd->add_option("--link", link, "link function name");
    est_cmd->add_option("--epsilon", epsilon, "privacy epsilon, or 'inf'");
    est_cmd->add_option("--delta", delta, "privacy delta");
    est_cmd->add_option("--private", private_path, "labeled private CSV")
        ->required();
    est_cmd->add_option("--public", public_path, "unlabeled public CSV")
        ->required();
    est_cmd->add_option("--label-column", label_column,
                        "label column in the private CSV");
    est_cmd->add_option("--r", r, "declared l1 feature bound");
    est_cmd->add_option("--r2", r2,
                        "declared l2 feature radius for noise calibration "
                        "(default: use --r)");
    est_cmd->add_option("--noise-bound", C, "nlr response noise bound");
    est_cmd->add_flag("--augment", augment, "public covariance augmentation");
    est_cmd->add_option("--seed", seed, "master seed");

    std::string spec_path, out_train, out_test;
    auto* ing_cmd = app.add_subcommand("ingest", "preprocess a CSV dataset");
    ing_cmd->add_option("--spec", spec_path, "ingest spec file")->required();
    ing_cmd->add_option("--out-train", out_train, "train CSV")->required();
    ing_cmd->add_option("--out-test", out_test, "test CSV")->required();

    long samples = 1000000;
    std::uint64_t vc_seed = 20240901;
    auto* vc_cmd = app.add_subcommand(
        "verify-constants", "Monte-Carlo checks of the calibration constants");
    vc_cmd->add_option("--samples", samples, "samples per check");
    vc_cmd->add_option("--seed", vc_seed, "seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep_cmd->parsed()) return cmd_sweep(config_path, out_path);
        if (est_cmd->parsed())
            return cmd_estimate(mode, link, epsilon, delta, private_path,
                                public_path, label_column, r, r2, C, augment,
                                seed);
        if (ing_cmd->parsed()) return cmd_ingest(spec_path, out_train, out_test);
        if (vc_cmd->parsed()) return cmd_verify_constants(samples, vc_seed);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
