#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ldpglm/data.hpp"
#include "ldpglm/pipeline.hpp"

namespace ldpglm {

// Declarative sweep over (epsilon, n, m, p) for one mode/link/design.
struct ExperimentConfig {
    Mode mode = Mode::Glm;
    std::string link = "logistic";
    std::string design = "bernoulli";  // bernoulli | gaussian | csv
    std::vector<double> epsilons;      // +inf encodes the noise-disabled run
    std::vector<long> ns;
    std::vector<long> ms;
    std::vector<int> ps;
    long trials = 200;
    std::vector<std::string> metrics;  // rel_inf, sq_rel_inf, rel_l2, accuracy
    bool delta_one_over_n = true;      // else delta_fixed
    double delta_fixed = 0.0;
    bool augment = false;
    std::uint64_t master_seed = 0;
    double noise_C = 0.001;            // response noise bound for nlr
    long n_test = 10000;               // synthetic test-set size for accuracy
    std::optional<IngestSpec> ingest;  // required when design == csv
};

// Flat key = value text, '#' comments, comma-separated lists for axes.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::string& path);

struct MetricsRow {
    std::string mode, link, design;
    int p = 0;
    long n = 0, m = 0;
    std::string epsilon;  // "inf" for the disabled run
    std::string delta;    // "-" when epsilon is inf
    long trial = 0;
    std::string metric;
    double value = 0.0;   // nan when stage_error is set
    std::string calib_method;
    bool condition_warning = false;
    std::string stage_error;  // empty on success
};

extern const char* const kCsvHeader;
std::string to_csv(const MetricsRow& row);

struct Cell {
    int p = 0;
    long n = 0, m = 0;
    double epsilon = 0.0;
    std::size_t index = 0;  // position in the cross product, seeds derive from it
};

std::vector<Cell> expand_cells(const ExperimentConfig& config);

// Runs one (cell, trial) point and emits one raw row per requested metric.
// Estimator failures never throw; they populate stage_error instead.
// `ingested` carries the preprocessed splits when design == csv.
std::vector<MetricsRow> run_trial(const ExperimentConfig& config,
                                  const Cell& cell, long trial_index,
                                  const PreprocessResult* ingested = nullptr);

// rel_inf / sq_rel_inf / rel_l2 of an estimate against the truth.
double error_metric(const std::string& metric, const Eigen::VectorXd& w_hat,
                    const Eigen::VectorXd& w_star);

struct AggregateRow {
    std::string mode, link, design;
    int p = 0;
    long n = 0, m = 0;
    std::string epsilon, delta, metric;
    long trials = 0;  // successful trials entering the aggregate
    double mean = 0.0;
    double std_error = 0.0;
};

std::vector<AggregateRow> aggregate_rows(const std::vector<MetricsRow>& rows);

struct SweepSummary {
    std::size_t cells = 0;
    std::size_t rows = 0;
    std::size_t failed_trials = 0;
    double seconds = 0.0;
};

// Full cross product; writes raw rows to `out_path` and per-cell aggregates
// to `<out_path>.agg.csv`. Reruns with the same config are byte-identical.
SweepSummary sweep(const ExperimentConfig& config, const std::string& out_path);

// In-memory variant used by tests and the acceptance suite.
std::vector<MetricsRow> run_sweep_rows(const ExperimentConfig& config);

}  // namespace ldpglm
