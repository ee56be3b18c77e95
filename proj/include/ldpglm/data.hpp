#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ldpglm/pipeline.hpp"

namespace ldpglm {

enum class DesignKind { Bernoulli, Gaussian };

// Response model for synthetic labels: logistic classification by default,
// or y = f(<x, w*>) + noise with noise ~ Uniform[-C, C].
struct NonlinearLabelModel {
    std::string link = "cubic";
    double noise_bound = 0.001;  // C
};

struct SynthSpec {
    DesignKind design = DesignKind::Bernoulli;
    int p = 10;
    Eigen::VectorXd w_star;
    std::optional<NonlinearLabelModel> nonlinear;  // absent => logistic labels
    long n_private = 0;
    long m_public = 0;
    std::uint64_t seed = 0;
};

// Bernoulli: entries +-1/p with probability 1/2 each (row l1 norm exactly 1).
// Gaussian: entries i.i.d. N(0, 1/p). Public pool drawn from the same
// marginal. Row `row` of stream `stream_tag` depends only on (seed,
// stream_tag, row), so generation order is irrelevant.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> gen_design(const SynthSpec& spec);

// Labels for a feature block; `stream_tag` separates e.g. train from test.
Eigen::VectorXd gen_labels(const Eigen::MatrixXd& features,
                           const SynthSpec& spec,
                           std::uint64_t stream_tag = 0);

// gen_design + gen_labels wrapped as pipeline datasets. For the gaussian
// design, bounds.r is set to the realized max row l1 norm (the l1 bound
// holds only with high probability there).
std::pair<Dataset, Dataset> gen_synthetic(const SynthSpec& spec);

// ---- CSV ingestion -------------------------------------------------------

struct IngestSpec {
    std::string path;
    std::string label_column;
    double positive_class = 1.0;
    std::vector<std::string> drop_columns;
    double r_target = 1.0;
    double train_fraction = 1.0;
    std::optional<long> train_count;  // overrides train_fraction when set
    std::optional<long> subsample;    // keep only this many rows (post-shuffle)
    std::uint64_t seed = 0;
};

struct RawTable {
    std::vector<std::string> columns;
    Eigen::MatrixXd cells;  // one row per record, parsed numeric
};

// Comma-separated, first row header, '.' decimal. Throws ParseError with
// row/column location on a non-numeric cell.
RawTable load_csv(const IngestSpec& spec);

struct PreprocessResult {
    Dataset train;
    Dataset test;
    std::vector<std::string> feature_names;   // after drops
    std::vector<std::string> dropped_degenerate;  // zero train variance
    long rescaled_test_rows = 0;  // test rows individually pulled into the ball
    double scale = 1.0;           // global train-split l1 rescale factor
};

// Drop declared columns, binarize the label against positive_class,
// standardize per feature with train-split statistics, rescale globally so
// max train row l1 norm == r_target, seeded shuffle + split.
PreprocessResult preprocess(const RawTable& table, const IngestSpec& spec);

PreprocessResult ingest(const IngestSpec& spec);

}  // namespace ldpglm
