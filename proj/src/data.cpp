#include "ldpglm/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace ldpglm {

namespace {

constexpr std::uint64_t kPrivateRows = 1;
constexpr std::uint64_t kPublicRows = 2;
constexpr std::uint64_t kLabelRows = 3;

Eigen::MatrixXd gen_block(const SynthSpec& spec, long rows,
                          std::uint64_t tag) {
    Eigen::MatrixXd out(rows, spec.p);
    const double inv_p = 1.0 / static_cast<double>(spec.p);
    for (long i = 0; i < rows; ++i) {
        Rng rng(derive_seed(spec.seed, {tag, static_cast<std::uint64_t>(i)}));
        if (spec.design == DesignKind::Bernoulli) {
            for (int j = 0; j < spec.p; ++j)
                out(i, j) = (rng() >> 63) ? inv_p : -inv_p;
        } else {
            std::normal_distribution<double> normal(0.0, std::sqrt(inv_p));
            for (int j = 0; j < spec.p; ++j) out(i, j) = normal(rng);
        }
    }
    return out;
}

Eigen::VectorXd effective_w_star(const SynthSpec& spec) {
    if (spec.w_star.size() == spec.p) return spec.w_star;
    if (spec.w_star.size() != 0)
        throw DimensionMismatch("w_star dimension does not match p");
    return Eigen::VectorXd::Constant(spec.p,
                                     1.0 / std::sqrt(double(spec.p)));
}

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> gen_design(const SynthSpec& spec) {
    if (spec.p < 1) throw Error("gen_design: p must be >= 1");
    return {gen_block(spec, spec.n_private, kPrivateRows),
            gen_block(spec, spec.m_public, kPublicRows)};
}

Eigen::VectorXd gen_labels(const Eigen::MatrixXd& features,
                           const SynthSpec& spec, std::uint64_t stream_tag) {
    if (features.cols() != spec.p)
        throw DimensionMismatch("feature dimension does not match spec");
    const Eigen::VectorXd w = effective_w_star(spec);
    const long n = features.rows();
    Eigen::VectorXd y(n);
    for (long i = 0; i < n; ++i) {
        Rng rng(derive_seed(spec.seed,
                            {kLabelRows, stream_tag,
                             static_cast<std::uint64_t>(i)}));
        const double z = features.row(i).dot(w);
        if (!spec.nonlinear) {
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            y(i) = unif(rng) < sigmoid(z) ? 1.0 : 0.0;
        } else {
            const LinkFunction& f = get_link(spec.nonlinear->link);
            const double C = spec.nonlinear->noise_bound;
            double noise = 0.0;
            if (C > 0.0) {
                std::uniform_real_distribution<double> unif(-C, C);
                noise = unif(rng);
            }
            y(i) = f.value(z) + noise;
        }
    }
    return y;
}

std::pair<Dataset, Dataset> gen_synthetic(const SynthSpec& spec) {
    auto [priv_x, pub_x] = gen_design(spec);

    DataBounds bounds;
    bounds.C = spec.nonlinear ? spec.nonlinear->noise_bound : 0.0;
    if (spec.design == DesignKind::Bernoulli) {
        bounds.r = 1.0;
        // every row has ||x||_2 exactly sqrt(p)/p
        bounds.r2 = 1.0 / std::sqrt(static_cast<double>(spec.p));
    } else {
        // l1 bound holds only w.h.p. under the gaussian design; declare the
        // realized maxima so validation is exact.
        double max_l1 = 0.0, max_l2 = 0.0;
        for (long i = 0; i < priv_x.rows(); ++i) {
            max_l1 = std::max(max_l1, priv_x.row(i).lpNorm<1>());
            max_l2 = std::max(max_l2, priv_x.row(i).norm());
        }
        bounds.r = max_l1 > 0.0 ? max_l1 : 1.0;
        bounds.r2 = max_l2 > 0.0 ? max_l2 : 1.0;
    }

    Dataset priv;
    priv.features = std::move(priv_x);
    priv.labels = gen_labels(priv.features, spec);
    priv.bounds = bounds;
    priv.provenance = spec.design == DesignKind::Bernoulli
                          ? Provenance::SyntheticBernoulli
                          : Provenance::SyntheticGaussian;

    Dataset pub;
    pub.features = std::move(pub_x);
    pub.bounds = bounds;
    pub.provenance = priv.provenance;
    return {std::move(priv), std::move(pub)};
}

// ---- CSV ingestion -------------------------------------------------------

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim whitespace and trailing CR
        const auto first = field.find_first_not_of(" \t\r");
        const auto last = field.find_last_not_of(" \t\r");
        fields.push_back(first == std::string::npos
                             ? std::string()
                             : field.substr(first, last - first + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_cell(const std::string& cell, long row,
                  const std::string& column) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size()) {
        std::ostringstream msg;
        msg << "non-numeric cell '" << cell << "' at row " << row
            << ", column '" << column << "'";
        throw ParseError(msg.str());
    }
    return v;
}

std::size_t column_index(const std::vector<std::string>& columns,
                         const std::string& name) {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end())
        throw MissingColumn("column '" + name + "' not found");
    return static_cast<std::size_t>(it - columns.begin());
}

}  // namespace

RawTable load_csv(const IngestSpec& spec) {
    std::ifstream in(spec.path);
    if (!in) throw IoError("cannot open '" + spec.path + "'");

    std::string line;
    if (!std::getline(in, line))
        throw ParseError("'" + spec.path + "' is empty (header required)");
    RawTable table;
    table.columns = split_line(line);
    const std::size_t ncols = table.columns.size();

    std::vector<std::vector<double>> rows;
    long row_no = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++row_no;
        auto fields = split_line(line);
        if (fields.size() != ncols) {
            std::ostringstream msg;
            msg << "row " << row_no << " has " << fields.size()
                << " fields, expected " << ncols;
            throw ParseError(msg.str());
        }
        std::vector<double> parsed(ncols);
        for (std::size_t j = 0; j < ncols; ++j)
            parsed[j] = parse_cell(fields[j], row_no, table.columns[j]);
        rows.push_back(std::move(parsed));
    }

    table.cells.resize(static_cast<long>(rows.size()),
                       static_cast<long>(ncols));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < ncols; ++j)
            table.cells(static_cast<long>(i), static_cast<long>(j)) =
                rows[i][j];
    return table;
}

PreprocessResult preprocess(const RawTable& table, const IngestSpec& spec) {
    const std::size_t label_idx = column_index(table.columns, spec.label_column);

    std::vector<bool> dropped(table.columns.size(), false);
    dropped[label_idx] = true;
    for (const auto& name : spec.drop_columns)
        dropped[column_index(table.columns, name)] = true;

    std::vector<std::size_t> feat_idx;
    for (std::size_t j = 0; j < table.columns.size(); ++j)
        if (!dropped[j]) feat_idx.push_back(j);

    // Seeded shuffle, optional subsample, then split.
    std::vector<long> order(table.cells.rows());
    std::iota(order.begin(), order.end(), 0L);
    Rng rng(derive_seed(spec.seed, {0x696E67657374ULL}));
    std::shuffle(order.begin(), order.end(), rng);
    if (spec.subsample && *spec.subsample < static_cast<long>(order.size()))
        order.resize(*spec.subsample);

    const long n = static_cast<long>(order.size());
    long n_train = spec.train_count
                       ? std::min(*spec.train_count, n)
                       : static_cast<long>(
                             std::llround(spec.train_fraction * double(n)));
    n_train = std::clamp(n_train, 0L, n);
    if (n_train < 1) throw ConfigError("train split is empty");

    const auto nfeat = static_cast<long>(feat_idx.size());
    auto materialize = [&](long begin, long count) {
        Eigen::MatrixXd x(count, nfeat);
        Eigen::VectorXd y(count);
        for (long i = 0; i < count; ++i) {
            const long src = order[static_cast<std::size_t>(begin + i)];
            for (long j = 0; j < nfeat; ++j)
                x(i, j) = table.cells(src, static_cast<long>(feat_idx[j]));
            y(i) = table.cells(src, static_cast<long>(label_idx)) ==
                           spec.positive_class
                       ? 1.0
                       : 0.0;
        }
        return std::make_pair(std::move(x), std::move(y));
    };
    auto [train_x, train_y] = materialize(0, n_train);
    auto [test_x, test_y] = materialize(n_train, n - n_train);

    // Standardize with train statistics; drop zero-variance features.
    Eigen::VectorXd mean = train_x.colwise().mean();
    Eigen::VectorXd var =
        (train_x.rowwise() - mean.transpose()).array().square().colwise().sum() /
        static_cast<double>(n_train);

    PreprocessResult out;
    std::vector<long> keep;
    for (long j = 0; j < nfeat; ++j) {
        if (var(j) <= 1e-12) {
            out.dropped_degenerate.push_back(table.columns[feat_idx[j]]);
        } else {
            keep.push_back(j);
            out.feature_names.push_back(table.columns[feat_idx[j]]);
        }
    }
    const auto nkeep = static_cast<long>(keep.size());
    if (nkeep == 0) throw ConfigError("no usable features after preprocessing");

    auto standardize = [&](const Eigen::MatrixXd& src) {
        Eigen::MatrixXd dst(src.rows(), nkeep);
        for (long j = 0; j < nkeep; ++j) {
            const long k = keep[static_cast<std::size_t>(j)];
            dst.col(j) = (src.col(k).array() - mean(k)) / std::sqrt(var(k));
        }
        return dst;
    };
    Eigen::MatrixXd tr = standardize(train_x);
    Eigen::MatrixXd te = standardize(test_x);

    // Global rescale so the largest train row sits exactly on the l1 ball.
    double max_l1 = 0.0;
    for (long i = 0; i < tr.rows(); ++i)
        max_l1 = std::max(max_l1, tr.row(i).lpNorm<1>());
    if (max_l1 <= 0.0) throw ConfigError("degenerate train split (all zeros)");
    out.scale = spec.r_target / max_l1;
    tr *= out.scale;
    te *= out.scale;

    // Out-of-bound test rows are rescaled individually; they never enter the
    // private mechanism, only prediction.
    for (long i = 0; i < te.rows(); ++i) {
        const double l1 = te.row(i).lpNorm<1>();
        if (l1 > spec.r_target * (1.0 + 1e-12)) {
            te.row(i) *= spec.r_target / l1;
            ++out.rescaled_test_rows;
        }
    }

    DataBounds bounds;
    bounds.r = spec.r_target;
    // realized l2 radius of the train split; noise is keyed to this
    double max_l2 = 0.0;
    for (long i = 0; i < tr.rows(); ++i)
        max_l2 = std::max(max_l2, tr.row(i).norm());
    bounds.r2 = max_l2 > 0.0 ? max_l2 : spec.r_target;
    out.train.features = std::move(tr);
    out.train.labels = std::move(train_y);
    out.train.bounds = bounds;
    out.train.provenance = Provenance::Ingested;
    out.test.features = std::move(te);
    out.test.labels = std::move(test_y);
    out.test.bounds = bounds;
    out.test.provenance = Provenance::Ingested;
    return out;
}

PreprocessResult ingest(const IngestSpec& spec) {
    return preprocess(load_csv(spec), spec);
}

}  // namespace ldpglm
