#include "ldpglm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace ldpglm {

namespace {

constexpr std::uint64_t kTrialStream = 0x747269616CULL;   // "trial"
constexpr std::uint64_t kTestStream = 0x74657374ULL;      // "test"

std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    const auto last = s.find_last_not_of(" \t\r");
    return first == std::string::npos ? std::string()
                                      : s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& s, const std::string& key) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid number '" + s + "' for key '" + key + "'");
    }
}

long parse_long(const std::string& s, const std::string& key) {
    const double v = parse_double(s, key);
    if (v != std::floor(v))
        throw ConfigError("expected integer for key '" + key + "'");
    return static_cast<long>(v);
}

bool parse_bool(const std::string& s, const std::string& key) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("invalid boolean '" + s + "' for key '" + key + "'");
}

bool is_error_metric(const std::string& m) {
    return m == "rel_inf" || m == "sq_rel_inf" || m == "rel_l2";
}

void validate(const ExperimentConfig& c) {
    if (c.trials < 1) throw ConfigError("trials must be >= 1");
    if (c.metrics.empty()) throw ConfigError("at least one metric required");
    for (const auto& m : c.metrics) {
        if (!is_error_metric(m) && m != "accuracy")
            throw ConfigError("unknown metric '" + m + "'");
        if (m == "accuracy" && c.mode == Mode::Nlr)
            throw ConfigError("accuracy metric is only defined for glm");
        if (is_error_metric(m) && c.design == "csv")
            throw ConfigError("metric '" + m +
                              "' needs a synthetic ground truth");
    }
    if (c.design != "bernoulli" && c.design != "gaussian" && c.design != "csv")
        throw ConfigError("unknown design '" + c.design + "'");
    if (c.design == "csv") {
        if (!c.ingest || c.ingest->path.empty() ||
            c.ingest->label_column.empty())
            throw ConfigError("csv design requires csv_path and label_column");
    }
    if (c.epsilons.empty() || c.ns.empty() || c.ms.empty() || c.ps.empty())
        throw ConfigError("every sweep axis must be nonempty");
    get_link(c.link);  // throws UnknownLink
    const auto& link = get_link(c.link);
    if ((c.mode == Mode::Glm) != (link.kind == LinkKind::GlmLoss))
        throw ConfigError("link '" + c.link + "' does not match mode");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig c;
    c.epsilons.clear();
    IngestSpec ing;
    bool has_ingest_key = false;

    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value': " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "mode") {
            if (value == "glm") c.mode = Mode::Glm;
            else if (value == "nlr") c.mode = Mode::Nlr;
            else throw ConfigError("mode must be glm or nlr");
        } else if (key == "link") {
            c.link = value;
        } else if (key == "design") {
            c.design = value;
        } else if (key == "epsilon") {
            for (const auto& v : split_list(value))
                c.epsilons.push_back(parse_double(v, key));
        } else if (key == "n") {
            for (const auto& v : split_list(value))
                c.ns.push_back(parse_long(v, key));
        } else if (key == "m") {
            for (const auto& v : split_list(value))
                c.ms.push_back(parse_long(v, key));
        } else if (key == "p") {
            for (const auto& v : split_list(value))
                c.ps.push_back(static_cast<int>(parse_long(v, key)));
        } else if (key == "trials") {
            c.trials = parse_long(value, key);
        } else if (key == "metrics") {
            c.metrics = split_list(value);
        } else if (key == "delta") {
            if (value == "1/n") {
                c.delta_one_over_n = true;
            } else {
                c.delta_one_over_n = false;
                c.delta_fixed = parse_double(value, key);
            }
        } else if (key == "augment") {
            c.augment = parse_bool(value, key);
        } else if (key == "seed") {
            c.master_seed = static_cast<std::uint64_t>(parse_long(value, key));
        } else if (key == "noise_bound" || key == "C") {
            c.noise_C = parse_double(value, key);
        } else if (key == "n_test") {
            c.n_test = parse_long(value, key);
        } else if (key == "csv_path") {
            ing.path = value; has_ingest_key = true;
        } else if (key == "label_column") {
            ing.label_column = value; has_ingest_key = true;
        } else if (key == "positive_class") {
            ing.positive_class = parse_double(value, key); has_ingest_key = true;
        } else if (key == "drop_columns") {
            ing.drop_columns = split_list(value); has_ingest_key = true;
        } else if (key == "r_target") {
            ing.r_target = parse_double(value, key); has_ingest_key = true;
        } else if (key == "train_fraction") {
            ing.train_fraction = parse_double(value, key); has_ingest_key = true;
        } else if (key == "train_count") {
            ing.train_count = parse_long(value, key); has_ingest_key = true;
        } else if (key == "subsample") {
            ing.subsample = parse_long(value, key); has_ingest_key = true;
        } else if (key == "ingest_seed") {
            ing.seed = static_cast<std::uint64_t>(parse_long(value, key));
            has_ingest_key = true;
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    if (has_ingest_key) c.ingest = std::move(ing);
    if (c.design == "csv" && c.ps.empty()) c.ps.push_back(0);
    validate(c);
    return c;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

const char* const kCsvHeader =
    "mode,link,design,p,n,m,epsilon,delta,trial,metric,value,calib_method,"
    "condition_warning,stage_error";

std::string to_csv(const MetricsRow& r) {
    std::ostringstream os;
    os << r.mode << ',' << r.link << ',' << r.design << ',' << r.p << ','
       << r.n << ',' << r.m << ',' << r.epsilon << ',' << r.delta << ','
       << r.trial << ',' << r.metric << ',' << fmt_full(r.value) << ','
       << r.calib_method << ',' << (r.condition_warning ? 1 : 0) << ','
       << r.stage_error;
    return os.str();
}

std::vector<Cell> expand_cells(const ExperimentConfig& config) {
    std::vector<Cell> cells;
    std::size_t index = 0;
    for (int p : config.ps)
        for (double eps : config.epsilons)
            for (long n : config.ns)
                for (long m : config.ms)
                    cells.push_back(Cell{p, n, m, eps, index++});
    return cells;
}

double error_metric(const std::string& metric, const Eigen::VectorXd& w_hat,
                    const Eigen::VectorXd& w_star) {
    const Eigen::VectorXd diff = w_hat - w_star;
    if (metric == "rel_inf")
        return diff.lpNorm<Eigen::Infinity>() /
               w_star.lpNorm<Eigen::Infinity>();
    if (metric == "sq_rel_inf") {
        const double r = diff.lpNorm<Eigen::Infinity>() /
                         w_star.lpNorm<Eigen::Infinity>();
        return r * r;
    }
    if (metric == "rel_l2") return diff.norm() / w_star.norm();
    throw ConfigError("unknown error metric '" + metric + "'");
}

namespace {

struct TrialData {
    Dataset priv;
    Dataset pub;
    Eigen::VectorXd w_star;          // empty for csv
    const Dataset* test = nullptr;   // csv test split
    Dataset synth_test;              // synthetic test set (accuracy)
};

TrialData make_synthetic_trial(const ExperimentConfig& config, const Cell& cell,
                               std::uint64_t trial_seed, bool need_accuracy) {
    SynthSpec spec;
    spec.design = config.design == "gaussian" ? DesignKind::Gaussian
                                              : DesignKind::Bernoulli;
    spec.p = cell.p;
    spec.w_star = Eigen::VectorXd::Constant(
        cell.p, 1.0 / std::sqrt(static_cast<double>(cell.p)));
    if (config.mode == Mode::Nlr)
        spec.nonlinear = NonlinearLabelModel{config.link, config.noise_C};
    spec.n_private = cell.n;
    spec.m_public = cell.m;
    spec.seed = trial_seed;

    TrialData data;
    std::tie(data.priv, data.pub) = gen_synthetic(spec);
    data.w_star = spec.w_star;

    if (need_accuracy) {
        SynthSpec tspec = spec;
        tspec.n_private = config.n_test;
        tspec.m_public = 0;
        tspec.seed = derive_seed(trial_seed, {kTestStream});
        std::tie(data.synth_test, std::ignore) = gen_synthetic(tspec);
        data.test = &data.synth_test;
    }
    return data;
}

// For links with no global derivative bound (e.g. cubic), the label noise
// scale is still well defined on the reachable index interval
// |<x, w*>| <= r * ||w*||_inf. Substitute the supremum of |f'| over that
// interval so finite-epsilon sweeps can run.
LinkFunction with_effective_bound(const LinkFunction& link, double r,
                                  const Eigen::VectorXd& w_star) {
    const double z_max = r * w_star.lpNorm<Eigen::Infinity>();
    double sup = 0.0;
    const int grid = 512;
    for (int i = 0; i <= grid; ++i) {
        const double z = -z_max + 2.0 * z_max * i / grid;
        sup = std::max(sup, std::abs(calib_d(link, z)));
    }
    LinkFunction eff = link;
    eff.bound_L = sup;
    return eff;
}

TrialData make_csv_trial(const ExperimentConfig& config, const Cell& cell,
                         std::uint64_t trial_seed,
                         const PreprocessResult& ingested) {
    const long n_train = ingested.train.n();
    if (cell.n + cell.m > n_train) {
        std::ostringstream msg;
        msg << "cell needs n+m=" << cell.n + cell.m
            << " train rows but only " << n_train << " are available";
        throw ConfigError(msg.str());
    }
    std::vector<long> order(n_train);
    std::iota(order.begin(), order.end(), 0L);
    Rng rng(derive_seed(trial_seed, {0x637376ULL}));
    std::shuffle(order.begin(), order.end(), rng);

    TrialData data;
    data.priv.features.resize(cell.n, ingested.train.p());
    Eigen::VectorXd labels(cell.n);
    for (long i = 0; i < cell.n; ++i) {
        data.priv.features.row(i) = ingested.train.features.row(order[i]);
        labels(i) = (*ingested.train.labels)(order[i]);
    }
    data.priv.labels = std::move(labels);
    data.priv.bounds = ingested.train.bounds;
    data.priv.provenance = Provenance::Ingested;

    data.pub.features.resize(cell.m, ingested.train.p());
    for (long i = 0; i < cell.m; ++i)
        data.pub.features.row(i) =
            ingested.train.features.row(order[cell.n + i]);
    data.pub.bounds = ingested.train.bounds;
    data.pub.provenance = Provenance::Ingested;

    data.test = &ingested.test;
    return data;
}

}  // namespace

std::vector<MetricsRow> run_trial(const ExperimentConfig& config,
                                  const Cell& cell, long trial_index,
                                  const PreprocessResult* ingested) {
    const std::uint64_t trial_seed =
        derive_seed(config.master_seed,
                    {kTrialStream, cell.index,
                     static_cast<std::uint64_t>(trial_index)});

    const bool disabled = std::isinf(cell.epsilon);
    MetricsRow base;
    base.mode = config.mode == Mode::Glm ? "glm" : "nlr";
    base.link = config.link;
    base.design = config.design;
    base.p = cell.p;
    base.n = cell.n;
    base.m = cell.m;
    base.epsilon = disabled ? "inf" : fmt_short(cell.epsilon);
    const double delta = config.delta_one_over_n
                             ? 1.0 / static_cast<double>(cell.n)
                             : config.delta_fixed;
    base.delta = disabled ? "-" : fmt_short(delta);
    base.trial = trial_index;

    std::vector<MetricsRow> rows;
    auto fail_all = [&](const std::string& what) {
        for (const auto& metric : config.metrics) {
            MetricsRow row = base;
            row.metric = metric;
            row.value = std::numeric_limits<double>::quiet_NaN();
            row.stage_error = what;
            rows.push_back(std::move(row));
        }
        return rows;
    };

    try {
        const bool need_accuracy =
            std::find(config.metrics.begin(), config.metrics.end(),
                      "accuracy") != config.metrics.end();
        TrialData data =
            config.design == "csv"
                ? make_csv_trial(config, cell, trial_seed, *ingested)
                : make_synthetic_trial(config, cell, trial_seed, need_accuracy);
        if (config.design == "csv")
            base.p = static_cast<int>(data.priv.p());

        PrivacyParams priv;
        priv.epsilon = cell.epsilon;
        priv.delta = disabled ? 0.5 : delta;  // unused when disabled
        EstimateOptions opts;
        opts.augment = config.augment;
        opts.seed = trial_seed;

        LinkFunction link = get_link(config.link);
        if (config.mode == Mode::Nlr && !disabled && !link.bound_L &&
            data.w_star.size() > 0)
            link = with_effective_bound(link, data.priv.bounds.r, data.w_star);

        EstimatorOutput out =
            estimate(config.mode, data.priv, data.pub, link, priv, opts);

        for (const auto& metric : config.metrics) {
            MetricsRow row = base;
            row.metric = metric;
            row.calib_method =
                out.calibration.method == CalibrationMethod::Newton
                    ? "newton"
                    : "bisection";
            row.condition_warning = out.ols_diag.condition_warning;
            if (metric == "accuracy") {
                const Dataset& test = *data.test;
                long correct = 0;
                for (long i = 0; i < test.n(); ++i)
                    if (predict_binary(out.w_final,
                                       test.features.row(i).transpose()) ==
                        static_cast<int>((*test.labels)(i)))
                        ++correct;
                row.value = static_cast<double>(correct) /
                            static_cast<double>(test.n());
            } else {
                row.value = error_metric(metric, out.w_final, data.w_star);
            }
            rows.push_back(std::move(row));
        }
        return rows;
    } catch (const PipelineError& e) {
        return fail_all(e.what());
    } catch (const Error& e) {
        return fail_all(e.what());
    } catch (const std::exception& e) {
        return fail_all(std::string("unexpected: ") + e.what());
    }
}

std::vector<AggregateRow> aggregate_rows(const std::vector<MetricsRow>& rows) {
    struct Group {
        AggregateRow agg;
        std::vector<double> values;
    };
    std::vector<Group> groups;
    std::map<std::string, std::size_t> lookup;

    for (const auto& r : rows) {
        std::ostringstream key;
        key << r.p << '|' << r.n << '|' << r.m << '|' << r.epsilon << '|'
            << r.metric;
        auto [it, inserted] = lookup.emplace(key.str(), groups.size());
        if (inserted) {
            Group g;
            g.agg.mode = r.mode;
            g.agg.link = r.link;
            g.agg.design = r.design;
            g.agg.p = r.p;
            g.agg.n = r.n;
            g.agg.m = r.m;
            g.agg.epsilon = r.epsilon;
            g.agg.delta = r.delta;
            g.agg.metric = r.metric;
            groups.push_back(std::move(g));
        }
        if (r.stage_error.empty()) groups[it->second].values.push_back(r.value);
    }

    std::vector<AggregateRow> out;
    for (auto& g : groups) {
        const auto k = static_cast<long>(g.values.size());
        g.agg.trials = k;
        if (k > 0) {
            const double mean =
                std::accumulate(g.values.begin(), g.values.end(), 0.0) /
                static_cast<double>(k);
            g.agg.mean = mean;
            if (k > 1) {
                double ss = 0.0;
                for (double v : g.values) ss += (v - mean) * (v - mean);
                g.agg.std_error = std::sqrt(ss / static_cast<double>(k - 1)) /
                                  std::sqrt(static_cast<double>(k));
            }
        } else {
            g.agg.mean = std::numeric_limits<double>::quiet_NaN();
            g.agg.std_error = std::numeric_limits<double>::quiet_NaN();
        }
        out.push_back(g.agg);
    }
    return out;
}

std::vector<MetricsRow> run_sweep_rows(const ExperimentConfig& config) {
    std::optional<PreprocessResult> ingested;
    if (config.design == "csv") ingested = ingest(*config.ingest);

    std::vector<MetricsRow> rows;
    for (const Cell& cell : expand_cells(config)) {
        for (long t = 0; t < config.trials; ++t) {
            auto trial_rows =
                run_trial(config, cell, t, ingested ? &*ingested : nullptr);
            rows.insert(rows.end(),
                        std::make_move_iterator(trial_rows.begin()),
                        std::make_move_iterator(trial_rows.end()));
        }
    }
    return rows;
}

SweepSummary sweep(const ExperimentConfig& config,
                   const std::string& out_path) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<MetricsRow> rows = run_sweep_rows(config);

    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write '" + out_path + "'");
    out << kCsvHeader << '\n';
    std::size_t failed = 0;
    for (const auto& r : rows) {
        // a failed trial fails every metric; count it once
        if (!r.stage_error.empty() && r.metric == config.metrics.front())
            ++failed;
        out << to_csv(r) << '\n';
    }
    if (!out) throw IoError("write failed for '" + out_path + "'");

    const std::string agg_path = out_path + ".agg.csv";
    std::ofstream agg(agg_path);
    if (!agg) throw IoError("cannot write '" + agg_path + "'");
    agg << "mode,link,design,p,n,m,epsilon,delta,metric,trials,mean,std_error\n";
    for (const auto& a : aggregate_rows(rows)) {
        agg << a.mode << ',' << a.link << ',' << a.design << ',' << a.p << ','
            << a.n << ',' << a.m << ',' << a.epsilon << ',' << a.delta << ','
            << a.metric << ',' << a.trials << ',' << fmt_full(a.mean) << ','
            << fmt_full(a.std_error) << '\n';
    }
    if (!agg) throw IoError("write failed for '" + agg_path + "'");

    SweepSummary summary;
    summary.cells = expand_cells(config).size();
    summary.rows = rows.size();
    summary.failed_trials = failed;
    summary.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return summary;
}

}  // namespace ldpglm
