// Acceptance suite: one PASS/FAIL line per criterion, exit 0 only when all
// criteria pass. Statistical criteria use fixed seeds so reruns are exact.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ldpglm/baselines.hpp"
#include "ldpglm/data.hpp"
#include "ldpglm/harness.hpp"
#include "ldpglm/mechanism.hpp"
#include "ldpglm/pipeline.hpp"

using namespace ldpglm;

namespace {

int g_failures = 0;

void report(int id, const std::string& what, bool ok,
            const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << what
              << " — " << detail << std::endl;
    if (!ok) ++g_failures;
}

struct Check {
    bool ok = true;
    std::ostringstream detail;
    void expect(bool cond, const std::string& why) {
        if (!cond) {
            ok = false;
            if (detail.tellp() > 0) detail << "; ";
            detail << why;
        }
    }
};

// Every calibration observed anywhere in this suite lands here; criterion 3
// asserts the residual certificate over the whole collection.
std::vector<double> g_residuals;

void observe(const CalibrationResult& res) {
    g_residuals.push_back(std::abs(res.residual));
}

double fmean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// ---- criterion 1: noise calibration ---------------------------------------

void criterion1() {
    Check c;
    PrivacyParams priv{1.0, 0.1};
    NoiseScales scales =
        noise_scales(Mode::Glm, DataBounds{}, get_link("logistic"), priv);
    const double target = 32.0 * std::log(25.0);

    const long draws = 100000;
    Eigen::VectorXd x(2);
    x << 0.5, -0.5;
    double gram_sq = 0.0, mom_sq = 0.0;
    for (long t = 0; t < draws; ++t) {
        Rng rng(derive_seed(101, {static_cast<std::uint64_t>(t)}));
        UserReport r =
            randomize_record(x, 1.0, scales, DataBounds{}, Mode::Glm, rng);
        const double eg = r.noisy_gram(0, 1) - x(0) * x(1);
        gram_sq += eg * eg;
        const double em = r.noisy_moment(0) - x(0) * 1.0;
        mom_sq += em * em;
    }
    const double vg = gram_sq / draws;
    const double vm = mom_sq / draws;
    c.expect(std::abs(vg - target) <= 0.05 * target, "matrix variance off");
    c.expect(std::abs(vm - target) <= 0.05 * target, "vector variance off");
    std::ostringstream d;
    d << "matrix var " << vg << ", vector var " << vm << ", target " << target;
    report(1, "noise variance matches 32 ln(25) within 5%", c.ok,
           c.ok ? d.str() : c.detail.str());
}

// ---- criterion 2: root-finder oracle agreement ----------------------------

void criterion2() {
    Check c;
    double worst = 0.0;
    int count = 0;
    for (const char* name : {"logistic", "boosting"}) {
        const auto& link = get_link(name);
        for (int t = 0; t < 100; ++t) {
            Rng rng(derive_seed(202, {std::uint64_t(t), std::uint64_t(name[0])}));
            std::normal_distribution<double> normal(0.0, 0.01 + 0.01 * (t % 20));
            Eigen::VectorXd y(200);
            for (int i = 0; i < 200; ++i) y(i) = normal(rng);
            auto nres = newton_calibrate(link, y, {});
            auto bres = bisection_calibrate(link, y, {});
            observe(nres);
            observe(bres);
            worst = std::max(worst, std::abs(nres.c_hat - bres.c_hat));
            ++count;
        }
    }
    c.expect(worst <= 1e-8, "newton/bisection disagreement");

    double worst_const = 0.0;
    for (double L : {0.1, 0.25, 2.0}) {
        LinkFunction flat;
        flat.name = "flatcurv";
        flat.kind = LinkKind::GlmLoss;
        flat.value = [L](double z) { return 0.5 * L * z * z; };
        flat.d1 = [L](double z) { return L * z; };
        flat.d2 = [L](double) { return L; };
        flat.d3 = [](double) { return 0.0; };
        Eigen::VectorXd y = Eigen::VectorXd::Zero(10);
        auto res = calibrate(flat, y, {});
        observe(res);
        worst_const = std::max(worst_const, std::abs(res.c_hat - 1.0 / L));
    }
    c.expect(worst_const <= 1e-10, "constant-curvature case inexact");

    std::ostringstream d;
    d << count << " randomized instances, max gap " << worst
      << "; analytic gap " << worst_const;
    report(2, "Newton and bisection agree to 1e-8", c.ok,
           c.ok ? d.str() : c.detail.str());
}

// ---- criterion 4: gaussian-design consistency -----------------------------

// Frozen one-time pilot: mean rel_inf over 20 noise-disabled trials at
// n = m = 2e6 (gaussian design, logistic, p = 10), seed 404. The floor
// shrinks like 1/sqrt(n), so the threshold rescales the pilot from the pilot
// size to the test size before applying the 2x margin.
constexpr double kPilotRelInf = 0.036865916309449569;
constexpr double kPilotN = 2e6;

double consistency_mean_rel_inf(long n, int trials, std::uint64_t seed) {
    std::vector<double> errs;
    const Eigen::VectorXd w_star =
        Eigen::VectorXd::Constant(10, 1.0 / std::sqrt(10.0));
    for (int t = 0; t < trials; ++t) {
        SynthSpec spec;
        spec.design = DesignKind::Gaussian;
        spec.p = 10;
        spec.n_private = n;
        spec.m_public = n;
        spec.seed = derive_seed(seed, {std::uint64_t(t)});
        auto [priv, pub] = gen_synthetic(spec);
        PrivacyParams privacy;
        privacy.epsilon = std::numeric_limits<double>::infinity();
        auto out = estimate(Mode::Glm, priv, pub, get_link("logistic"), privacy);
        observe(out.calibration);
        errs.push_back((out.w_final - w_star).lpNorm<Eigen::Infinity>() /
                       w_star.lpNorm<Eigen::Infinity>());
    }
    return fmean(errs);
}

void criterion4() {
    Check c;
    const long n = 200000;
    const double got = consistency_mean_rel_inf(n, 20, 404);
    const double threshold =
        2.0 * kPilotRelInf * std::sqrt(kPilotN / static_cast<double>(n));
    c.expect(got < threshold, "error above pilot-scaled threshold");
    std::ostringstream d;
    d << "mean rel_inf " << got << " at n=2e5 vs threshold " << threshold
      << " (pilot " << kPilotRelInf << " at n=2e6)";
    report(4, "noise-disabled consistency matches the pilot floor", c.ok,
           d.str());
}

// ---- criteria 5/6/7/9: trend sweeps ---------------------------------------

struct AggLookup {
    std::vector<AggregateRow> rows;
    const AggregateRow& get(const std::string& eps, long n, long m) const {
        for (const auto& a : rows)
            if (a.epsilon == eps && a.n == n && a.m == m) return a;
        throw std::runtime_error("aggregate cell not found");
    }
};

AggLookup run_cells(const std::string& config_text) {
    auto config = parse_config_text(config_text);
    return AggLookup{aggregate_rows(run_sweep_rows(config))};
}

void trend_eps_and_n(int id_eps, int id_n, const std::string& mode,
                     const std::string& link, std::uint64_t seed) {
    std::ostringstream cfg;
    cfg << "mode = " << mode << "\nlink = " << link << "\n"
        << "design = bernoulli\nmetrics = sq_rel_inf\ntrials = 200\n"
        << "p = 10\nm = 2e5\nseed = " << seed << "\n"
        << "epsilon = 10, 5\nn = 2e5\n";
    auto eps_sweep = run_cells(cfg.str());
    const auto& at10 = eps_sweep.get("10", 200000, 200000);
    const auto& at5 = eps_sweep.get("5", 200000, 200000);
    {
        Check c;
        c.expect(at10.trials == 200 && at5.trials == 200, "trials lost");
        const double ratio = at5.mean / at10.mean;
        c.expect(ratio >= 2.0 && ratio <= 8.0, "ratio outside [2, 8]");
        std::ostringstream d;
        d << "mean sq_rel_inf eps=5: " << at5.mean << ", eps=10: " << at10.mean
          << ", ratio " << at5.mean / at10.mean << " (theory 4)";
        report(id_eps, mode + " epsilon-scaling ratio in [2, 8]", c.ok,
               c.ok ? d.str() : c.detail.str() + "; " + d.str());
    }

    std::ostringstream cfg2;
    cfg2 << "mode = " << mode << "\nlink = " << link << "\n"
         << "design = bernoulli\nmetrics = sq_rel_inf\ntrials = 200\n"
         << "p = 10\nm = 2e5\nseed = " << seed + 1 << "\n"
         << "epsilon = 10\nn = 1e4, 2.9e5\n";
    auto n_sweep = run_cells(cfg2.str());
    const auto& small = n_sweep.get("10", 10000, 200000);
    const auto& large = n_sweep.get("10", 290000, 200000);
    {
        Check c;
        c.expect(small.trials == 200 && large.trials == 200, "trials lost");
        const double ratio = small.mean / large.mean;
        c.expect(ratio >= 8.0 && ratio <= 80.0, "ratio outside [8, 80]");
        std::ostringstream d;
        d << "mean sq_rel_inf n=1e4: " << small.mean
          << ", n=2.9e5: " << large.mean << ", ratio " << ratio
          << " (theory 29)";
        report(id_n, mode + " n-scaling ratio in [8, 80]", c.ok,
               c.ok ? d.str() : c.detail.str() + "; " + d.str());
    }
}

void criterion9() {
    auto sweep = run_cells(
        "mode = glm\nlink = logistic\ndesign = bernoulli\n"
        "metrics = rel_inf\ntrials = 200\np = 10\nseed = 909\n"
        "epsilon = 10\nn = 2e5\nm = 2e4, 1.6e5\n");
    const auto& small_m = sweep.get("10", 200000, 20000);
    const auto& large_m = sweep.get("10", 200000, 160000);
    Check c;
    c.expect(small_m.trials == 200 && large_m.trials == 200, "trials lost");
    c.expect(large_m.mean <= small_m.mean + small_m.std_error,
             "more public data made things worse beyond one SE");
    std::ostringstream d;
    d << "mean rel_inf m=2e4: " << small_m.mean << " (se " << small_m.std_error
      << "), m=1.6e5: " << large_m.mean;
    report(9, "more public data does not hurt (within one SE)", c.ok,
           c.ok ? d.str() : c.detail.str() + "; " + d.str());
}

// ---- criterion 8: constant verification via the CLI -----------------------

void criterion8() {
    Check c;
#ifdef LDPGLM_CLI_PATH
    const std::string cmd =
        std::string(LDPGLM_CLI_PATH) +
        " verify-constants --samples 1000000 > acceptance_constants.txt 2>&1";
    const int rc = std::system(cmd.c_str());
    c.expect(rc == 0, "CLI exited nonzero");
    std::string text;
    {
        FILE* f = std::fopen("acceptance_constants.txt", "rb");
        if (f) {
            char buf[4096];
            std::size_t k;
            while ((k = std::fread(buf, 1, sizeof(buf), f)) > 0)
                text.append(buf, k);
            std::fclose(f);
        }
    }
    std::size_t passes = 0, pos = 0;
    while ((pos = text.find("PASS", pos)) != std::string::npos) {
        ++passes;
        pos += 4;
    }
    c.expect(passes == 3, "expected 3 PASS lines from verify-constants");
    c.expect(text.find("FAIL") == std::string::npos, "CLI reported FAIL");
    std::remove("acceptance_constants.txt");
    std::ostringstream d;
    d << passes << "/3 Monte-Carlo constant checks passed (10^6 samples)";
    report(8, "verify-constants Monte-Carlo checks", c.ok,
           c.ok ? d.str() : c.detail.str());
#else
    c.expect(false, "CLI path not compiled in");
    report(8, "verify-constants Monte-Carlo checks", false, c.detail.str());
#endif
}

// ---- criterion 10: ingestion determinism and bounds -----------------------

void criterion10() {
    Check c;
    IngestSpec spec;
    spec.path = std::string(LDPGLM_TEST_DATA_DIR) + "/mixture.csv";
    spec.label_column = "label";
    spec.drop_columns = {"id"};
    spec.r_target = 1.0;
    spec.train_fraction = 0.75;
    spec.seed = 1010;

    auto a = ingest(spec);
    auto b = ingest(spec);
    c.expect(a.train.features == b.train.features, "train split not identical");
    c.expect(a.test.features == b.test.features, "test split not identical");

    double max_l1 = 0.0;
    for (long i = 0; i < a.train.n(); ++i)
        max_l1 = std::max(max_l1, a.train.features.row(i).lpNorm<1>());
    c.expect(std::abs(max_l1 - spec.r_target) <= 1e-12,
             "max train l1 misses r_target");

    long rejected = 0;
    for (long i = 0; i < a.train.n(); ++i) {
        try {
            validate_record(a.train.features.row(i).transpose(),
                            (*a.train.labels)(i), a.train.bounds, Mode::Glm);
        } catch (const Error&) {
            ++rejected;
        }
    }
    c.expect(rejected == 0, "mechanism rejected a preprocessed train row");

    std::ostringstream d;
    d << a.train.n() << " train rows, max l1 " << max_l1 << ", " << rejected
      << " rejections, reruns identical";
    report(10, "ingestion determinism and bound enforcement", c.ok,
           c.ok ? d.str() : c.detail.str());
}

// ---- criterion 11: cross-module oracles -----------------------------------

Eigen::VectorXd gauss_solve(Eigen::MatrixXd a, Eigen::VectorXd b) {
    const int n = static_cast<int>(a.rows());
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int row = col + 1; row < n; ++row)
            if (std::abs(a(row, col)) > std::abs(a(pivot, col))) pivot = row;
        a.row(col).swap(a.row(pivot));
        std::swap(b(col), b(pivot));
        for (int row = col + 1; row < n; ++row) {
            const double f = a(row, col) / a(col, col);
            a.row(row) -= f * a.row(col);
            b(row) -= f * b(col);
        }
    }
    Eigen::VectorXd x(n);
    for (int row = n - 1; row >= 0; --row) {
        double s = b(row);
        for (int col = row + 1; col < n; ++col) s -= a(row, col) * x(col);
        x(row) = s / a(row, row);
    }
    return x;
}

void criterion11() {
    Check c;
    double worst_pipeline = 0.0;
    for (int t = 0; t < 20; ++t) {
        SynthSpec spec;
        spec.p = 6;
        spec.n_private = 300;
        spec.m_public = 100;
        spec.seed = derive_seed(1111, {std::uint64_t(t)});
        auto [priv, pub] = gen_synthetic(spec);
        PrivacyParams privacy;
        privacy.epsilon = std::numeric_limits<double>::infinity();
        auto out = estimate(Mode::Glm, priv, pub, get_link("logistic"), privacy);
        observe(out.calibration);
        auto direct = exact_ols(priv.features, *priv.labels);
        worst_pipeline = std::max(
            worst_pipeline, (out.w_ols - direct).lpNorm<Eigen::Infinity>());
    }
    c.expect(worst_pipeline <= 1e-10, "pipeline w_ols drifts from exact_ols");

    double worst_solve = 0.0;
    Rng rng(1112);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        Eigen::MatrixXd m(5, 5);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) m(i, j) = normal(rng);
        SufficientStats stats;
        stats.gram = m * m.transpose() + Eigen::MatrixXd::Identity(5, 5);
        stats.moment = Eigen::VectorXd(5);
        for (int j = 0; j < 5; ++j) stats.moment(j) = normal(rng);
        stats.n_private = 5;
        auto res = solve_ols(stats);
        auto oracle = gauss_solve(stats.gram, stats.moment);
        worst_solve = std::max(worst_solve,
                               (res.w_ols - oracle).lpNorm<Eigen::Infinity>());
    }
    c.expect(worst_solve <= 1e-10, "solver drifts from elimination oracle");

    std::ostringstream d;
    d << "pipeline-vs-exact gap " << worst_pipeline << ", solver-vs-oracle gap "
      << worst_solve;
    report(11, "cross-module oracle agreement to 1e-10", c.ok,
           c.ok ? d.str() : c.detail.str());
}

// ---- criterion 3: universal residual certificate --------------------------

void criterion3() {
    Check c;
    double worst = 0.0;
    for (double r : g_residuals) worst = std::max(worst, r);
    c.expect(!g_residuals.empty(), "no calibrations observed");
    c.expect(worst <= 1e-10, "a calibration residual exceeds 1e-10");
    std::ostringstream d;
    d << g_residuals.size() << " calibrations observed, worst |f(c)-1| = "
      << worst;
    report(3, "residual certificate holds for every calibration", c.ok,
           c.ok ? d.str() : c.detail.str());
}

}  // namespace

int main() {
    try {
        criterion1();
        criterion2();
        criterion4();
        trend_eps_and_n(5, 6, "glm", "logistic", 505);
        trend_eps_and_n(7, 7, "nlr", "cubic", 707);
        criterion8();
        criterion9();
        criterion10();
        criterion11();
        criterion3();  // evaluated last so it sees every calibration above
    } catch (const std::exception& e) {
        std::cout << "FAIL acceptance suite aborted: " << e.what() << std::endl;
        return 1;
    }
    std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED"
                                  : "SOME CRITERIA FAILED")
              << std::endl;
    return g_failures == 0 ? 0 : 1;
}
