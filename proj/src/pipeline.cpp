#include "ldpglm/pipeline.hpp"

namespace ldpglm {

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const PipelineError&) {
        throw;
    } catch (const Error& e) {
        throw PipelineError(name, e.what());
    }
}

SufficientStats randomize_and_aggregate(Mode mode, const Dataset& private_data,
                                        const NoiseScales& scales,
                                        std::uint64_t seed) {
    if (!private_data.labels)
        throw BoundViolation("private dataset has no labels");
    const long n = private_data.n();
    SufficientStats stats;
    for (long i = 0; i < n; ++i) {
        Rng rng(derive_seed(seed, {kUserStream, static_cast<std::uint64_t>(i)}));
        UserReport report = randomize_record(
            private_data.features.row(i).transpose(), (*private_data.labels)(i),
            scales, private_data.bounds, mode, rng);
        accumulate(stats, report);
    }
    return stats;
}

}  // namespace

EstimatorOutput estimate_from_stats(Mode mode, const SufficientStats& stats,
                                    const Eigen::MatrixXd& public_x,
                                    const LinkFunction& link,
                                    const EstimateOptions& opts,
                                    bool privacy_warning) {
    SufficientStats working = stats;
    if (opts.augment)
        working = stage("augment",
                        [&] { return augment_with_public(stats, public_x); });

    OlsResult ols = stage("ols", [&] { return solve_ols(working); });
    Eigen::VectorXd ytilde =
        stage("project", [&] { return project_public(public_x, ols.w_ols); });
    CalibrationResult cal = stage(
        "calibrate", [&] { return calibrate(link, ytilde, opts.calibration); });

    EstimatorOutput out;
    out.w_ols = ols.w_ols;
    out.c_hat = cal.c_hat;
    out.w_final = cal.c_hat * ols.w_ols;
    out.calibration = cal;
    out.ols_diag = ols;
    out.mode = mode;
    out.augmented = opts.augment;
    out.privacy_warning = privacy_warning;
    return out;
}

EstimatorOutput estimate(Mode mode, const Dataset& private_data,
                         const Dataset& public_data, const LinkFunction& link,
                         const PrivacyParams& priv,
                         const EstimateOptions& opts) {
    if ((mode == Mode::Glm) != (link.kind == LinkKind::GlmLoss))
        throw PipelineError("setup", "link kind does not match mode");

    NoiseScales scales = stage("noise", [&] {
        return noise_scales(mode, private_data.bounds, link, priv);
    });
    SufficientStats stats = stage("randomize", [&] {
        return randomize_and_aggregate(mode, private_data, scales, opts.seed);
    });
    return estimate_from_stats(mode, stats, public_data.features, link, opts,
                               priv.large_epsilon_warning());
}

MultiEstimatorOutput estimate_multi(const Dataset& private_data,
                                    const Dataset& public_data,
                                    const std::vector<LinkFunction>& links,
                                    const PrivacyParams& priv,
                                    const EstimateOptions& opts) {
    for (const auto& link : links)
        if (link.kind != LinkKind::GlmLoss)
            throw PipelineError("setup",
                                "estimate_multi is for glm losses only");

    // The releases and OLS solve do not depend on the loss; compute once.
    NoiseScales scales = stage("noise", [&] {
        // glm noise scales are link-independent; any glm link works here
        return noise_scales(Mode::Glm, private_data.bounds,
                            links.empty() ? get_link("logistic") : links[0],
                            priv);
    });
    SufficientStats stats = stage("randomize", [&] {
        return randomize_and_aggregate(Mode::Glm, private_data, scales,
                                       opts.seed);
    });
    SufficientStats working = stats;
    if (opts.augment)
        working = stage("augment", [&] {
            return augment_with_public(stats, public_data.features);
        });
    OlsResult ols = stage("ols", [&] { return solve_ols(working); });
    Eigen::VectorXd ytilde = stage("project", [&] {
        return project_public(public_data.features, ols.w_ols);
    });

    auto outcomes = calibrate_many(links, ytilde, opts.calibration);
    MultiEstimatorOutput multi;
    for (auto& [name, outcome] : outcomes) {
        if (!outcome.result) {
            multi.failed[name] = outcome.error;
            continue;
        }
        EstimatorOutput out;
        out.w_ols = ols.w_ols;
        out.c_hat = outcome.result->c_hat;
        out.w_final = outcome.result->c_hat * ols.w_ols;
        out.calibration = *outcome.result;
        out.ols_diag = ols;
        out.mode = Mode::Glm;
        out.augmented = opts.augment;
        out.privacy_warning = priv.large_epsilon_warning();
        multi.outputs.emplace(name, std::move(out));
    }
    return multi;
}

int predict_binary(const Eigen::VectorXd& w, const Eigen::VectorXd& x) {
    if (w.size() != x.size())
        throw DimensionMismatch("predict_binary: dimension mismatch");
    return w.dot(x) >= 0.0 ? 1 : 0;
}

}  // namespace ldpglm
