#include "ldpglm/baselines.hpp"

#include <cmath>
#include <random>

#include "ldpglm/rng.hpp"

namespace ldpglm {

Eigen::VectorXd exact_ols(const Eigen::MatrixXd& features,
                          const Eigen::VectorXd& labels) {
    if (features.rows() != labels.size())
        throw DimensionMismatch("features/labels row mismatch");
    if (features.rows() < features.cols())
        throw Error("exact_ols needs n >= p");
    SufficientStats stats;
    stats.gram = features.transpose() * features;
    stats.moment = features.transpose() * labels;
    stats.n_private = features.rows();
    return solve_ols(stats).w_ols;
}

Eigen::VectorXd glm_gradient(const Eigen::MatrixXd& features,
                             const Eigen::VectorXd& labels,
                             const LinkFunction& link,
                             const Eigen::VectorXd& w) {
    const long n = features.rows();
    Eigen::VectorXd z = features * w;
    Eigen::VectorXd resid(n);
    for (long i = 0; i < n; ++i) resid(i) = link.d1(z(i)) - labels(i);
    return features.transpose() * resid / static_cast<double>(n);
}

double glm_objective(const Eigen::MatrixXd& features,
                     const Eigen::VectorXd& labels, const LinkFunction& link,
                     const Eigen::VectorXd& w) {
    const long n = features.rows();
    Eigen::VectorXd z = features * w;
    double sum = 0.0;
    for (long i = 0; i < n; ++i) sum += link.value(z(i)) - labels(i) * z(i);
    return sum / static_cast<double>(n);
}

Eigen::VectorXd nonprivate_glm_fit(const Eigen::MatrixXd& features,
                                   const Eigen::VectorXd& labels,
                                   const LinkFunction& link, int iters,
                                   double step) {
    if (link.kind != LinkKind::GlmLoss)
        throw Error("nonprivate_glm_fit requires a glm loss");
    Eigen::VectorXd w = Eigen::VectorXd::Zero(features.cols());
    for (int t = 0; t < iters; ++t) {
        w -= step * glm_gradient(features, labels, link, w);
        if (!w.allFinite()) throw NonFinite("gradient descent diverged");
    }
    return w;
}

McEstimate population_f_mc(const LinkFunction& link, const Eigen::VectorXd& w,
                           double c, long samples, std::uint64_t seed) {
    McEstimate est;
    est.samples = samples;
    if (c == 0.0) return est;  // exactly zero, zero variance

    // <x, w> ~ N(0, ||w||^2/p) by rotational invariance of the design.
    const double s =
        w.norm() / std::sqrt(static_cast<double>(std::max<long>(w.size(), 1)));

    constexpr long kChunk = 1 << 16;
    double sum = 0.0;
    double sumsq = 0.0;
    long done = 0;
    long chunk_id = 0;
    while (done < samples) {
        const long count = std::min(kChunk, samples - done);
        Rng rng(derive_seed(seed, {0x6D63ULL,
                                   static_cast<std::uint64_t>(chunk_id)}));
        std::normal_distribution<double> normal(0.0, s);
        double part = 0.0, partsq = 0.0;
        for (long i = 0; i < count; ++i) {
            const double g = calib_d(link, c * normal(rng));
            part += g;
            partsq += g * g;
        }
        sum += part;
        sumsq += partsq;
        done += count;
        ++chunk_id;
    }

    const double nd = static_cast<double>(samples);
    const double mean = sum / nd;
    const double var = std::max(0.0, sumsq / nd - mean * mean);
    est.value = c * mean;
    est.std_error = std::abs(c) * std::sqrt(var / nd);
    return est;
}

}  // namespace ldpglm
