#include "ldpglm/mechanism.hpp"

#include <random>
#include <sstream>

namespace ldpglm {

NoiseScales noise_scales(Mode mode, const DataBounds& bounds,
                         const LinkFunction& link, const PrivacyParams& priv) {
    if (priv.disabled()) return NoiseScales{0.0, 0.0, true};
    if (!(priv.epsilon > 0.0))
        throw InvalidPrivacy("epsilon must be positive");
    if (!(priv.delta > 0.0 && priv.delta < 1.0))
        throw InvalidPrivacy("delta must lie in (0,1)");

    // The released statistics have l2 sensitivity ||x x^T||_F = ||x||_2^2
    // and ||x y||_2 <= ||x||_2 |y|, so the noise is keyed to the l2 radius.
    const double r = bounds.l2_radius();
    const double base =
        32.0 * std::log(2.5 / priv.delta) / (priv.epsilon * priv.epsilon);

    NoiseScales s;
    s.sigma1_sq = base * r * r * r * r;
    if (mode == Mode::Glm) {
        s.sigma2_sq = base * r * r;
    } else {
        if (!link.bound_L)
            throw UnboundedLink("link '" + link.name +
                                "' has unbounded derivative; nlr noise scale "
                                "requires a finite L");
        const double sens = *link.bound_L * r + link.value_at_zero + bounds.C;
        s.sigma2_sq = base * r * r * sens * sens;
    }
    return s;
}

void validate_record(const Eigen::VectorXd& x, double y,
                     const DataBounds& bounds, Mode mode) {
    constexpr double slack = 1.0 + 1e-12;
    const double l1 = x.lpNorm<1>();
    if (l1 > bounds.r * slack) {
        std::ostringstream msg;
        msg << "feature l1 norm " << l1 << " exceeds bound r=" << bounds.r;
        throw BoundViolation(msg.str());
    }
    if (bounds.r2 > 0.0 && x.norm() > bounds.r2 * slack) {
        std::ostringstream msg;
        msg << "feature l2 norm " << x.norm() << " exceeds declared radius "
            << bounds.r2;
        throw BoundViolation(msg.str());
    }
    if (mode == Mode::Glm && std::abs(y) > bounds.y_bound * slack) {
        std::ostringstream msg;
        msg << "|y|=" << std::abs(y) << " exceeds bound " << bounds.y_bound;
        throw BoundViolation(msg.str());
    }
}

UserReport randomize_record(const Eigen::VectorXd& x, double y,
                            const NoiseScales& scales, const DataBounds& bounds,
                            Mode mode, Rng& rng) {
    validate_record(x, y, bounds, mode);

    const Eigen::Index p = x.size();
    UserReport report;
    report.noisy_gram = x * x.transpose();
    report.noisy_moment = x * y;
    if (scales.disabled) return report;

    std::normal_distribution<double> n1(0.0, std::sqrt(scales.sigma1_sq));
    std::normal_distribution<double> n2(0.0, std::sqrt(scales.sigma2_sq));
    // Upper triangle including the diagonal; the lower triangle is mirrored,
    // never sampled independently.
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = i; j < p; ++j) {
            const double e = n1(rng);
            report.noisy_gram(i, j) += e;
            if (j != i) report.noisy_gram(j, i) = report.noisy_gram(i, j);
        }
    }
    for (Eigen::Index i = 0; i < p; ++i) report.noisy_moment(i) += n2(rng);
    return report;
}

}  // namespace ldpglm
