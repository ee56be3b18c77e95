#include "ldpglm/regression.hpp"

#include <limits>
#include <sstream>

namespace ldpglm {

SufficientStats operator+(const SufficientStats& a, const SufficientStats& b) {
    if (a.n_private == 0 && a.gram.size() == 0) return b;
    if (b.n_private == 0 && b.gram.size() == 0) return a;
    if (a.gram.rows() != b.gram.rows())
        throw DimensionMismatch("cannot add stats of different dimension");
    if (a.normalized != b.normalized)
        throw Error("cannot add normalized and unnormalized stats");
    SufficientStats out;
    out.gram = a.gram + b.gram;
    out.moment = a.moment + b.moment;
    out.n_private = a.n_private + b.n_private;
    out.m_public_in_gram = a.m_public_in_gram + b.m_public_in_gram;
    out.normalized = a.normalized;
    return out;
}

void accumulate(SufficientStats& stats, const UserReport& report) {
    if (stats.n_private == 0 && stats.gram.size() == 0) {
        stats.gram = report.noisy_gram;
        stats.moment = report.noisy_moment;
        stats.n_private = 1;
        return;
    }
    if (stats.gram.rows() != report.noisy_gram.rows())
        throw DimensionMismatch("report dimension does not match aggregate");
    stats.gram += report.noisy_gram;
    stats.moment += report.noisy_moment;
    ++stats.n_private;
}

SufficientStats aggregate(const std::vector<UserReport>& reports) {
    SufficientStats stats;
    for (const auto& r : reports) accumulate(stats, r);
    return stats;
}

SufficientStats augment_with_public(const SufficientStats& stats,
                                    const Eigen::MatrixXd& public_x) {
    if (stats.normalized)
        throw AlreadyAugmented("stats are already augmented/normalized");
    if (stats.n_private <= 0)
        throw Error("augment_with_public requires at least one private report");
    if (public_x.rows() > 0 && public_x.cols() != stats.gram.rows())
        throw DimensionMismatch("public feature dimension mismatch");

    const long n = stats.n_private;
    const long m = public_x.rows();
    SufficientStats out;
    out.gram = stats.gram;
    if (m > 0) out.gram += public_x.transpose() * public_x;
    out.gram /= static_cast<double>(n + m);
    out.moment = stats.moment / static_cast<double>(n);
    out.n_private = n;
    out.m_public_in_gram = m;
    out.normalized = true;
    return out;
}

OlsResult solve_ols(const SufficientStats& stats, double tol) {
    const Eigen::Index p = stats.gram.rows();
    if (p < 1) throw Error("solve_ols: empty stats");
    if (stats.moment.size() != p)
        throw DimensionMismatch("gram/moment dimension mismatch");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        stats.gram, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double max_sv = sv(0);
    const double min_sv = sv(p - 1);

    const double eps = std::numeric_limits<double>::epsilon();
    if (!(min_sv > max_sv * eps * static_cast<double>(p))) {
        std::ostringstream msg;
        msg << "gram matrix singular to working precision (sigma_min="
            << min_sv << ", sigma_max=" << max_sv << ")";
        throw IllConditioned(msg.str());
    }

    OlsResult res;
    res.w_ols = svd.solve(stats.moment);
    res.min_singular_estimate = min_sv;
    res.max_singular_estimate = max_sv;
    res.condition_warning = min_sv < tol * max_sv;
    if (!res.w_ols.allFinite())
        throw IllConditioned("OLS solution is not finite");
    return res;
}

}  // namespace ldpglm
