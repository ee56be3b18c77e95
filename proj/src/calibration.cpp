#include "ldpglm/calibration.hpp"

#include <cmath>
#include <sstream>

namespace ldpglm {

Eigen::VectorXd project_public(const Eigen::MatrixXd& public_x,
                               const Eigen::VectorXd& w_ols) {
    if (public_x.rows() == 0) throw EmptyPublicSet("public set is empty");
    if (public_x.cols() != w_ols.size())
        throw DimensionMismatch("public features and w_ols disagree");
    return public_x * w_ols;
}

double empirical_f(const LinkFunction& link, const Eigen::VectorXd& ytilde,
                   double c) {
    const Eigen::Index m = ytilde.size();
    double sum = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) sum += calib_d(link, c * ytilde(j));
    return c * sum / static_cast<double>(m);
}

namespace {

void check_nonempty(const Eigen::VectorXd& ytilde) {
    if (ytilde.size() == 0)
        throw EmptyPublicSet("calibration requires a nonempty projection");
}

}  // namespace

CalibrationResult newton_calibrate(const LinkFunction& link,
                                   const Eigen::VectorXd& ytilde,
                                   const CalibrationOptions& opts) {
    check_nonempty(ytilde);
    if (!has_calib_dd(link))
        throw DerivativeUnavailable("Newton calibration needs calib_dd");

    const Eigen::Index m = ytilde.size();
    double c = opts.c0;
    for (int iter = 0; iter <= opts.max_iter; ++iter) {
        double sum_g = 0.0;
        double sum_den = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            const double z = c * ytilde(j);
            const double g = calib_d(link, z);
            sum_g += g;
            sum_den += g + z * calib_dd(link, z);
        }
        const double mean_g = sum_g / static_cast<double>(m);
        const double residual = c * mean_g - 1.0;
        if (std::abs(residual) <= opts.tol) {
            CalibrationResult res;
            res.c_hat = c;
            res.method = CalibrationMethod::Newton;
            res.iterations = iter;
            res.residual = residual;
            return res;
        }
        if (iter == opts.max_iter) break;

        const double den = sum_den / static_cast<double>(m);
        if (!std::isfinite(den) || std::abs(den) < 1e-14)
            throw NewtonDiverged("Newton denominator vanished");
        c -= residual / den;
        if (!std::isfinite(c) || c <= 0.0 || c > 1e9)
            throw NewtonDiverged("Newton iterate left (0, 1e9]");
    }
    throw NewtonDiverged("Newton did not converge within max_iter");
}

CalibrationResult bisection_calibrate(const LinkFunction& link,
                                      const Eigen::VectorXd& ytilde,
                                      const CalibrationOptions& opts) {
    check_nonempty(ytilde);

    const double lo0 = 1e-9;
    double hi = opts.bracket_hint;
    int doublings = 0;
    double fhi = empirical_f(link, ytilde, hi);
    while (fhi < 1.0) {
        if (++doublings > 40) {
            std::ostringstream msg;
            msg << "no sign change up to hi=" << hi << " (f_hat(hi)=" << fhi
                << "); the link may violate f(c_bar) >= 1+tau";
            throw NoRootInBracket(msg.str());
        }
        hi *= 2.0;
        fhi = empirical_f(link, ytilde, hi);
    }
    double lo = lo0;
    const double flo = empirical_f(link, ytilde, lo);
    if (flo - 1.0 > 0.0) {
        std::ostringstream msg;
        msg << "f_hat(" << lo << ")=" << flo << " already exceeds 1";
        throw NoRootInBracket(msg.str());
    }

    CalibrationResult res;
    res.method = CalibrationMethod::Bisection;
    res.bracket_used = std::make_pair(lo, hi);
    for (int iter = 1; iter <= 500; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double fm = empirical_f(link, ytilde, mid) - 1.0;
        if (std::abs(fm) <= opts.tol) {
            res.c_hat = mid;
            res.iterations = iter;
            res.residual = fm;
            return res;
        }
        if (fm < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    throw NoRootInBracket("bisection failed to reach residual tolerance");
}

CalibrationResult calibrate(const LinkFunction& link,
                            const Eigen::VectorXd& ytilde,
                            const CalibrationOptions& opts) {
    if (has_calib_dd(link)) {
        try {
            CalibrationResult res = newton_calibrate(link, ytilde, opts);
            if (res.c_hat > 0.0) return res;
        } catch (const NewtonDiverged&) {
            // fall through to bisection
        }
    }
    return bisection_calibrate(link, ytilde, opts);
}

std::map<std::string, CalibrationOutcome> calibrate_many(
    const std::vector<LinkFunction>& links, const Eigen::VectorXd& ytilde,
    const CalibrationOptions& opts) {
    std::map<std::string, CalibrationOutcome> out;
    for (const auto& link : links) {
        CalibrationOutcome outcome;
        try {
            outcome.result = calibrate(link, ytilde, opts);
        } catch (const Error& e) {
            outcome.error = e.what();
        }
        out[link.name] = std::move(outcome);
    }
    return out;
}

}  // namespace ldpglm
