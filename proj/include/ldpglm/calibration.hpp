#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ldpglm/errors.hpp"
#include "ldpglm/linkfn.hpp"

namespace ldpglm {

enum class CalibrationMethod { Newton, Bisection };

struct CalibrationResult {
    double c_hat = 0.0;
    CalibrationMethod method = CalibrationMethod::Newton;
    int iterations = 0;
    double residual = 0.0;  // empirical_f(c_hat) - 1
    std::optional<std::pair<double, double>> bracket_used;
};

struct CalibrationOptions {
    double c0 = 1.0;          // Newton start
    double tol = 1e-10;       // on the residual |f_hat(c) - 1|
    int max_iter = 100;
    double bracket_hint = 6.0;  // initial bisection upper end (c_bar)
};

// ytilde_j = <x_j, w_ols> over the public pool.
Eigen::VectorXd project_public(const Eigen::MatrixXd& public_x,
                               const Eigen::VectorXd& w_ols);

// f_hat(c) = (c/m) sum_j g(c * ytilde_j) with g = Phi'' resp. f'.
double empirical_f(const LinkFunction& link, const Eigen::VectorXd& ytilde,
                   double c);

// Newton iteration on c * mean(g(c y)) - 1 with the exact derivative
// mean(g(c y) + c y g'(c y)). Iterates outside (0, 1e9], a vanishing
// denominator or max_iter exhaustion throw NewtonDiverged.
CalibrationResult newton_calibrate(const LinkFunction& link,
                                   const Eigen::VectorXd& ytilde,
                                   const CalibrationOptions& opts = {});

// Sign-based bisection on [1e-9, hi], hi doubling from bracket_hint until
// f_hat(hi) >= 1 (at most 40 doublings, else NoRootInBracket).
CalibrationResult bisection_calibrate(const LinkFunction& link,
                                      const Eigen::VectorXd& ytilde,
                                      const CalibrationOptions& opts = {});

// Newton when the second calibration derivative is available, transparent
// bisection fallback otherwise or on divergence.
CalibrationResult calibrate(const LinkFunction& link,
                            const Eigen::VectorXd& ytilde,
                            const CalibrationOptions& opts = {});

struct CalibrationOutcome {
    std::optional<CalibrationResult> result;
    std::string error;  // empty on success
};

// Element-wise calibrate over a shared ytilde; one link failing does not
// affect the others.
std::map<std::string, CalibrationOutcome> calibrate_many(
    const std::vector<LinkFunction>& links, const Eigen::VectorXd& ytilde,
    const CalibrationOptions& opts = {});

}  // namespace ldpglm
