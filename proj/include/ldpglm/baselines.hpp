#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "ldpglm/linkfn.hpp"
#include "ldpglm/regression.hpp"

namespace ldpglm {

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long samples = 0;
};

// Noiseless least squares (X^T X)^{-1} X^T y, same solver contract as
// solve_ols.
Eigen::VectorXd exact_ols(const Eigen::MatrixXd& features,
                          const Eigen::VectorXd& labels);

// Full-batch gradient descent on the empirical glm objective
// (1/n) sum Phi(<x_i, w>) - y_i <x_i, w>, from w = 0, fixed step.
Eigen::VectorXd nonprivate_glm_fit(const Eigen::MatrixXd& features,
                                   const Eigen::VectorXd& labels,
                                   const LinkFunction& link, int iters,
                                   double step);

double glm_objective(const Eigen::MatrixXd& features,
                     const Eigen::VectorXd& labels, const LinkFunction& link,
                     const Eigen::VectorXd& w);

Eigen::VectorXd glm_gradient(const Eigen::MatrixXd& features,
                             const Eigen::VectorXd& labels,
                             const LinkFunction& link,
                             const Eigen::VectorXd& w);

// Monte-Carlo estimate of c * E[g(<x, w> c)] under x ~ N(0, I_p/p), where
// g is the calibration derivative. Uses the exact 1-D reduction
// <x, w> ~ N(0, ||w||_2^2/p).
McEstimate population_f_mc(const LinkFunction& link, const Eigen::VectorXd& w,
                           double c, long samples, std::uint64_t seed);

}  // namespace ldpglm
