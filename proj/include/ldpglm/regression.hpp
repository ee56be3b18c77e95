#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ldpglm/errors.hpp"
#include "ldpglm/mechanism.hpp"

namespace ldpglm {

// Server-side aggregate of user reports. Raw sums until augmented;
// augment_with_public turns the pair into means (gram over n+m terms,
// moment over n), the two conventions coexist because the OLS solve is
// scale-invariant.
struct SufficientStats {
    Eigen::MatrixXd gram;
    Eigen::VectorXd moment;
    long n_private = 0;
    long m_public_in_gram = 0;
    bool normalized = false;
};

SufficientStats operator+(const SufficientStats& a, const SufficientStats& b);

SufficientStats aggregate(const std::vector<UserReport>& reports);

// Incremental form of aggregate; lets the pipeline stream reports without
// retaining them.
void accumulate(SufficientStats& stats, const UserReport& report);

// Public-data covariance augmentation: gram becomes the mean over the n
// noisy private terms plus the m exact public outer products, moment the
// mean over the n private terms. public_x rows are feature vectors.
SufficientStats augment_with_public(const SufficientStats& stats,
                                    const Eigen::MatrixXd& public_x);

struct OlsResult {
    Eigen::VectorXd w_ols;
    double min_singular_estimate = 0.0;
    double max_singular_estimate = 0.0;
    bool condition_warning = false;
};

// Solves gram * w = moment via SVD (valid for symmetric indefinite
// systems; the noisy gram need not be PSD). Warns when the condition
// estimate exceeds 1/tol, throws IllConditioned only when singular to
// working precision.
OlsResult solve_ols(const SufficientStats& stats, double tol = 1e-12);

}  // namespace ldpglm
