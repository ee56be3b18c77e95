#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "ldpglm/errors.hpp"
#include "ldpglm/linkfn.hpp"
#include "ldpglm/rng.hpp"

namespace ldpglm {

enum class Mode { Glm, Nlr };

struct PrivacyParams {
    double epsilon = 1.0;
    double delta = 0.1;

    // epsilon = inf encodes the explicit noise-disabled mode.
    bool disabled() const { return std::isinf(epsilon); }
    // The (eps, delta) guarantee is stated for eps < 1; larger values are
    // accepted (the experiments use eps up to 20) but flagged.
    bool large_epsilon_warning() const { return !disabled() && epsilon >= 1.0; }
};

struct DataBounds {
    double r = 1.0;       // l1-ball radius for features
    // l2-ball radius used to calibrate the release noise (the privacy
    // guarantee rests on l2 sensitivity). 0 means "fall back to r", which is
    // always a valid l2 bound since ||x||_2 <= ||x||_1. Setting the exact l2
    // radius matters: for the +-1/p design it is 1/sqrt(p), shrinking the
    // matrix noise variance by p^2.
    double r2 = 0.0;
    double y_bound = 1.0; // |y| bound, 1 for glm
    double C = 0.0;       // response noise bound for nlr

    double l2_radius() const { return r2 > 0.0 ? r2 : r; }
};

struct NoiseScales {
    double sigma1_sq = 0.0;  // per-entry variance of the matrix release
    double sigma2_sq = 0.0;  // per-coordinate variance of the vector release
    bool disabled = false;
};

struct UserReport {
    Eigen::MatrixXd noisy_gram;    // x x^T + E1, exactly symmetric
    Eigen::VectorXd noisy_moment;  // x y + E2
};

NoiseScales noise_scales(Mode mode, const DataBounds& bounds,
                         const LinkFunction& link, const PrivacyParams& priv);

// Throws BoundViolation when the record is outside the declared bounds.
// The mechanism never clips; callers must rescale before release.
void validate_record(const Eigen::VectorXd& x, double y,
                     const DataBounds& bounds, Mode mode);

// One user's randomized release. The upper triangle of E1 (diagonal
// included) is sampled i.i.d. in row-major order, then mirrored.
UserReport randomize_record(const Eigen::VectorXd& x, double y,
                            const NoiseScales& scales, const DataBounds& bounds,
                            Mode mode, Rng& rng);

}  // namespace ldpglm
