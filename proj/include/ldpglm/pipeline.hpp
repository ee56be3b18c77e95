#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldpglm/calibration.hpp"
#include "ldpglm/mechanism.hpp"
#include "ldpglm/regression.hpp"

namespace ldpglm {

enum class Provenance { SyntheticBernoulli, SyntheticGaussian, Ingested };

struct Dataset {
    Eigen::MatrixXd features;               // one record per row
    std::optional<Eigen::VectorXd> labels;  // absent for the public pool
    DataBounds bounds;
    Provenance provenance = Provenance::SyntheticBernoulli;

    long n() const { return features.rows(); }
    int p() const { return static_cast<int>(features.cols()); }
};

struct EstimatorOutput {
    Eigen::VectorXd w_ols;
    double c_hat = 0.0;
    Eigen::VectorXd w_final;  // c_hat * w_ols, exactly
    CalibrationResult calibration;
    OlsResult ols_diag;
    Mode mode = Mode::Glm;
    bool augmented = false;
    bool privacy_warning = false;  // epsilon >= 1 (guarantee stated for eps < 1)
};

struct EstimateOptions {
    bool augment = false;
    CalibrationOptions calibration;
    std::uint64_t seed = 0;
};

// Full run of the one-round protocol: randomize every private record
// (user i's generator derived from seed and i), aggregate the reports as a
// stream, solve OLS, calibrate on the projected public pool, rescale.
// Errors are rethrown as PipelineError with the failing stage attached.
EstimatorOutput estimate(Mode mode, const Dataset& private_data,
                         const Dataset& public_data, const LinkFunction& link,
                         const PrivacyParams& priv,
                         const EstimateOptions& opts = {});

// Server side alone; the raw private data is already gone at this point.
EstimatorOutput estimate_from_stats(Mode mode, const SufficientStats& stats,
                                    const Eigen::MatrixXd& public_x,
                                    const LinkFunction& link,
                                    const EstimateOptions& opts,
                                    bool privacy_warning = false);

// Multi-loss estimation over one shared OLS solve (glm only: the releases
// do not depend on the loss). All outputs share w_ols bit-exactly; links
// whose calibration fails are reported in `failed`.
struct MultiEstimatorOutput {
    std::map<std::string, EstimatorOutput> outputs;
    std::map<std::string, std::string> failed;
};
MultiEstimatorOutput estimate_multi(const Dataset& private_data,
                                    const Dataset& public_data,
                                    const std::vector<LinkFunction>& links,
                                    const PrivacyParams& priv,
                                    const EstimateOptions& opts = {});

// 1 iff <x, w> >= 0; ties go to the positive class.
int predict_binary(const Eigen::VectorXd& w, const Eigen::VectorXd& x);

// Stream id constants for per-user seed derivation.
inline constexpr std::uint64_t kUserStream = 0x75736572ULL;  // "user"

}  // namespace ldpglm
