#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ldpglm/errors.hpp"

namespace ldpglm {

// Whether the bundle plays the role of a GLM loss Phi or of a non-linear
// regression link f. Calibration selects the derivative by this kind,
// never by name: Phi'' for glm losses, f' for nlr links.
enum class LinkKind { GlmLoss, NlrLink };

using ScalarFn = std::function<double(double)>;

struct LinkFunction {
    std::string name;
    LinkKind kind = LinkKind::GlmLoss;
    ScalarFn value;
    ScalarFn d1;
    ScalarFn d2;
    ScalarFn d3;  // optional for user links; empty disables Newton for glm losses
    double lipschitz_G = 0.0;            // Lipschitz constant of the calibration derivative
    std::optional<double> bound_L;       // sup of the calibration derivative; nullopt = unbounded
    double value_at_zero = 0.0;          // |f(0)|, used by the nlr noise scale

    bool has_d3() const { return static_cast<bool>(d3); }
};

// Derivative used inside calibration (Phi'' resp. f'). Total function.
double calib_d(const LinkFunction& link, double z);

// Its derivative, used in the Newton denominator (Phi''' resp. f'').
// Throws DerivativeUnavailable for glm losses registered without d3.
double calib_dd(const LinkFunction& link, double z);

bool has_calib_dd(const LinkFunction& link);

// Registry. Built-ins: logistic, boosting (glm losses); sigmoid, cubic
// (nlr links). Registration happens once, bundles are immutable afterwards.
const LinkFunction& get_link(const std::string& name);
void register_link(LinkFunction link);
std::vector<std::string> registered_links();

// Numerically stable 1/(1+e^-z), evaluated branch-wise by sign of z.
double sigmoid(double z);

// Lipschitz constant of the cubic link's f'(z) = z^2 on [-radius, radius].
// The cubic bundle itself is registered unbounded.
double cubic_lipschitz_on(double radius);

}  // namespace ldpglm
