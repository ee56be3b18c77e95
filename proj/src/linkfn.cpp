#include "ldpglm/linkfn.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace ldpglm {

double sigmoid(double z) {
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

// sigma(z)(1-sigma(z)) written as e^{-|z|}/(1+e^{-|z|})^2; even in z and
// free of overflow for |z| > 700.
double logistic_d2(double z) {
    const double e = std::exp(-std::abs(z));
    const double q = 1.0 + e;
    return e / (q * q);
}

double logistic_d3(double z) {
    return logistic_d2(z) * (1.0 - 2.0 * sigmoid(z));
}

// Fourth derivative of log(1+e^z); d3 slot of the sigmoid nlr link.
double logistic_d4(double z) {
    const double s = sigmoid(z);
    return logistic_d2(z) * (1.0 - 6.0 * s + 6.0 * s * s);
}

double boosting_u(double z) { return 1.0 + z * z / 4.0; }

LinkFunction make_logistic() {
    LinkFunction f;
    f.name = "logistic";
    f.kind = LinkKind::GlmLoss;
    f.value = [](double z) {
        // log(1+e^z) without overflow
        return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    };
    f.d1 = [](double z) { return sigmoid(z); };
    f.d2 = logistic_d2;
    f.d3 = logistic_d3;
    f.lipschitz_G = 1.0;
    f.bound_L = 1.0;
    f.value_at_zero = std::log(2.0);
    return f;
}

LinkFunction make_boosting() {
    LinkFunction f;
    f.name = "boosting";
    f.kind = LinkKind::GlmLoss;
    f.value = [](double z) { return z / 2.0 + std::sqrt(boosting_u(z)); };
    f.d1 = [](double z) { return 0.5 + z / (4.0 * std::sqrt(boosting_u(z))); };
    f.d2 = [](double z) { return 0.25 * std::pow(boosting_u(z), -1.5); };
    f.d3 = [](double z) {
        return -(3.0 / 16.0) * z * std::pow(boosting_u(z), -2.5);
    };
    f.lipschitz_G = 3.0 / 16.0;
    f.bound_L = 0.25;
    f.value_at_zero = 1.0;
    return f;
}

LinkFunction make_sigmoid() {
    LinkFunction f;
    f.name = "sigmoid";
    f.kind = LinkKind::NlrLink;
    f.value = sigmoid;
    f.d1 = logistic_d2;   // f' coincides with the logistic Phi''
    f.d2 = logistic_d3;
    f.d3 = logistic_d4;
    f.lipschitz_G = 1.0;
    f.bound_L = 0.25;
    f.value_at_zero = 0.5;
    return f;
}

LinkFunction make_cubic() {
    LinkFunction f;
    f.name = "cubic";
    f.kind = LinkKind::NlrLink;
    f.value = [](double z) { return z * z * z / 3.0; };
    f.d1 = [](double z) { return z * z; };
    f.d2 = [](double z) { return 2.0 * z; };
    f.d3 = [](double) { return 2.0; };
    f.lipschitz_G = 0.0;  // see cubic_lipschitz_on
    f.bound_L = std::nullopt;
    f.value_at_zero = 0.0;
    return f;
}

std::map<std::string, LinkFunction>& registry() {
    static std::map<std::string, LinkFunction> links = [] {
        std::map<std::string, LinkFunction> m;
        for (auto&& f : {make_logistic(), make_boosting(), make_sigmoid(),
                         make_cubic()}) {
            m.emplace(f.name, f);
        }
        return m;
    }();
    return links;
}

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

double cubic_lipschitz_on(double radius) { return 2.0 * std::abs(radius); }

double calib_d(const LinkFunction& link, double z) {
    return link.kind == LinkKind::GlmLoss ? link.d2(z) : link.d1(z);
}

double calib_dd(const LinkFunction& link, double z) {
    if (link.kind == LinkKind::GlmLoss) {
        if (!link.d3)
            throw DerivativeUnavailable("link '" + link.name +
                                        "' has no third derivative");
        return link.d3(z);
    }
    return link.d2(z);
}

bool has_calib_dd(const LinkFunction& link) {
    return link.kind == LinkKind::NlrLink || link.has_d3();
}

const LinkFunction& get_link(const std::string& name) {
    std::lock_guard<std::mutex> lock(registry_mutex());
    auto it = registry().find(name);
    if (it == registry().end())
        throw UnknownLink("unknown link function '" + name + "'");
    return it->second;
}

void register_link(LinkFunction link) {
    if (!link.value || !link.d1 || !link.d2)
        throw Error("register_link: value, d1 and d2 are required");
    std::lock_guard<std::mutex> lock(registry_mutex());
    auto [it, inserted] = registry().emplace(link.name, std::move(link));
    if (!inserted)
        throw Error("link '" + it->first + "' is already registered");
}

std::vector<std::string> registered_links() {
    std::lock_guard<std::mutex> lock(registry_mutex());
    std::vector<std::string> names;
    for (const auto& [name, _] : registry()) names.push_back(name);
    return names;
}

}  // namespace ldpglm
