#pragma once

#include <stdexcept>
#include <string>

namespace ldpglm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownLink : Error { using Error::Error; };
struct DerivativeUnavailable : Error { using Error::Error; };
struct InvalidPrivacy : Error { using Error::Error; };
struct UnboundedLink : Error { using Error::Error; };
struct BoundViolation : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct AlreadyAugmented : Error { using Error::Error; };
struct IllConditioned : Error { using Error::Error; };
struct NewtonDiverged : Error { using Error::Error; };
struct NoRootInBracket : Error { using Error::Error; };
struct EmptyPublicSet : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct MissingColumn : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// Error rethrown by the pipeline with the failing stage attached, so a sweep
// can attribute failures per trial instead of aborting.
struct PipelineError : Error {
    std::string stage;
    PipelineError(std::string stage_, const std::string& what_)
        : Error(stage_ + ": " + what_), stage(std::move(stage_)) {}
};

}  // namespace ldpglm
