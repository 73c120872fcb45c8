#pragma once

#include <stdexcept>
#include <string>

namespace hilfer {

/// Base class for all library errors. The CLI prints these with a
/// machine-parsable "ERROR:<kind>:" prefix taken from kind().
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define HILFER_DEFINE_ERROR(Name)                                \
    class Name : public Error {                                  \
    public:                                                      \
        explicit Name(const std::string& what) : Error(#Name, what) {} \
    }

HILFER_DEFINE_ERROR(DomainError);
HILFER_DEFINE_ERROR(DivergenceError);
HILFER_DEFINE_ERROR(MeshError);
HILFER_DEFINE_ERROR(DimensionError);
HILFER_DEFINE_ERROR(SingularityError);
HILFER_DEFINE_ERROR(ResolventError);
HILFER_DEFINE_ERROR(ContourError);
HILFER_DEFINE_ERROR(TruncationError);
HILFER_DEFINE_ERROR(MonotonicityError);
HILFER_DEFINE_ERROR(HypothesisError);
HILFER_DEFINE_ERROR(ClassViolation);
HILFER_DEFINE_ERROR(BallViolation);
HILFER_DEFINE_ERROR(ConfigError);

#undef HILFER_DEFINE_ERROR

/// Picard iteration failed to contract within max_iter sweeps. Carries the
/// last measured contraction ratio so callers can decide how to shrink the
/// horizon before retrying.
class NonConvergence : public Error {
public:
    NonConvergence(int iterations, double last_ratio, const std::string& what)
        : Error("NonConvergence", what), iterations_(iterations), last_ratio_(last_ratio) {}
    int iterations() const noexcept { return iterations_; }
    double last_ratio() const noexcept { return last_ratio_; }

private:
    int iterations_;
    double last_ratio_;
};

}  // namespace hilfer
