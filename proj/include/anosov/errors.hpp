#pragma once

#include <stdexcept>
#include <string>

namespace anosov {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Model construction / evaluation
struct NonInvertibleRoof : Error {
    explicit NonInvertibleRoof(const std::string& w) : Error("NonInvertibleRoof: " + w) {}
};
struct DegenerateFixedPoint : Error {
    explicit DegenerateFixedPoint(const std::string& w) : Error("DegenerateFixedPoint: " + w) {}
};
struct ClosedFormUnavailable : Error {
    explicit ClosedFormUnavailable(const std::string& w) : Error("ClosedFormUnavailable: " + w) {}
};
struct ModelError : Error {
    explicit ModelError(const std::string& w) : Error("ModelError: " + w) {}
};
struct ConeViolation : Error {
    double y1, y2, t;
    ConeViolation(const std::string& w, double py1, double py2, double pt)
        : Error("ConeViolation: " + w), y1(py1), y2(py2), t(pt) {}
};

// Box cover / graph
struct ResolutionTooCoarse : Error {
    explicit ResolutionTooCoarse(const std::string& w) : Error("ResolutionTooCoarse: " + w) {}
};
struct MemoryBudgetExceeded : Error {
    explicit MemoryBudgetExceeded(const std::string& w) : Error("MemoryBudgetExceeded: " + w) {}
};

// Laminations / sections
struct NoHitWithinBudget : Error {
    explicit NoHitWithinBudget(const std::string& w) : Error("NoHitWithinBudget: " + w) {}
};
struct LocalProductFailure : Error {
    explicit LocalProductFailure(const std::string& w) : Error("LocalProductFailure: " + w) {}
};
struct DegenerateDistance : Error {
    explicit DegenerateDistance(const std::string& w) : Error("DegenerateDistance: " + w) {}
};
struct BranchMismatch : Error {
    explicit BranchMismatch(const std::string& w) : Error("BranchMismatch: " + w) {}
};
struct LiftDiscontinuity : Error {
    explicit LiftDiscontinuity(const std::string& w) : Error("LiftDiscontinuity: " + w) {}
};
struct SmoothingDriftTooLarge : Error {
    explicit SmoothingDriftTooLarge(const std::string& w) : Error("SmoothingDriftTooLarge: " + w) {}
};
struct NonTransverseCrossing : Error {
    explicit NonTransverseCrossing(const std::string& w) : Error("NonTransverseCrossing: " + w) {}
};
struct InconsistentPipeline : Error {
    explicit InconsistentPipeline(const std::string& w) : Error("InconsistentPipeline: " + w) {}
};

// Configuration / preconditions
struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error("ConfigError: " + w) {}
};
struct PreconditionError : Error {
    explicit PreconditionError(const std::string& w) : Error("PreconditionError: " + w) {}
};

}  // namespace anosov
