#pragma once

#include <stdexcept>
#include <string>

namespace convexkit {

// Base of every error thrown by the library. kind() is the short error name
// used in CLI messages and result files.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(kind + (message.empty() ? "" : ": " + message)), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

#define CONVEXKIT_DECLARE_ERROR(Name)                                   \
    class Name : public Error {                                         \
    public:                                                             \
        explicit Name(const std::string& message = "") : Error(#Name, message) {} \
    }

CONVEXKIT_DECLARE_ERROR(NotPositiveDefinite);
CONVEXKIT_DECLARE_ERROR(NotPSD);
CONVEXKIT_DECLARE_ERROR(NoConvergence);
CONVEXKIT_DECLARE_ERROR(DomainError);
CONVEXKIT_DECLARE_ERROR(DimensionMismatch);
CONVEXKIT_DECLARE_ERROR(UnsupportedOperation);
CONVEXKIT_DECLARE_ERROR(HorizonExceedsDimension);
CONVEXKIT_DECLARE_ERROR(ZeroCutVector);
CONVEXKIT_DECLARE_ERROR(BudgetExhaustedInfeasible);
CONVEXKIT_DECLARE_ERROR(DegeneratePolygon);
CONVEXKIT_DECLARE_ERROR(SamplerFailure);
CONVEXKIT_DECLARE_ERROR(NotStrictlyFeasible);
CONVEXKIT_DECLARE_ERROR(BarrierMinimizationFailure);
CONVEXKIT_DECLARE_ERROR(MissingRegularity);
CONVEXKIT_DECLARE_ERROR(BreakdownZeroDirection);
CONVEXKIT_DECLARE_ERROR(LineSearchFailure);
CONVEXKIT_DECLARE_ERROR(EmptyIntersection);
CONVEXKIT_DECLARE_ERROR(GradientMapInversionFailure);
CONVEXKIT_DECLARE_ERROR(EmptyInterior);
CONVEXKIT_DECLARE_ERROR(MaxIterations);
CONVEXKIT_DECLARE_ERROR(InvariantBroken);
CONVEXKIT_DECLARE_ERROR(ZeroCoordinateSampling);
CONVEXKIT_DECLARE_ERROR(DegenerateChord);
CONVEXKIT_DECLARE_ERROR(RankDeficient);
CONVEXKIT_DECLARE_ERROR(MissingOptimum);
CONVEXKIT_DECLARE_ERROR(NonPositiveGap);
CONVEXKIT_DECLARE_ERROR(ConfigError);
CONVEXKIT_DECLARE_ERROR(ParseError);

#undef CONVEXKIT_DECLARE_ERROR

}  // namespace convexkit
