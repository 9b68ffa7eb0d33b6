#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polyjet/chart.hpp"
#include "polyjet/tensor.hpp"

namespace polyjet {

/// Outcome of a numeric transformation-law check over a sample domain.
///
/// `max_residual` is the largest absolute componentwise residual, measured in
/// the target chart. `worst_component` labels the entry with the largest
/// residual after pulling it back to the source chart through the homogeneous
/// part of the law, so a corrupted source component is named directly.
struct VerificationReport {
    std::string name;
    bool passed = true;
    double tolerance = 0.0;
    double max_residual = 0.0;
    std::vector<std::string> point_names;
    std::vector<double> worst_point;
    std::size_t samples = 0;
    std::string worst_component;
};

nlohmann::json to_json(const VerificationReport& r);

/// Residuals of one component block of a law at one point. `target` and
/// `source` share a shape; `letters` names its axes for reporting.
struct LawBlock {
    std::string name;
    std::vector<std::string> letters;
    NumArray target;  ///< in chart B, drives max_residual
    NumArray source;  ///< pulled back to chart A, drives worst_component
};

using LawResidual = std::vector<LawBlock>;

using LawEvaluator = std::function<LawResidual(const JetPoint& q, const InducedAt& at)>;

/// Chart points for every sample of `dom`. Every chart coordinate must be
/// covered (ConfigError).
std::vector<JetPoint> chart_points(const JetChart& chart, const SampleDomain& dom);

/// Runs `law` at each sample and aggregates. NaN residuals fail the check.
VerificationReport sweep(std::string name, const InducedTransform& it, const SampleDomain& dom,
                         double tol, const LawEvaluator& law);

/// Chart-A assignment helper.
Assignment assignment(const JetChart& chart, const JetPoint& q);

}  // namespace polyjet
