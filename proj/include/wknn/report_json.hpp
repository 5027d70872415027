#pragma once

#include <json.hpp>

#include "wknn/bounds.hpp"
#include "wknn/core.hpp"
#include "wknn/metrics.hpp"
#include "wknn/population.hpp"

namespace wknn {

// Stable field names: tn/fn/fp/tp, precision/recall/f1/macro_f1.
void to_json(nlohmann::json& j, const ClassConfusion& e);
void to_json(nlohmann::json& j, const ConfusionMatrix& cm);
void to_json(nlohmann::json& j, const MetricReport& r);
void to_json(nlohmann::json& j, const WeightVector& q);
void to_json(nlohmann::json& j, const ProbabilityVector& p);
void to_json(nlohmann::json& j, const AccuracyTerms& t);
void to_json(nlohmann::json& j, const UniformErrorBound& b);
void to_json(nlohmann::json& j, const ConfusionBounds& b);
void to_json(nlohmann::json& j, const MetricBounds& b);
void to_json(nlohmann::json& j, const ErrorMasses& m);

/// Reads a ConfusionMatrix written by to_json.
ConfusionMatrix confusion_from_json(const nlohmann::json& j);

WeightVector weight_from_json(const nlohmann::json& j);

}  // namespace wknn
