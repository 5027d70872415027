#include "wknn/report_json.hpp"

namespace wknn {

using nlohmann::json;

void to_json(json& j, const ClassConfusion& e) {
  j = json{{"tn", e.tn}, {"fn", e.fn}, {"fp", e.fp}, {"tp", e.tp}};
}

void to_json(json& j, const ConfusionMatrix& cm) {
  j = json{{"kind", cm.kind() == ConfusionKind::empirical ? "empirical" : "population"},
           {"per_class", cm.per_class()}};
  if (cm.counts()) {
    json counts = json::array();
    for (const auto& c : *cm.counts()) {
      counts.push_back({{"tn", c.tn}, {"fn", c.fn}, {"fp", c.fp}, {"tp", c.tp}});
    }
    j["counts"] = counts;
    j["samples"] = cm.sample_count();
  }
}

void to_json(json& j, const MetricReport& r) {
  j = json{{"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1},
           {"macro_f1", r.macro_f1}};
}

void to_json(json& j, const WeightVector& q) { j = q.values(); }

void to_json(json& j, const ProbabilityVector& p) { j = p.values(); }

void to_json(json& j, const AccuracyTerms& t) { j = json{{"p", t.p}, {"Delta", t.delta_gap}}; }

void to_json(json& j, const UniformErrorBound& b) {
  j = json{{"value", b.value},
           {"bias_term", b.bias_term},
           {"noise_term", b.noise_term},
           {"deviation_term", b.deviation_term},
           {"log_shattering", b.log_shattering},
           {"side_probability", b.side_probability},
           {"valid", b.valid}};
}

void to_json(json& j, const ConfusionBounds& b) {
  json rows = json::array();
  bool any_vacuous = false;
  for (const auto& c : b.per_class) {
    rows.push_back({{"tn", c.tn}, {"fn", c.fn}, {"fp", c.fp}, {"tp", c.tp}, {"vacuous", c.vacuous}});
    any_vacuous = any_vacuous || c.vacuous;
  }
  j = json{{"per_class", rows}, {"root_term", b.root_term}, {"vacuous", any_vacuous}};
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

void to_json(json& j, const MetricBounds& b) {
  json rows = json::array();
  for (const auto& c : b.per_class) {
    rows.push_back({{"precision", optional_number(c.precision)},
                    {"recall", optional_number(c.recall)},
                    {"f1", optional_number(c.f1)}});
  }
  j = json{{"per_class", rows}, {"macro_f1", optional_number(b.macro_f1)}, {"warnings", b.warnings}};
}

void to_json(json& j, const ErrorMasses& m) {
  j = json{{"tne", m.tne}, {"fne", m.fne}, {"fpe", m.tne}, {"tpe", m.fne}};
}

ConfusionMatrix confusion_from_json(const json& j) {
  std::vector<ClassConfusion> rows;
  for (const auto& r : j.at("per_class")) {
    rows.push_back({r.at("tn").get<double>(), r.at("fn").get<double>(), r.at("fp").get<double>(),
                    r.at("tp").get<double>()});
  }
  const auto kind = j.value("kind", std::string("population")) == "empirical"
                        ? ConfusionKind::empirical
                        : ConfusionKind::population;
  return ConfusionMatrix(std::move(rows), kind);
}

WeightVector weight_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("weights must be a JSON array of numbers");
  return WeightVector(j.get<std::vector<double>>());
}

}  // namespace wknn
