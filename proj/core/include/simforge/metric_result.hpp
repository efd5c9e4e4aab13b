#pragma once

#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace simforge {

enum class Orientation { similarity, distance };

struct MetricResult {
    std::string metric_id;
    double value = 0.0;
    std::optional<double> precision;
    std::optional<double> recall;
    Orientation orientation = Orientation::similarity;
    std::map<std::string, double> detail;
};

/// {"metric": id, "value": v, "precision": p, "recall": r, "detail": {...}}.
/// precision/recall are null when the metric does not define them.
nlohmann::json to_json(const MetricResult& result);

} // namespace simforge
