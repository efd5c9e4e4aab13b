#include "simforge/metric_result.hpp"

namespace simforge {

nlohmann::json to_json(const MetricResult& r) {
    nlohmann::json j;
    j["metric"] = r.metric_id;
    j["value"] = r.value;
    j["precision"] = r.precision ? nlohmann::json(*r.precision) : nlohmann::json(nullptr);
    j["recall"] = r.recall ? nlohmann::json(*r.recall) : nlohmann::json(nullptr);
    j["detail"] = nlohmann::json::object();
    for (const auto& [k, v] : r.detail) j["detail"][k] = v;
    return j;
}

} // namespace simforge
