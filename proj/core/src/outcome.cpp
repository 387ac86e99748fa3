#include "gradsec/outcome.hpp"

#include <json.hpp>

namespace gradsec {

std::string AttackOutcome::to_json_text() const {
    nlohmann::json j;
    j["kind"] = kind;
    j["metric"] = metric;
    j["value"] = value;
    j["seed"] = seed;
    j["policy"] = policy;
    if (!curve.empty()) j["curve"] = curve;
    if (!artifact_path.empty()) j["artifact"] = artifact_path;
    return j.dump(2) + "\n";
}

}  // namespace gradsec
