#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gradsec {

// Result of one attack evaluation. `metric` names what `value` measures:
// "ImageLoss" (reconstruction distance), "AUC", or "MatchLoss" when a
// reconstruction ran without ground truth.
struct AttackOutcome {
    std::string kind;    // "DRIA" | "MIA" | "DPIA"
    std::string metric;
    double value = 0.0;
    std::uint64_t seed = 0;
    std::string policy;  // policy string of the run being attacked
    std::vector<double> curve;  // optimizer trajectory (DRIA), else empty
    std::string artifact_path;  // saved reconstruction, if any

    std::string to_json_text() const;
};

}  // namespace gradsec
