#pragma once

#include <cstdint>
#include <vector>

#include "gradsec/grad_dataset.hpp"

namespace gradsec {

enum class AttackFamily { Logistic, Forest };
AttackFamily attack_family_from_string(const std::string& name);
const char* to_string(AttackFamily f);

struct AttackTrainConfig {
    AttackFamily family = AttackFamily::Logistic;
    std::uint64_t seed = 0;
    // logistic: full-batch gradient descent on standardized features
    int epochs = 200;
    double lr = 0.5;
    double l2 = 1e-4;
    // forest
    int trees = 100;
    int max_depth = 4;
    int min_leaf = 2;
};

// Binary scorer over GradDataset rows. Logistic stores per-column
// standardization statistics from the training set and reuses them at
// scoring time; the forest works on raw features.
struct AttackModel {
    AttackFamily family = AttackFamily::Logistic;

    // logistic
    std::vector<float> weights;
    float bias = 0.0f;
    std::vector<float> mean, scale;

    // forest; feature = -1 marks a leaf carrying `prob`
    struct Node {
        int feature = -1;
        float threshold = 0.0f;
        int left = -1, right = -1;
        float prob = 0.0f;
    };
    std::vector<std::vector<Node>> forest;

    double score_row(const float* x) const;
    std::vector<double> score(const GradDataset& d) const;
};

// Fits a scorer to an imputed dataset (throws if any NaN remains or only one
// class is present). Deterministic for a fixed config.
AttackModel train_attack_model(const GradDataset& train, const AttackTrainConfig& cfg);

}  // namespace gradsec
