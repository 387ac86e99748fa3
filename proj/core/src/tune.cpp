#include "gradsec/tune.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gradsec/error.hpp"
#include "gradsec/metrics.hpp"
#include "gradsec/shield.hpp"

namespace gradsec {

double tune_candidate_auc(const std::vector<double>& probs, int window_size, int layer_count,
                          const GradDataset& grad_train, const GradDataset& grad_val,
                          const AttackTrainConfig& trainer, std::uint64_t mask_seed) {
    ShieldPolicy policy = ShieldPolicy::moving(window_size, probs);
    policy.validate(layer_count);
    if (policy.window_probs.empty()) fail("tune: candidate probability vector must not be empty");
    grad_train.check_compatible(grad_val);
    if (int(grad_train.row_cycle.size()) != grad_train.rows())
        fail("tune: training rows need cycle provenance");

    // one window draw per distinct cycle, in ascending cycle order
    std::vector<int> cycles = grad_train.row_cycle;
    std::sort(cycles.begin(), cycles.end());
    cycles.erase(std::unique(cycles.begin(), cycles.end()), cycles.end());
    std::vector<std::pair<int, int>> window;  // cycle -> bottom location
    for (int c : cycles) {
        Rng rng = derive_rng(mask_seed, kStreamPolicy, std::uint64_t(c));
        window.emplace_back(c, rng.categorical(policy.window_probs) + 1);
    }
    auto location_of = [&](int cycle) {
        for (const auto& [c, loc] : window)
            if (c == cycle) return loc;
        fail("tune: row cycle missing from draw table");
    };

    GradDataset masked = grad_train;
    for (int r = 0; r < masked.rows(); ++r) {
        int loc = location_of(masked.row_cycle[std::size_t(r)]);
        for (std::size_t g = 0; g < masked.groups.size(); ++g) {
            int l = masked.groups[g].layer;
            if (l < loc || l >= loc + window_size) continue;
            masked.mask[std::size_t(r) * masked.groups.size() + g] = 1;
            for (int c = masked.groups[g].begin; c < masked.groups[g].end; ++c)
                masked.row(r)[c] = std::numeric_limits<float>::quiet_NaN();
        }
    }

    AttackModel model = train_attack_model(impute_mean(masked), trainer);
    std::vector<double> scores = model.score(impute_mean(grad_val));
    return auc(scores, grad_val.labels);
}

VmwTuneResult tune_vmw(const std::vector<std::vector<double>>& candidates, int window_size,
                       int layer_count, const GradDataset& grad_train, const GradDataset& grad_val,
                       const AttackTrainConfig& trainer, std::uint64_t seed) {
    if (candidates.empty()) fail("tune: candidate list must not be empty");
    VmwTuneResult result;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        double value = tune_candidate_auc(candidates[k], window_size, layer_count, grad_train,
                                          grad_val, trainer, mix_seed({seed, k}));
        result.candidate_auc.push_back(value);
        if (result.best_index < 0 || value < result.candidate_auc[std::size_t(result.best_index)]) {
            result.best_index = int(k);
            result.best = candidates[k];
        }
    }
    return result;
}

std::vector<std::vector<double>> vmw_candidate_grid(int locations, int count, std::uint64_t seed) {
    if (locations < 1) fail("tune: need at least one window location");
    if (count < 1) fail("tune: candidate count must be positive");
    std::vector<std::vector<double>> grid;
    grid.emplace_back(std::size_t(locations), 1.0 / double(locations));
    for (int k = 1; k < count; ++k) {
        Rng rng = derive_rng(seed, kStreamPolicy, 0xcad, std::uint64_t(k));
        std::vector<double> v(static_cast<std::size_t>(locations));
        double sum = 0.0;
        for (double& x : v) {
            x = -std::log(std::max(rng.uniform(), 1e-300));  // Exp(1) draws
            sum += x;
        }
        for (double& x : v) x /= sum;
        // exact renormalization so policy validation's sum check passes
        double s2 = 0.0;
        for (double x : v) s2 += x;
        v.back() += 1.0 - s2;
        grid.push_back(std::move(v));
    }
    return grid;
}

}  // namespace gradsec
