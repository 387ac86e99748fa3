#include "gradsec/attack_model.hpp"

#include <algorithm>
#include <cmath>

#include "gradsec/error.hpp"
#include "gradsec/rng.hpp"

namespace gradsec {

AttackFamily attack_family_from_string(const std::string& name) {
    if (name == "logistic") return AttackFamily::Logistic;
    if (name == "forest") return AttackFamily::Forest;
    fail("unknown attack model family '" + name + "' (expected logistic|forest)");
}

const char* to_string(AttackFamily f) {
    return f == AttackFamily::Logistic ? "logistic" : "forest";
}

namespace {

void check_trainable(const GradDataset& d) {
    if (d.rows() < 2) fail("attack model: need at least 2 training rows");
    if (d.has_nan()) fail("attack model: training data has masked cells; impute first");
    bool pos = false, neg = false;
    for (std::uint8_t y : d.labels) (y ? pos : neg) = true;
    if (!pos || !neg) fail("attack model: training data has a single class");
}

AttackModel train_logistic(const GradDataset& d, const AttackTrainConfig& cfg) {
    int n = d.rows(), w = d.width;
    AttackModel m;
    m.family = AttackFamily::Logistic;
    m.mean.assign(std::size_t(w), 0.0f);
    m.scale.assign(std::size_t(w), 1.0f);
    for (int c = 0; c < w; ++c) {
        double sum = 0.0;
        for (int r = 0; r < n; ++r) sum += double(d.row(r)[c]);
        double mu = sum / double(n);
        double var = 0.0;
        for (int r = 0; r < n; ++r) {
            double v = double(d.row(r)[c]) - mu;
            var += v * v;
        }
        double sd = std::sqrt(var / double(n));
        m.mean[std::size_t(c)] = float(mu);
        m.scale[std::size_t(c)] = sd > 1e-12 ? float(sd) : 1.0f;
    }
    // standardize once up front
    std::vector<float> x(std::size_t(n) * std::size_t(w));
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < w; ++c)
            x[std::size_t(r) * w + c] =
                (d.row(r)[c] - m.mean[std::size_t(c)]) / m.scale[std::size_t(c)];

    std::vector<double> weights(std::size_t(w), 0.0);
    double bias = 0.0;
    std::vector<double> grad(static_cast<std::size_t>(w));
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double gbias = 0.0;
        for (int r = 0; r < n; ++r) {
            const float* xr = x.data() + std::size_t(r) * w;
            double z = bias;
            for (int c = 0; c < w; ++c) z += weights[std::size_t(c)] * double(xr[c]);
            double p = 1.0 / (1.0 + std::exp(-z));
            double err = (p - double(d.labels[std::size_t(r)])) / double(n);
            for (int c = 0; c < w; ++c) grad[std::size_t(c)] += err * double(xr[c]);
            gbias += err;
        }
        for (int c = 0; c < w; ++c)
            weights[std::size_t(c)] -=
                cfg.lr * (grad[std::size_t(c)] + cfg.l2 * weights[std::size_t(c)]);
        bias -= cfg.lr * gbias;
    }
    m.weights.assign(weights.begin(), weights.end());
    m.bias = float(bias);
    return m;
}

struct TreeBuilder {
    const GradDataset& d;
    const AttackTrainConfig& cfg;
    Rng& rng;
    int feature_draws;
    std::vector<AttackModel::Node> nodes;

    int build(std::vector<int>& rows, int depth) {
        int idx = int(nodes.size());
        nodes.emplace_back();
        int pos = 0;
        for (int r : rows) pos += d.labels[std::size_t(r)] ? 1 : 0;
        double p = double(pos) / double(rows.size());
        nodes[std::size_t(idx)].prob = float(p);
        if (depth >= cfg.max_depth || pos == 0 || pos == int(rows.size()) ||
            int(rows.size()) < 2 * cfg.min_leaf)
            return idx;

        double parent_gini = 1.0 - p * p - (1.0 - p) * (1.0 - p);
        int best_feature = -1;
        float best_threshold = 0.0f;
        double best_gain = 1e-12;

        // random feature subset, without replacement, in draw order
        std::vector<int> feats;
        std::vector<std::uint8_t> seen;
        for (int t = 0; t < feature_draws && int(feats.size()) < d.width; ++t) {
            int f = int(rng.below(std::uint64_t(d.width)));
            if (seen.empty()) seen.assign(std::size_t(d.width), 0);
            if (seen[std::size_t(f)]) continue;
            seen[std::size_t(f)] = 1;
            feats.push_back(f);
        }

        std::vector<std::pair<float, std::uint8_t>> vals(rows.size());
        for (int f : feats) {
            for (std::size_t i = 0; i < rows.size(); ++i)
                vals[i] = {d.row(rows[i])[f], d.labels[std::size_t(rows[i])]};
            std::sort(vals.begin(), vals.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            int left_n = 0, left_pos = 0;
            int total = int(rows.size());
            for (int i = 0; i + 1 < total; ++i) {
                left_n += 1;
                left_pos += vals[std::size_t(i)].second ? 1 : 0;
                if (vals[std::size_t(i)].first == vals[std::size_t(i + 1)].first) continue;
                if (left_n < cfg.min_leaf || total - left_n < cfg.min_leaf) continue;
                double pl = double(left_pos) / double(left_n);
                double pr = double(pos - left_pos) / double(total - left_n);
                double gini = (double(left_n) * (1.0 - pl * pl - (1.0 - pl) * (1.0 - pl)) +
                               double(total - left_n) * (1.0 - pr * pr - (1.0 - pr) * (1.0 - pr))) /
                              double(total);
                double gain = parent_gini - gini;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = float((double(vals[std::size_t(i)].first) +
                                            double(vals[std::size_t(i + 1)].first)) /
                                           2.0);
                }
            }
        }
        if (best_feature < 0) return idx;

        std::vector<int> left, right;
        for (int r : rows)
            (d.row(r)[best_feature] <= best_threshold ? left : right).push_back(r);
        if (left.empty() || right.empty()) return idx;
        nodes[std::size_t(idx)].feature = best_feature;
        nodes[std::size_t(idx)].threshold = best_threshold;
        int li = build(left, depth + 1);
        int ri = build(right, depth + 1);
        nodes[std::size_t(idx)].left = li;
        nodes[std::size_t(idx)].right = ri;
        return idx;
    }
};

AttackModel train_forest(const GradDataset& d, const AttackTrainConfig& cfg) {
    AttackModel m;
    m.family = AttackFamily::Forest;
    int n = d.rows();
    int feature_draws = std::max(1, int(std::lround(std::sqrt(double(d.width)))));
    for (int t = 0; t < cfg.trees; ++t) {
        Rng rng = derive_rng(cfg.seed, kStreamAttack, 0xf0e0, std::uint64_t(t));
        std::vector<int> rows(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) rows[std::size_t(i)] = int(rng.below(std::uint64_t(n)));
        TreeBuilder builder{d, cfg, rng, feature_draws, {}};
        builder.build(rows, 0);
        m.forest.push_back(std::move(builder.nodes));
    }
    return m;
}

}  // namespace

double AttackModel::score_row(const float* x) const {
    if (family == AttackFamily::Logistic) {
        double z = double(bias);
        for (std::size_t c = 0; c < weights.size(); ++c)
            z += double(weights[c]) * double((x[c] - mean[c]) / scale[c]);
        return 1.0 / (1.0 + std::exp(-z));
    }
    double sum = 0.0;
    for (const auto& tree : forest) {
        int i = 0;
        while (tree[std::size_t(i)].feature >= 0)
            i = x[std::size_t(tree[std::size_t(i)].feature)] <= tree[std::size_t(i)].threshold
                    ? tree[std::size_t(i)].left
                    : tree[std::size_t(i)].right;
        sum += double(tree[std::size_t(i)].prob);
    }
    return sum / double(forest.size());
}

std::vector<double> AttackModel::score(const GradDataset& d) const {
    if (d.has_nan()) fail("attack model: scoring data has masked cells; impute first");
    std::vector<double> out(std::size_t(d.rows()));
    for (int r = 0; r < d.rows(); ++r) out[std::size_t(r)] = score_row(d.row(r));
    return out;
}

AttackModel train_attack_model(const GradDataset& train, const AttackTrainConfig& cfg) {
    check_trainable(train);
    if (cfg.family == AttackFamily::Logistic) {
        if (cfg.epochs < 1 || cfg.lr <= 0.0) fail("attack model: bad logistic config");
        return train_logistic(train, cfg);
    }
    if (cfg.trees < 1 || cfg.max_depth < 1 || cfg.min_leaf < 1)
        fail("attack model: bad forest config");
    return train_forest(train, cfg);
}

}  // namespace gradsec
