#include "gradsec/dpia.hpp"

#include "gradsec/error.hpp"
#include "gradsec/metrics.hpp"

namespace gradsec {

namespace {

// flattens one backward pass into grad-dataset groups, masking per `pset`
void gradient_row(const Model& model, const Batch& batch, const GradDataset& layout,
                  const ProtectedSet& pset, std::vector<std::vector<float>>& per_layer,
                  std::vector<std::uint8_t>& hidden) {
    ForwardCache cache = forward(model, batch.X);
    BackwardResult back = backward(model, cache, batch.Y);
    per_layer.assign(layout.groups.size(), {});
    hidden.assign(layout.groups.size(), 0);
    for (std::size_t g = 0; g < layout.groups.size(); ++g) {
        int l = layout.groups[g].layer;
        if (pset.contains(l)) {
            hidden[g] = 1;
            continue;
        }
        const Tensor& t = back.grads[std::size_t(l - 1)];
        per_layer[g].assign(t.data.begin(), t.data.end());
    }
}

}  // namespace

GradDataset dpia_build_dataset(const Model& arch, const std::vector<std::vector<Tensor>>& snapshots,
                               const std::vector<std::vector<Batch>>& aux_prop,
                               const std::vector<std::vector<Batch>>& aux_nonprop,
                               const std::vector<ProtectedSet>& schedule) {
    std::size_t cycles = schedule.size();
    if (cycles == 0) fail("dpia dataset: empty schedule");
    if (snapshots.size() <= cycles)
        fail("dpia dataset: need " + std::to_string(cycles + 1) + " snapshots, have " +
             std::to_string(snapshots.size()));
    if (aux_prop.size() != cycles || aux_nonprop.size() != cycles)
        fail("dpia dataset: auxiliary batch lists must cover every cycle");

    GradDataset d = make_grad_dataset(arch);
    Model model = arch;
    std::vector<std::vector<float>> per_layer;
    std::vector<std::uint8_t> hidden;
    for (std::size_t t = 0; t < cycles; ++t) {
        model.load_weights(snapshots[t]);
        for (const Batch& b : aux_prop[t]) {
            gradient_row(model, b, d, schedule[t], per_layer, hidden);
            d.append_row(per_layer, hidden, 1, int(t));
        }
        for (const Batch& b : aux_nonprop[t]) {
            gradient_row(model, b, d, schedule[t], per_layer, hidden);
            d.append_row(per_layer, hidden, 0, int(t));
        }
    }
    return d;
}

GradDataset dpia_victim_rows(const Model& arch, const std::vector<std::vector<Tensor>>& snapshots,
                             double lr, const std::vector<ProtectedSet>& schedule,
                             const std::vector<std::uint8_t>& presence) {
    std::size_t cycles = schedule.size();
    if (cycles == 0) fail("dpia victim rows: empty schedule");
    if (snapshots.size() <= cycles)
        fail("dpia victim rows: need " + std::to_string(cycles + 1) + " snapshots");
    if (presence.size() != cycles)
        fail("dpia victim rows: presence labels must cover every cycle");

    GradDataset d = make_grad_dataset(arch);
    std::vector<std::vector<float>> per_layer(d.groups.size());
    std::vector<std::uint8_t> hidden(d.groups.size());
    for (std::size_t t = 0; t < cycles; ++t) {
        std::vector<Tensor> delta = snapshot_delta(snapshots[t], snapshots[t + 1], lr);
        for (std::size_t g = 0; g < d.groups.size(); ++g) {
            int l = d.groups[g].layer;
            if (schedule[t].contains(l)) {
                hidden[g] = 1;
                per_layer[g].clear();
            } else {
                hidden[g] = 0;
                const Tensor& tens = delta[std::size_t(l - 1)];
                per_layer[g].assign(tens.data.begin(), tens.data.end());
            }
        }
        d.append_row(per_layer, hidden, presence[t] ? 1 : 0, int(t));
    }
    return d;
}

AttackOutcome dpia_run(const GradDataset& references, const GradDataset& victim,
                       const AttackTrainConfig& trainer) {
    references.check_compatible(victim);
    GradDataset train = impute_mean(references);
    GradDataset test = impute_mean(victim);
    AttackModel model = train_attack_model(train, trainer);
    std::vector<double> scores = model.score(test);
    AttackOutcome out;
    out.kind = "DPIA";
    out.metric = "AUC";
    out.value = auc(scores, test.labels);
    out.seed = trainer.seed;
    return out;
}

}  // namespace gradsec
