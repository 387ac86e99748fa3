#include "gradsec/flsim.hpp"

#include "gradsec/error.hpp"

namespace gradsec {

ServerState ServerState::init(Model global) {
    ServerState s;
    s.global = std::move(global);
    s.snapshots.push_back(s.global.weight_snapshot());
    return s;
}

namespace {

RawTrace train_client(ClientState& client, const Model& global, const TrainConfig& cfg,
                      const ProtectedSet& pset, int cycle, double& mean_loss) {
    if (client.data.size() == 0) fail("client " + std::to_string(client.id) + " has no data");
    if (cfg.batch_size < 1) fail("train config: batch_size must be positive");
    if (cfg.epochs_per_cycle < 1) fail("train config: epochs_per_cycle must be positive");
    if (cfg.lr <= 0.0) fail("train config: lr must be positive");

    Model model = global;
    int n = model.layer_count();
    std::vector<int> bottoms = slice_bottoms(pset, n);

    RawTrace trace;
    trace.client_id = client.id;
    trace.cycle = cycle;

    double loss_sum = 0.0;
    int steps = 0;
    std::vector<int> order(client.data.size());
    for (int i = 0; i < client.data.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < cfg.epochs_per_cycle; ++epoch) {
        Rng shuffle_rng = derive_rng(client.seed, kStreamShuffle, std::uint64_t(cycle),
                                     std::uint64_t(epoch));
        shuffle_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += std::size_t(cfg.batch_size)) {
            std::size_t stop = std::min(order.size(), start + std::size_t(cfg.batch_size));
            std::vector<int> rows(order.begin() + long(start), order.begin() + long(stop));
            Batch batch = make_batch(client.data, rows);

            ForwardCache cache = forward(model, batch.X);
            BackwardResult back = backward(model, cache, batch.Y);

            StepRecord rec;
            rec.epoch = epoch;
            rec.batch = int(start / std::size_t(cfg.batch_size));
            rec.input = cache.act[0];
            rec.layers.resize(std::size_t(n));
            for (int l = 1; l <= n; ++l) {
                StepRecord::LayerRecord& lr = rec.layers[l - 1];
                if (model.is_weighted(l)) {
                    lr.weights = model.layers[l - 1].weights;  // pre-update
                    lr.grad = back.grads[l - 1];
                }
                lr.preact = cache.preact[l - 1];
                lr.act = cache.act[l];
                lr.delta = back.delta[l - 1];
            }
            for (int a : bottoms) rec.boundary.push_back({a, back.d_input[a - 1]});
            trace.steps.push_back(std::move(rec));

            sgd_step(model, back.grads, cfg.lr);
            loss_sum += back.loss;
            ++steps;
        }
    }
    mean_loss = loss_sum / double(steps);
    client.local_model = model;
    return trace;
}

}  // namespace

CycleReport run_cycle(ServerState& server, std::vector<ClientState>& clients,
                      const TrainConfig& train, const ShieldPolicy& policy, Rng& policy_rng) {
    if (clients.empty()) fail("run_cycle: no clients");
    int n = server.global.layer_count();
    CycleReport report;
    report.cycle = server.cycle;
    report.pset = resolve_policy(policy, n, server.cycle, policy_rng);

    for (ClientState& client : clients) {
        double mean_loss = 0.0;
        report.traces.push_back(
            train_client(client, server.global, train, report.pset, server.cycle, mean_loss));
        report.updates.push_back({client.local_model.weight_snapshot(), client.data.size()});
        report.client_loss.push_back(mean_loss);
    }

    server.global.load_weights(aggregate(report.updates));
    server.cycle += 1;
    server.snapshots.push_back(server.global.weight_snapshot());
    return report;
}

std::vector<Tensor> aggregate(const std::vector<ClientUpdate>& updates) {
    if (updates.empty()) fail("aggregate: no updates");
    std::size_t layers = updates[0].weights.size();
    double total = 0.0;
    for (const ClientUpdate& u : updates) {
        if (u.samples <= 0) fail("aggregate: client update with non-positive sample count");
        if (u.weights.size() != layers) fail("aggregate: layer count mismatch between updates");
        total += double(u.samples);
    }
    std::vector<Tensor> out;
    for (std::size_t l = 0; l < layers; ++l) {
        const Tensor& first = updates[0].weights[l];
        if (first.empty()) {
            out.emplace_back();
            continue;
        }
        std::vector<double> acc(first.size(), 0.0);
        for (const ClientUpdate& u : updates) {
            const Tensor& w = u.weights[l];
            if (w.shape != first.shape)
                fail("aggregate: layer " + std::to_string(l + 1) + " shape mismatch");
            double share = double(u.samples) / total;
            for (std::size_t i = 0; i < w.size(); ++i) acc[i] += share * double(w.data[i]);
        }
        Tensor t(first.shape);
        for (std::size_t i = 0; i < t.size(); ++i) t.data[i] = float(acc[i]);
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<Tensor> snapshot_delta(const std::vector<Tensor>& before,
                                   const std::vector<Tensor>& after, double lr) {
    if (lr <= 0.0) fail("snapshot_delta: lr must be positive");
    if (before.size() != after.size()) fail("snapshot_delta: layer count mismatch");
    std::vector<Tensor> out;
    for (std::size_t l = 0; l < before.size(); ++l) {
        if (before[l].empty() != after[l].empty())
            fail("snapshot_delta: layer " + std::to_string(l + 1) + " presence mismatch");
        if (before[l].empty()) {
            out.emplace_back();
            continue;
        }
        if (before[l].shape != after[l].shape)
            fail("snapshot_delta: layer " + std::to_string(l + 1) + " shape mismatch");
        Tensor t(before[l].shape);
        for (std::size_t i = 0; i < t.size(); ++i)
            t.data[i] = float((double(before[l].data[i]) - double(after[l].data[i])) / lr);
        out.push_back(std::move(t));
    }
    return out;
}

AttackerView client_view(const CycleReport& report, const std::vector<ClientState>& clients,
                         int client_index) {
    if (client_index < 0 || client_index >= int(report.traces.size()))
        fail("client_view: client index out of range");
    const RawTrace& trace = report.traces[std::size_t(client_index)];
    if (client_index < int(clients.size()) && !clients[std::size_t(client_index)].tee_capable) {
        ProtectedSet nothing;
        return redact(trace, nothing);
    }
    return redact(trace, report.pset);
}

}  // namespace gradsec
