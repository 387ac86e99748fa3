#pragma once

#include <cstdint>
#include <vector>

#include "gradsec/data.hpp"
#include "gradsec/model.hpp"
#include "gradsec/nn.hpp"
#include "gradsec/shield.hpp"
#include "gradsec/trace.hpp"

namespace gradsec {

struct ClientState {
    int id = 0;
    Dataset data;
    bool tee_capable = true;  // without a TEE the policy cannot hide this client's trace
    std::uint64_t seed = 0;   // drives this client's batch shuffles
    Model local_model;        // last locally trained model
};

// snapshots[t] holds the global weights *before* cycle t, so after k cycles
// the history has k+1 entries and snapshot differencing is always possible.
struct ServerState {
    Model global;
    int cycle = 0;
    std::vector<std::vector<Tensor>> snapshots;

    static ServerState init(Model global);
};

struct ClientUpdate {
    std::vector<Tensor> weights;  // per layer, empty for pools
    int samples = 0;
};

struct CycleReport {
    int cycle = 0;
    ProtectedSet pset;
    std::vector<RawTrace> traces;       // one per client, full fidelity
    std::vector<ClientUpdate> updates;  // matching order
    std::vector<double> client_loss;    // mean training loss per client
};

// One FL round: draws the cycle's protected set (one policy RNG draw for
// dynamic policies), trains every client locally from the current global
// model, aggregates, advances the cycle counter, appends a snapshot.
CycleReport run_cycle(ServerState& server, std::vector<ClientState>& clients,
                      const TrainConfig& train, const ShieldPolicy& policy, Rng& policy_rng);

// sample-count-weighted FedAvg over per-layer weight tensors
std::vector<Tensor> aggregate(const std::vector<ClientUpdate>& updates);

// (before - after) / lr: recovers the aggregate gradient an attacker infers
// from two consecutive snapshots of a model trained with rate lr.
std::vector<Tensor> snapshot_delta(const std::vector<Tensor>& before,
                                   const std::vector<Tensor>& after, double lr);

// The view of one client's cycle trace after shielding. Clients without TEE
// support leak their full trace regardless of policy.
AttackerView client_view(const CycleReport& report, const std::vector<ClientState>& clients,
                         int client_index);

}  // namespace gradsec
