#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sata/dqn.hpp"
#include "sata/network.hpp"
#include "sata/rng.hpp"
#include "sata/sim_engine.hpp"

namespace sata {

/// Uniform over the real devices.
EcdId decide_random(std::size_t ecd_count, Rng& rng);

/// Device with the earliest completion time for the ready task; ties to the lowest id.
EcdId decide_greedy_eft(const DecisionContext& ctx);

/// Greedy action of a dueling head over unmasked actions.
EcdId decide_dueling(const StateVector& observation, const ActionMask& mask, const DuelingNetwork& net,
                     const NormalizationScales& scales);

class RandomScheduler final : public SchedulerPort {
public:
    explicit RandomScheduler(std::uint64_t seed) : rng_(make_stream(seed, "random-policy")) {}
    EcdId decide(const DecisionContext& ctx) override;

private:
    Rng rng_;
};

class GreedyEftScheduler final : public SchedulerPort {
public:
    EcdId decide(const DecisionContext& ctx) override { return decide_greedy_eft(ctx); }
};

/// Upward-rank ordering on mean capability and mean rate, then append-only EFT.
class HeftStyleScheduler final : public SchedulerPort {
public:
    EcdId decide(const DecisionContext& ctx) override { return decide_greedy_eft(ctx); }
    std::optional<std::vector<double>> priority_keys(const TaskGraph& app, const MecConfig& mec) override;
};

/// Upward rank of every task (sink is 0).
std::vector<double> upward_ranks(const TaskGraph& app, double mean_capability, double mean_rate);

/// Greedy policy of a trained value network; no exploration, no learning.
class GreedyValueScheduler final : public SchedulerPort {
public:
    GreedyValueScheduler(const QNetwork& net, NormalizationScales scales) : net_(net), scales_(scales) {}
    EcdId decide(const DecisionContext& ctx) override;

private:
    const QNetwork& net_;
    NormalizationScales scales_;
};

enum class PolicyKind { Random, GreedyEft, HeftStyle, SataDrl, DuelingDqn };
PolicyKind parse_policy(const std::string& name);
std::string to_string(PolicyKind kind);

}  // namespace sata
