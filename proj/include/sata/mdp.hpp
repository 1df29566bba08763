#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace sata {

/// Aggregate system observation handed to the scheduler at each decision.
struct StateVector {
    double sum_inter_rate = 0.0;  // Mbps, ordered device pairs
    double uplink_rate = 0.0;     // Mbps
    double sum_capability = 0.0;  // MIPS
    double ready_workload = 0.0;  // MI in the ready queue
    double queued_workload = 0.0; // MI committed to device queues

    static constexpr std::size_t kSize = 5;
    std::array<double, kSize> as_array() const {
        return {sum_inter_rate, uplink_rate, sum_capability, ready_workload, queued_workload};
    }
    bool operator==(const StateVector&) const = default;
};

struct NormalizationScales {
    double rate = 1000.0;
    double capability = 24000.0;
    double workload = 10000.0;
};

std::vector<double> normalize_state(const StateVector& raw, const NormalizationScales& scales = {});

struct RewardParams {
    double beta = 0.6;
    double psi = 5.0;
    double eta = 40.0;
    bool clamp_penalty = false;  // treat early completion as zero penalty
};

struct RewardTerms {
    double utility = 0.0;
    double duration = 0.0;
    double penalty = 0.0;
    double total() const { return utility - duration - penalty; }
};

class RewardError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Inputs to the three-term reward of one committed real task.
struct RewardInputs {
    double workload = 0.0;     // MI, must be > 0
    double max_arrival = 0.0;  // latest input arrival
    double queue_delay = 0.0;  // device readiness
    double exec = 0.0;         // execution time
    double finish = 0.0;
    double lct = 0.0;
};

RewardTerms reward_terms(const RewardInputs& in, const RewardParams& params);
inline double compute_reward(const RewardInputs& in, const RewardParams& params) {
    return reward_terms(in, params).total();
}

/// Validity over actions a^0..a^M; a^0 (the mobile user) is never valid.
class ActionMask {
public:
    explicit ActionMask(std::size_t ecd_count) : valid_(ecd_count + 1, true) { valid_[0] = false; }

    std::size_t size() const noexcept { return valid_.size(); }
    bool valid(std::size_t action) const { return action < valid_.size() && valid_[action]; }
    void set(std::size_t action, bool ok) { valid_.at(action) = ok; }
    std::size_t valid_count() const;

private:
    std::vector<bool> valid_;
};

struct MdpTransition {
    StateVector state;
    std::size_t action = 0;
    double reward = 0.0;
    StateVector next_state;
};

/// A value-based learner as seen by the decision layer.
class ValueLearnerPort {
public:
    virtual ~ValueLearnerPort() = default;
    virtual std::size_t select(const StateVector& state, const ActionMask& mask) = 0;
    virtual void observe(const MdpTransition& transition) = 0;
    /// Marks the end of an episode; no transition bridges two episodes.
    virtual void end_episode() {}
};

}  // namespace sata
