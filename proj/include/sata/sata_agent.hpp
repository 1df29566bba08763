#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sata/mdp.hpp"
#include "sata/sim_engine.hpp"

namespace sata {

/// Event-driven decision layer: turns each scheduling step into an MDP step
/// and forwards (state, reward) to a value learner.
///
/// The reward of step k is the reward of the task committed at step k; it is
/// delivered with the observation of step k+1, so the first step of an
/// episode carries no reward and stores no transition.
class SataAgent final : public SchedulerPort {
public:
    explicit SataAgent(ValueLearnerPort& learner, bool keep_transitions = false)
        : learner_(learner), keep_transitions_(keep_transitions) {}

    /// One MDP step. `reward` must be set exactly when a previous step exists.
    std::size_t step(const StateVector& observation, std::optional<double> reward, const ActionMask& mask);

    EcdId decide(const DecisionContext& ctx) override;
    void notify_outcome(const Outcome& outcome) override;
    void on_run_end(const StateVector& final_state) override;

    double episode_reward() const noexcept { return episode_reward_; }
    std::size_t steps() const noexcept { return tau_; }
    const std::vector<MdpTransition>& transitions() const noexcept { return transitions_; }
    void reset_episode();

private:
    ValueLearnerPort& learner_;
    bool keep_transitions_;
    std::size_t tau_ = 0;
    std::optional<StateVector> prev_state_;
    std::size_t prev_action_ = 0;
    std::optional<double> pending_reward_;
    double episode_reward_ = 0.0;
    std::vector<MdpTransition> transitions_;
};

struct LearningCurve {
    std::vector<double> episode_rewards;
};

/// Produces the applications of episode `e` (prepared, lct filled).
using EpisodeSource = std::function<std::vector<TaskGraph>(std::size_t episode)>;

/// Runs `episodes` training episodes of `learner` on fresh workloads.
LearningCurve train_agent(ValueLearnerPort& learner, std::size_t episodes, const EpisodeSource& source,
                          const MecConfig& mec, std::uint64_t seed, const SimOptions& options = {});

}  // namespace sata
