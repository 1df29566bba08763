#include "sata/sata_agent.hpp"

#include <stdexcept>
#include <string>

#include "sata/rng.hpp"

namespace sata {

std::size_t SataAgent::step(const StateVector& observation, std::optional<double> reward, const ActionMask& mask) {
    if (prev_state_) {
        if (!reward) throw std::logic_error("missing reward for a non-initial step");
        const MdpTransition t{*prev_state_, prev_action_, *reward, observation};
        learner_.observe(t);
        if (keep_transitions_) transitions_.push_back(t);
    } else if (reward) {
        throw std::logic_error("reward supplied on the first step of an episode");
    }
    const std::size_t action = learner_.select(observation, mask);
    if (!mask.valid(action)) throw std::logic_error("learner chose masked action " + std::to_string(action));
    prev_state_ = observation;
    prev_action_ = action;
    ++tau_;
    return action;
}

EcdId SataAgent::decide(const DecisionContext& ctx) {
    const auto reward = pending_reward_;
    pending_reward_.reset();
    return step(ctx.state, reward, ctx.mask);
}

void SataAgent::notify_outcome(const Outcome& outcome) {
    pending_reward_ = outcome.reward;
    episode_reward_ += outcome.reward;
}

void SataAgent::on_run_end(const StateVector& final_state) {
    if (prev_state_ && pending_reward_) {
        const MdpTransition t{*prev_state_, prev_action_, *pending_reward_, final_state};
        learner_.observe(t);
        if (keep_transitions_) transitions_.push_back(t);
    }
    learner_.end_episode();
    prev_state_.reset();
    pending_reward_.reset();
}

void SataAgent::reset_episode() {
    prev_state_.reset();
    pending_reward_.reset();
    episode_reward_ = 0.0;
    tau_ = 0;
}

LearningCurve train_agent(ValueLearnerPort& learner, std::size_t episodes, const EpisodeSource& source,
                          const MecConfig& mec, std::uint64_t seed, const SimOptions& options) {
    LearningCurve curve;
    SimOptions quiet = options;
    quiet.record_rows = false;
    for (std::size_t e = 0; e < episodes; ++e) {
        const auto apps = source(e);
        SataAgent agent(learner);
        run_simulation(apps, mec, agent, derive_seed(seed, "episode", e), quiet);
        curve.episode_rewards.push_back(agent.episode_reward());
    }
    return curve;
}

}  // namespace sata
