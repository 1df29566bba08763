#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "sata/mdp.hpp"
#include "sata/network.hpp"
#include "sata/rng.hpp"

namespace sata {

class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fixed-capacity ring of transitions; the oldest entry is evicted first.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(const MdpTransition& t);
    std::size_t size() const noexcept { return size_; }
    std::size_t capacity() const noexcept { return storage_.size(); }
    /// Logical index 0 is the oldest stored transition.
    const MdpTransition& at(std::size_t i) const;

    /// Distinct logical indices drawn uniformly (Floyd's algorithm).
    std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const;

private:
    std::vector<MdpTransition> storage_;
    std::size_t head_ = 0;  // next write slot
    std::size_t size_ = 0;
};

struct EpsilonSchedule {
    double start = 1.0;
    double end = 0.05;
    double decay_fraction = 0.6;  // of the planned decision steps

    double at(std::uint64_t step, std::uint64_t planned_steps) const;
};

struct TrainConfig {
    double gamma = 0.95;
    std::size_t batch = 64;
    std::size_t replay_capacity = 200000;
    std::uint64_t target_sync_steps = 500;
    EpsilonSchedule epsilon;
    AdamConfig adam;
    NormalizationScales scales;
    std::size_t episodes = 800;

    void validate() const;
};

/// Uniform over unmasked actions with probability `epsilon`, else argmax (ties to lowest index).
std::size_t select_action(std::span<const double> q, const ActionMask& mask, double epsilon, Rng& rng);
std::size_t greedy_action(std::span<const double> q, const ActionMask& mask);

struct Batch {
    std::vector<const MdpTransition*> items;
};

/// y = r + gamma * max over unmasked actions of target(s').
std::vector<double> compute_targets(const Batch& batch, const QNetwork& target, double gamma, const ActionMask& mask,
                                    const NormalizationScales& scales);

/// Mean squared TD loss and its gradient with respect to `net` parameters.
double td_loss(const QNetwork& net, const Batch& batch, std::span<const double> targets,
               const NormalizationScales& scales, std::span<double> grad);

/// One optimizer update on `net`; returns the pre-update loss.
double train_step(QNetwork& net, const QNetwork& target, const Batch& batch, AdamOptimizer& opt, double gamma,
                  const ActionMask& mask, const NormalizationScales& scales);

void sync_target(const QNetwork& net, QNetwork& target);

/// Deep Q-learner: prediction and target networks, replay, epsilon-greedy.
class DqnLearner final : public ValueLearnerPort {
public:
    DqnLearner(std::unique_ptr<QNetwork> net, TrainConfig config, std::uint64_t seed, std::size_t action_count);

    std::size_t select(const StateVector& state, const ActionMask& mask) override;
    void observe(const MdpTransition& transition) override;

    /// Greedy mode: epsilon 0, no learning.
    void set_greedy(bool greedy) { greedy_ = greedy; }
    bool greedy() const noexcept { return greedy_; }
    void set_planned_steps(std::uint64_t steps) { planned_steps_ = steps; }
    double current_epsilon() const;

    const QNetwork& network() const { return *net_; }
    QNetwork& network() { return *net_; }
    const QNetwork& target_network() const { return *target_; }
    const ReplayBuffer& replay() const { return replay_; }
    const TrainConfig& config() const { return config_; }
    std::uint64_t decision_steps() const noexcept { return decision_steps_; }
    std::uint64_t updates() const noexcept { return updates_; }
    double last_loss() const noexcept { return last_loss_; }

    void save(std::ostream& out) const;
    void save(const std::filesystem::path& path) const;
    static std::unique_ptr<DqnLearner> load(std::istream& in, TrainConfig config);
    static std::unique_ptr<DqnLearner> load(const std::filesystem::path& path, TrainConfig config);

private:
    std::unique_ptr<QNetwork> net_;
    std::unique_ptr<QNetwork> target_;
    TrainConfig config_;
    AdamOptimizer optimizer_;
    ReplayBuffer replay_;
    ActionMask mask_;
    Rng explore_rng_;
    Rng replay_rng_;
    std::uint64_t decision_steps_ = 0;
    std::uint64_t planned_steps_ = 0;
    std::uint64_t updates_ = 0;
    double last_loss_ = 0.0;
    bool greedy_ = false;
};

}  // namespace sata
