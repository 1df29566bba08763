#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sata/baselines.hpp"
#include "sata/dqn.hpp"
#include "sata/mdp.hpp"
#include "sata/sata_agent.hpp"
#include "sata/sim_engine.hpp"
#include "sata/workload.hpp"

namespace sata {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fully resolved experiment settings. Defaults reproduce the reference setup.
struct ExperimentConfig {
    // topology
    std::size_t ecd_count = 4;
    double inter_rate = 440.0;
    double uplink_rate = 1000.0;
    std::vector<double> capability_levels = default_capability_levels();
    std::vector<double> transition_matrix;  // row-major; empty selects the reference matrix

    WorkloadSpec workload;
    std::vector<double> lambdas = {5.0, 7.0, 9.0};

    std::vector<PolicyKind> schedulers = {PolicyKind::SataDrl, PolicyKind::DuelingDqn, PolicyKind::GreedyEft,
                                          PolicyKind::HeftStyle, PolicyKind::Random};
    PolicyKind agent = PolicyKind::SataDrl;  // learner trained by `train`
    RewardParams reward;
    TrainConfig train;
    std::vector<std::size_t> hidden_layers = {128, 64, 32, 16};
    Activation hidden_activation = Activation::Relu;

    std::size_t replications = 30;
    std::size_t trace_replications = 1;
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "out";

    static ExperimentConfig parse(std::istream& in, const std::string& origin = "<config>");
    static ExperimentConfig load(const std::filesystem::path& path);
    /// Applies one `key = value` setting.
    void set(const std::string& key, const std::string& value);
    void write(std::ostream& out) const;
    void validate() const;

    MecConfig mec() const;
    SimOptions sim_options() const;
    std::size_t action_count() const { return ecd_count + 1; }
    std::unique_ptr<QNetwork> make_value_network(PolicyKind kind) const;
    /// Decision steps of a full training run, for the exploration schedule.
    std::uint64_t planned_steps() const;
};

struct MetricsReport {
    std::string scheduler;
    double lambda = 0.0;
    double avg_makespan = 0.0;
    double violation_rate = 0.0;
    std::vector<double> replication_makespans;
    std::vector<double> replication_violations;
};

struct TrainedAgent {
    std::unique_ptr<DqnLearner> learner;
    LearningCurve curve;
};

/// Workload of training episode `episode` at arrival parameter `lambda`.
std::vector<TaskGraph> training_workload(const ExperimentConfig& cfg, double lambda, std::size_t episode);
/// Workload of evaluation replication `rep`.
std::vector<TaskGraph> evaluation_workload(const ExperimentConfig& cfg, double lambda, std::size_t rep);

TrainedAgent train_policy(const ExperimentConfig& cfg, PolicyKind kind, double lambda);

/// Runs one replication of `kind` on prepared `apps`.
SimulationTrace run_policy(const ExperimentConfig& cfg, PolicyKind kind, const QNetwork* net,
                           std::span<const TaskGraph> apps, double lambda, std::size_t rep);

MetricsReport summarize(const std::string& scheduler, double lambda, std::span<const SimulationTrace> runs);

void write_curve_csv(std::ostream& out, const LearningCurve& curve);
void write_metrics_csv(std::ostream& out, std::span<const MetricsReport> reports);
void write_replications_csv(std::ostream& out, std::span<const MetricsReport> reports);

// CLI commands; all outputs go under cfg.output_dir.
std::vector<TaskGraph> cmd_gen_workload(const ExperimentConfig& cfg, const std::filesystem::path& out_file);
TrainedAgent cmd_train(const ExperimentConfig& cfg);
MetricsReport cmd_evaluate(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& checkpoint);
std::map<double, std::vector<MetricsReport>> cmd_compare(const ExperimentConfig& cfg);

}  // namespace sata
