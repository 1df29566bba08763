#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <stdexcept>
#include <vector>

#include "sata/rng.hpp"
#include "sata/task_graph.hpp"

namespace sata {

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Row-stochastic transition matrix over capability levels.
class CapabilityChain {
public:
    CapabilityChain() = default;
    explicit CapabilityChain(std::vector<std::vector<double>> matrix);

    static CapabilityChain reference();
    static CapabilityChain identity(std::size_t levels);

    std::size_t size() const noexcept { return matrix_.size(); }
    double probability(std::size_t from, std::size_t to) const { return matrix_.at(from).at(to); }
    const std::vector<std::vector<double>>& matrix() const noexcept { return matrix_; }

    std::size_t sample_next(std::size_t current, Rng& rng) const;

private:
    std::vector<std::vector<double>> matrix_;
};

/// Capability levels used by the reference experiments, in MIPS.
std::vector<double> default_capability_levels();

struct QueuedTask {
    AppId app_id;
    TaskId task_id;
    double workload;
    double finish;
};

/// One edge computing device with a single FCFS processing element.
struct EdgeDevice {
    EcdId ecd_id = 1;
    std::vector<double> capability_levels;
    std::size_t current_level = 0;
    double queue_free_at = 0.0;
    std::deque<QueuedTask> queue;  // committed, not yet completed, enqueue order
    Rng chain_rng;
    std::deque<std::size_t> upcoming_levels;  // pre-drawn results of the next transitions

    double capability() const { return capability_levels.at(current_level); }
    /// Capability a newly queued task will start at: the level after every
    /// queued task has completed. Requires `plan_levels` for the queue length.
    double start_capability() const;
    double queued_workload() const;
};

class NetworkTopology {
public:
    NetworkTopology() = default;
    /// `rates` is row-major M x M; diagonal entries are ignored.
    NetworkTopology(std::size_t ecd_count, std::vector<double> rates, double uplink_rate);

    static NetworkTopology full_mesh(std::size_t ecd_count, double inter_rate, double uplink_rate);

    std::size_t ecd_count() const noexcept { return ecd_count_; }
    double uplink_rate() const noexcept { return uplink_; }
    /// Rate between two distinct edge devices (ids 1..=M).
    double rate(EcdId from, EcdId to) const;
    /// Largest rate among device pairs and the uplink.
    double max_rate() const noexcept { return max_rate_; }
    /// Sum over ordered pairs m != m'.
    double sum_rate() const noexcept { return sum_rate_; }

private:
    std::size_t ecd_count_ = 0;
    std::vector<double> rates_;
    double uplink_ = 0.0;
    double max_rate_ = 0.0;
    double sum_rate_ = 0.0;
};

struct Assignment {
    AppId app_id = 0;
    TaskId task_id = 0;
    EcdId ecd_id = 0;
    double start = 0.0;
    double finish = 0.0;
};

/// Seconds to execute `task` at `capability` MIPS; zero for dummies.
double execution_time(const Task& task, double capability);

/// Transfer time of `edge` when its endpoints sit on `src_ecd` and `dst_ecd`.
/// Dummy endpoints live on device 0 and route through the home device.
double transfer_time(const TaskGraph& app, const Edge& edge, EcdId src_ecd, EcdId dst_ecd,
                     const NetworkTopology& topo);

struct CompletionTiming {
    double start = 0.0;
    double finish = 0.0;
    double max_arrival = 0.0;  // latest input-data arrival
    double exec = 0.0;
};

/// start = max(queue_free_at, latest parent arrival, now); finish = start + exec.
CompletionTiming completion_time(const Task& task, double capability, double queue_free_at,
                                 std::span<const double> parent_arrivals, double now);

/// Sink completion: latest parent arrival (dummies execute in zero time).
double sink_completion_time(std::span<const double> parent_arrivals);

double makespan(const TaskGraph& app, const Assignment& sink_assignment);

/// Moves `device` to its next level (pre-drawn if planned). Returns the new level.
std::size_t transition_capability(EdgeDevice& device, const CapabilityChain& chain);
/// Pre-draws levels so that at least `transitions` future transitions are known.
void plan_levels(EdgeDevice& device, const CapabilityChain& chain, std::size_t transitions);

}  // namespace sata
