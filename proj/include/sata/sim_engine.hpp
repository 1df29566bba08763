#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sata/mdp.hpp"
#include "sata/mec_model.hpp"
#include "sata/task_graph.hpp"

namespace sata {

class SimError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Static description of the edge fleet.
struct MecConfig {
    NetworkTopology topology;
    std::vector<std::vector<double>> device_levels;  // per device, MIPS
    CapabilityChain chain;
    std::vector<std::size_t> initial_levels;  // empty: every device starts at level 0

    /// Four devices, five levels, 440 Mbps mesh, 1000 Mbps uplink.
    static MecConfig reference();
    std::size_t ecd_count() const noexcept { return topology.ecd_count(); }
    double max_capability() const;
    LctParams lct_params() const;
};

/// Read-only access to the live simulation, for schedulers.
class SimView {
public:
    virtual ~SimView() = default;
    virtual double now() const = 0;
    virtual const NetworkTopology& topology() const = 0;
    virtual std::span<const EdgeDevice> devices() const = 0;
    /// Timing if `task` were committed to `ecd` at the current instant.
    virtual CompletionTiming evaluate(const TaskGraph& app, TaskId task, EcdId ecd) const = 0;
    virtual const Assignment* assignment(const TaskGraph& app, TaskId task) const = 0;
};

struct DecisionContext {
    const TaskGraph& app;
    TaskId task;
    const StateVector& state;
    const ActionMask& mask;
    const SimView& view;
};

struct Outcome {
    const TaskGraph& app;
    TaskId task;
    Assignment assignment;
    CompletionTiming timing;
    double queue_free_before = 0.0;
    RewardInputs reward_inputs;
    double reward = 0.0;
};

/// A pluggable placement policy. `decide` must return an id in 1..=M.
class SchedulerPort {
public:
    virtual ~SchedulerPort() = default;
    virtual EcdId decide(const DecisionContext& ctx) = 0;
    virtual void notify_outcome(const Outcome&) {}
    /// Called once after the event queue drains, with the post-run observation.
    virtual void on_run_end(const StateVector&) {}
    /// Ascending priority keys indexed by task id; nullopt keeps latest completion time.
    virtual std::optional<std::vector<double>> priority_keys(const TaskGraph&, const MecConfig&) { return std::nullopt; }
};

struct PendingList {
    const TaskGraph* app = nullptr;
    std::size_t app_index = 0;
    std::vector<TaskId> ordered;
    std::vector<double> keys;  // by task id
    std::size_t next = 0;
};

struct ReadyEntry {
    const TaskGraph* app = nullptr;
    std::size_t app_index = 0;
    TaskId task = 0;
    double key = 0.0;
};

using AssignedFn = std::function<bool(std::size_t app_index, TaskId task)>;

/// Moves every maximal ready prefix of each list into one queue sorted by key.
std::vector<ReadyEntry> collect_ready(std::span<PendingList> lists, const AssignedFn& is_assigned);

StateVector observe_state(const NetworkTopology& topo, std::span<const EdgeDevice> devices,
                          std::span<const ReadyEntry> ready, double uplink_rate);

enum class TraceEvent { Arrival, Assign, Sink, Completion, Transition };
const char* to_string(TraceEvent e);

struct TraceRow {
    double time = 0.0;
    TraceEvent event = TraceEvent::Arrival;
    AppId app = 0;
    TaskId task = 0;
    EcdId device = 0;
    double start = 0.0;
    double finish = 0.0;
    std::optional<StateVector> state;
    std::optional<double> reward;
    std::size_t level_from = 0;
    std::size_t level_to = 0;
};

struct AppResult {
    AppId app_id = 0;
    double release_time = 0.0;
    double deadline = 0.0;
    double finish = 0.0;
    double makespan = 0.0;
    bool violated = false;
};

struct SimulationTrace {
    std::vector<TraceRow> rows;
    std::vector<Assignment> assignments;  // commit order, dummies included
    std::vector<AppResult> apps;          // input order
    StateVector final_state;
    std::size_t decisions = 0;
    double total_reward = 0.0;

    double average_makespan() const;
    double violation_rate() const;  // percent
};

void write_trace_csv(std::ostream& out, const SimulationTrace& trace);

struct SimOptions {
    RewardParams reward;
    bool record_rows = true;
};

/// Runs `apps` (validated, lct filled) to completion under `scheduler`.
SimulationTrace run_simulation(std::span<const TaskGraph> apps, const MecConfig& mec, SchedulerPort& scheduler,
                               std::uint64_t seed, const SimOptions& options = {});

/// Prepares raw graphs for simulation: validates and fills lct.
void prepare_apps(std::span<TaskGraph> apps, const MecConfig& mec);

/// Follows a fixed placement; used for replay and oracle checks.
class ReplayScheduler : public SchedulerPort {
public:
    using Lookup = std::function<EcdId(const TaskGraph&, TaskId)>;
    explicit ReplayScheduler(Lookup lookup) : lookup_(std::move(lookup)) {}
    EcdId decide(const DecisionContext& ctx) override { return lookup_(ctx.app, ctx.task); }

private:
    Lookup lookup_;
};

}  // namespace sata
