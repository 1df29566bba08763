#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sata {

using TaskId = std::size_t;
using AppId = std::size_t;
using EcdId = std::size_t;  // 0 is the mobile user, 1..=M are edge devices

inline constexpr double kUnsetLct = std::numeric_limits<double>::quiet_NaN();

struct Task {
    AppId app_id = 0;
    TaskId task_id = 0;
    double workload = 0.0;  // MI
    double lct = kUnsetLct; // seconds, latest completion time
};

struct Edge {
    TaskId src = 0;
    TaskId dst = 0;
    double data_size = 0.0;  // megabits
};

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A DAG application with dummy source (id 0) and dummy sink (highest id).
///
/// Tasks are stored by id; adjacency is rebuilt by `finalize()` whenever the
/// edge set changes.
class TaskGraph {
public:
    AppId app_id = 0;
    double release_time = 0.0;
    double deadline = std::numeric_limits<double>::infinity();
    EcdId home_ecd = 1;
    std::vector<Task> tasks;
    std::vector<Edge> edges;

    void finalize();

    TaskId source() const noexcept { return 0; }
    TaskId sink() const noexcept { return tasks.empty() ? 0 : tasks.size() - 1; }
    bool is_dummy(TaskId id) const noexcept { return id == source() || id == sink(); }
    std::size_t real_task_count() const noexcept { return tasks.size() < 2 ? 0 : tasks.size() - 2; }

    /// Indices into `edges`.
    std::span<const std::size_t> in_edges(TaskId id) const { return in_[id]; }
    std::span<const std::size_t> out_edges(TaskId id) const { return out_[id]; }

    /// Kahn order, ties by smaller id. Empty if the graph has a cycle.
    std::vector<TaskId> topological_order() const;

private:
    std::vector<std::vector<std::size_t>> in_;
    std::vector<std::vector<std::size_t>> out_;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const noexcept { return violations.empty(); }
    bool mentions(std::string_view reason) const;
};

ValidationReport validate(const TaskGraph& graph);

/// Real tasks and edges of an application before dummy augmentation.
struct RawGraph {
    AppId app_id = 0;
    double release_time = 0.0;
    double deadline = std::numeric_limits<double>::infinity();
    EcdId home_ecd = 1;
    std::vector<double> workloads;  // real task k becomes task id k+1
    std::vector<Edge> edges;        // ids 0..workloads.size()-1
};

std::vector<TaskId> entry_tasks(const RawGraph& raw);
std::vector<TaskId> exit_tasks(const RawGraph& raw);

/// Adds the dummy source and sink. `offload_sizes` pairs with `entry_tasks(raw)`
/// and `result_sizes` with `exit_tasks(raw)`, both in ascending id order.
TaskGraph augment_with_dummies(const RawGraph& raw, std::span<const double> offload_sizes,
                               std::span<const double> result_sizes);

struct LctParams {
    double max_capability = 0.0;  // MIPS
    double max_rate = 0.0;        // Mbps
    double uplink_rate = 0.0;     // Mbps
};

/// Fills `lct` of every task by a reverse-topological sweep.
void compute_lct(TaskGraph& graph, const LctParams& params);

struct PriorityList {
    AppId app_id = 0;
    std::vector<TaskId> ordered_tasks;
};

/// Real tasks sorted ascending by lct, ties to the smaller id.
PriorityList build_priority_list(const TaskGraph& graph);

std::vector<TaskGraph> read_workload(std::istream& in, const std::string& origin = "<stream>");
std::vector<TaskGraph> load_workload_file(const std::filesystem::path& path);
void write_workload(std::ostream& out, std::span<const TaskGraph> graphs);
void save_workload_file(const std::filesystem::path& path, std::span<const TaskGraph> graphs);

}  // namespace sata
