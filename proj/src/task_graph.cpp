#include "sata/task_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

namespace sata {

void TaskGraph::finalize() {
    in_.assign(tasks.size(), {});
    out_.assign(tasks.size(), {});
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const Edge& e = edges[k];
        if (e.src < tasks.size() && e.dst < tasks.size()) {
            out_[e.src].push_back(k);
            in_[e.dst].push_back(k);
        }
    }
}

std::vector<TaskId> TaskGraph::topological_order() const {
    std::vector<std::size_t> indegree(tasks.size(), 0);
    for (TaskId id = 0; id < tasks.size(); ++id) indegree[id] = in_[id].size();

    std::priority_queue<TaskId, std::vector<TaskId>, std::greater<>> frontier;
    for (TaskId id = 0; id < tasks.size(); ++id)
        if (indegree[id] == 0) frontier.push(id);

    std::vector<TaskId> order;
    order.reserve(tasks.size());
    while (!frontier.empty()) {
        const TaskId id = frontier.top();
        frontier.pop();
        order.push_back(id);
        for (std::size_t k : out_[id])
            if (--indegree[edges[k].dst] == 0) frontier.push(edges[k].dst);
    }
    if (order.size() != tasks.size()) order.clear();
    return order;
}

bool ValidationReport::mentions(std::string_view reason) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const std::string& v) { return v.find(reason) != std::string::npos; });
}

ValidationReport validate(const TaskGraph& graph) {
    ValidationReport report;
    auto fail = [&](std::string msg) { report.violations.push_back(std::move(msg)); };

    const std::size_t n = graph.tasks.size();
    if (n < 3) {
        fail("too few tasks: need two dummies and at least one real task");
        return report;
    }
    if (!(graph.release_time < graph.deadline)) fail("deadline not after release time");

    for (TaskId id = 0; id < n; ++id) {
        const Task& t = graph.tasks[id];
        if (t.task_id != id) fail("task id " + std::to_string(t.task_id) + " stored at index " + std::to_string(id));
        if (t.app_id != graph.app_id) fail("task " + std::to_string(id) + " app id mismatch");
        if (!std::isfinite(t.workload) || t.workload < 0.0) {
            fail("task " + std::to_string(id) + " negative or non-finite workload");
        } else if (graph.is_dummy(id) && t.workload != 0.0) {
            fail("dummy workload nonzero on task " + std::to_string(id));
        } else if (!graph.is_dummy(id) && t.workload == 0.0) {
            fail("real task " + std::to_string(id) + " has zero workload");
        }
    }

    std::set<std::pair<TaskId, TaskId>> seen;
    bool endpoints_ok = true;
    for (const Edge& e : graph.edges) {
        const std::string tag = "edge " + std::to_string(e.src) + "->" + std::to_string(e.dst);
        if (e.src >= n || e.dst >= n) {
            fail(tag + " endpoint out of range");
            endpoints_ok = false;
            continue;
        }
        if (e.src == e.dst) fail(tag + " is a self loop");
        if (!std::isfinite(e.data_size) || e.data_size < 0.0) fail(tag + " negative or non-finite data size");
        if (!seen.insert({e.src, e.dst}).second) fail(tag + " duplicated");
        if (e.dst == graph.source()) fail(tag + " enters the source dummy");
        if (e.src == graph.sink()) fail(tag + " leaves the sink dummy");
    }
    if (!endpoints_ok) return report;

    TaskGraph g = graph;
    g.finalize();
    if (g.topological_order().empty()) {
        fail("cycle");
        return report;
    }

    auto reach = [&](TaskId start, bool forward) {
        std::vector<bool> mark(n, false);
        std::vector<TaskId> stack{start};
        mark[start] = true;
        while (!stack.empty()) {
            const TaskId id = stack.back();
            stack.pop_back();
            for (std::size_t k : forward ? g.out_edges(id) : g.in_edges(id)) {
                const TaskId next = forward ? g.edges[k].dst : g.edges[k].src;
                if (!mark[next]) {
                    mark[next] = true;
                    stack.push_back(next);
                }
            }
        }
        return mark;
    };
    const auto from_source = reach(g.source(), true);
    const auto to_sink = reach(g.sink(), false);
    for (TaskId id = 0; id < n; ++id) {
        if (!from_source[id]) fail("task " + std::to_string(id) + " unreachable from source");
        if (!to_sink[id]) fail("task " + std::to_string(id) + " cannot reach sink");
    }
    return report;
}

namespace {

std::vector<TaskId> endpoints(const RawGraph& raw, bool entries) {
    std::vector<bool> has(raw.workloads.size(), false);
    for (const Edge& e : raw.edges) {
        const TaskId id = entries ? e.dst : e.src;
        if (id < has.size()) has[id] = true;
    }
    std::vector<TaskId> out;
    for (TaskId id = 0; id < has.size(); ++id)
        if (!has[id]) out.push_back(id);
    return out;
}

}  // namespace

std::vector<TaskId> entry_tasks(const RawGraph& raw) { return endpoints(raw, true); }
std::vector<TaskId> exit_tasks(const RawGraph& raw) { return endpoints(raw, false); }

TaskGraph augment_with_dummies(const RawGraph& raw, std::span<const double> offload_sizes,
                               std::span<const double> result_sizes) {
    if (raw.workloads.empty()) throw GraphError("cannot augment an application without real tasks");
    const auto entries = entry_tasks(raw);
    const auto exits = exit_tasks(raw);
    if (offload_sizes.size() != entries.size())
        throw GraphError("offload size count " + std::to_string(offload_sizes.size()) + " != entry task count " +
                         std::to_string(entries.size()));
    if (result_sizes.size() != exits.size())
        throw GraphError("result size count " + std::to_string(result_sizes.size()) + " != exit task count " +
                         std::to_string(exits.size()));

    TaskGraph g;
    g.app_id = raw.app_id;
    g.release_time = raw.release_time;
    g.deadline = raw.deadline;
    g.home_ecd = raw.home_ecd;

    const TaskId sink = raw.workloads.size() + 1;
    g.tasks.resize(sink + 1);
    for (TaskId id = 0; id <= sink; ++id) {
        g.tasks[id].app_id = raw.app_id;
        g.tasks[id].task_id = id;
        g.tasks[id].workload = (id == 0 || id == sink) ? 0.0 : raw.workloads[id - 1];
    }
    for (std::size_t k = 0; k < entries.size(); ++k) g.edges.push_back({0, entries[k] + 1, offload_sizes[k]});
    for (const Edge& e : raw.edges) g.edges.push_back({e.src + 1, e.dst + 1, e.data_size});
    for (std::size_t k = 0; k < exits.size(); ++k) g.edges.push_back({exits[k] + 1, sink, result_sizes[k]});
    g.finalize();
    return g;
}

void compute_lct(TaskGraph& graph, const LctParams& params) {
    if (!(params.max_capability > 0.0) || !(params.max_rate > 0.0) || !(params.uplink_rate > 0.0))
        throw GraphError("compute_lct needs positive capability and rates");
    graph.finalize();
    auto order = graph.topological_order();
    if (order.empty()) throw GraphError("compute_lct on a cyclic graph");

    for (Task& t : graph.tasks) t.lct = kUnsetLct;
    const TaskId sink = graph.sink();
    graph.tasks[sink].lct = graph.deadline;

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const TaskId id = *it;
        if (id == sink) continue;
        double lct = std::numeric_limits<double>::infinity();
        for (std::size_t k : graph.out_edges(id)) {
            const Edge& e = graph.edges[k];
            if (e.dst == sink) {
                lct = std::min(lct, graph.deadline - e.data_size / params.uplink_rate);
                continue;
            }
            const Task& child = graph.tasks[e.dst];
            if (std::isnan(child.lct))
                throw GraphError("uncomputed lct on child " + std::to_string(e.dst) + " of task " + std::to_string(id));
            lct = std::min(lct, child.lct - child.workload / params.max_capability - e.data_size / params.max_rate);
        }
        graph.tasks[id].lct = lct;
    }
}

PriorityList build_priority_list(const TaskGraph& graph) {
    PriorityList list{graph.app_id, {}};
    for (TaskId id = 1; id + 1 < graph.tasks.size(); ++id) {
        if (std::isnan(graph.tasks[id].lct))
            throw GraphError("build_priority_list before compute_lct (task " + std::to_string(id) + ")");
        list.ordered_tasks.push_back(id);
    }
    std::stable_sort(list.ordered_tasks.begin(), list.ordered_tasks.end(), [&](TaskId a, TaskId b) {
        return graph.tasks[a].lct < graph.tasks[b].lct;
    });
    return list;
}

// ---------------------------------------------------------------------------
// Workload file

namespace {

struct LineError : GraphError {
    using GraphError::GraphError;
};

class RecordBuilder {
public:
    RecordBuilder(std::string origin, std::size_t line, TaskGraph header)
        : origin_(std::move(origin)), header_line_(line), graph_(std::move(header)) {}

    void add_task(std::size_t line, TaskId id, double workload) {
        if (!workloads_.emplace(id, workload).second) throw error(line, "duplicate task id " + std::to_string(id));
    }
    void add_edge(const Edge& e) { graph_.edges.push_back(e); }

    TaskGraph finish() {
        const std::size_t n = workloads_.size();
        graph_.tasks.resize(n);
        TaskId expect = 0;
        for (const auto& [id, w] : workloads_) {
            if (id != expect) throw error(header_line_, "task ids must be contiguous from 0; missing " + std::to_string(expect));
            graph_.tasks[id] = Task{graph_.app_id, id, w, kUnsetLct};
            ++expect;
        }
        graph_.finalize();
        const auto report = validate(graph_);
        if (!report.ok()) throw error(header_line_, "schema violation: " + report.violations.front());
        return std::move(graph_);
    }

    LineError error(std::size_t line, const std::string& what) const {
        return LineError(origin_ + ":" + std::to_string(line) + ": " + what);
    }

private:
    std::string origin_;
    std::size_t header_line_;
    TaskGraph graph_;
    std::map<TaskId, double> workloads_;
};

double parse_number(const std::string& token, const std::string& field, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw GraphError(where + ": field '" + field + "' is not a number: '" + token + "'");
    }
}

std::size_t parse_index(const std::string& token, const std::string& field, const std::string& where) {
    if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos)
        throw GraphError(where + ": field '" + field + "' is not a non-negative integer: '" + token + "'");
    return std::stoull(token);
}

}  // namespace

std::vector<TaskGraph> read_workload(std::istream& in, const std::string& origin) {
    std::vector<TaskGraph> graphs;
    std::optional<RecordBuilder> current;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::vector<std::string> tok;
        for (std::string t; ss >> t;) tok.push_back(t);
        if (tok.empty()) continue;

        const std::string where = origin + ":" + std::to_string(line_no);
        if (tok[0] == "app") {
            if (tok.size() != 8 || tok[2] != "release" || tok[4] != "deadline" || tok[6] != "home")
                throw GraphError(where + ": expected 'app <n> release <r> deadline <d> home <m>'");
            if (current) graphs.push_back(current->finish());
            TaskGraph header;
            header.app_id = parse_index(tok[1], "app", where);
            header.release_time = parse_number(tok[3], "release", where);
            header.deadline = parse_number(tok[5], "deadline", where);
            header.home_ecd = parse_index(tok[7], "home", where);
            if (header.home_ecd == 0) throw GraphError(where + ": field 'home' must name an edge device (>= 1)");
            current.emplace(origin, line_no, std::move(header));
        } else if (tok[0] == "task") {
            if (!current) throw GraphError(where + ": 'task' before any 'app' header");
            if (tok.size() != 3) throw GraphError(where + ": expected 'task <id> <workload_MI>'");
            const double w = parse_number(tok[2], "workload", where);
            if (!(w >= 0.0)) throw GraphError(where + ": schema violation: negative workload");
            current->add_task(line_no, parse_index(tok[1], "id", where), w);
        } else if (tok[0] == "edge") {
            if (!current) throw GraphError(where + ": 'edge' before any 'app' header");
            if (tok.size() != 4) throw GraphError(where + ": expected 'edge <src> <dst> <megabits>'");
            const double d = parse_number(tok[3], "megabits", where);
            if (!(d >= 0.0)) throw GraphError(where + ": schema violation: negative data_size");
            current->add_edge({parse_index(tok[1], "src", where), parse_index(tok[2], "dst", where), d});
        } else {
            throw GraphError(where + ": unknown record '" + tok[0] + "'");
        }
    }
    if (current) graphs.push_back(current->finish());
    return graphs;
}

std::vector<TaskGraph> load_workload_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw GraphError("cannot open workload file " + path.string());
    return read_workload(in, path.string());
}

void write_workload(std::ostream& out, std::span<const TaskGraph> graphs) {
    const auto old_precision = out.precision(17);
    for (const TaskGraph& g : graphs) {
        out << "app " << g.app_id << " release " << g.release_time << " deadline " << g.deadline << " home "
            << g.home_ecd << '\n';
        for (const Task& t : g.tasks) out << "task " << t.task_id << ' ' << t.workload << '\n';
        for (const Edge& e : g.edges) out << "edge " << e.src << ' ' << e.dst << ' ' << e.data_size << '\n';
    }
    out.precision(old_precision);
}

void save_workload_file(const std::filesystem::path& path, std::span<const TaskGraph> graphs) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw GraphError("cannot write workload file " + path.string());
    out << "# app <n> release <s> deadline <s> home <ecd>; task <id> <MI>; edge <src> <dst> <Mbit>\n";
    write_workload(out, graphs);
}

}  // namespace sata
