#include "sata/workload.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sata {

double WorkloadSpec::mean_gap() const {
    return arrival_reading == ArrivalReading::MeanGap ? lambda : 1.0 / lambda;
}

void WorkloadSpec::validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (!(workload_min > 0.0) || workload_min > workload_max) throw std::invalid_argument("bad workload range");
    if (!(bc_min >= 0.0) || bc_min > bc_max) throw std::invalid_argument("bad bc range");
    if (!(mean_rate > 0.0)) throw std::invalid_argument("mean rate must be positive");
    if (!(deadline_capability > 0.0)) throw std::invalid_argument("deadline capability must be positive");
    if (ecd_count == 0) throw std::invalid_argument("need at least one edge device");
}

RawGraph montage25_shape() {
    // layer 0: 1 task; 1: 8; 2: 8; 3: 7; 4: 1
    RawGraph g;
    g.workloads.assign(25, 0.0);
    auto add = [&](TaskId a, TaskId b) { g.edges.push_back({a, b, 0.0}); };
    const TaskId l1 = 1, l2 = 9, l3 = 17, l4 = 24;
    for (TaskId k = 0; k < 8; ++k) add(0, l1 + k);
    for (TaskId k = 0; k < 8; ++k) {
        add(l1 + k, l2 + k);
        add(l1 + (k + 1) % 8, l2 + k);
    }
    for (TaskId k = 0; k < 7; ++k) {
        add(l2 + k, l3 + k);
        add(l2 + k + 1, l3 + k);
    }
    for (TaskId k = 0; k < 7; ++k) add(l3 + k, l4);
    return g;
}

double clamp_workload(double candidate, const WorkloadSpec& spec) {
    return std::clamp(candidate, spec.workload_min, spec.workload_max);
}

double edge_data_from_bc(double bc_candidate, const WorkloadSpec& spec) {
    return std::clamp(bc_candidate, spec.bc_min, spec.bc_max) * spec.mean_rate;
}

double basic_makespan(const TaskGraph& graph, double capability) {
    const auto order = graph.topological_order();
    if (order.empty()) throw GraphError("basic makespan of a cyclic graph");
    std::vector<double> finish(graph.tasks.size(), 0.0);
    double best = 0.0;
    for (TaskId id : order) {
        double start = 0.0;
        for (std::size_t k : graph.in_edges(id)) start = std::max(start, finish[graph.edges[k].src]);
        finish[id] = start + graph.tasks[id].workload / capability;
        best = std::max(best, finish[id]);
    }
    return best;
}

void assign_deadline(TaskGraph& graph, const WorkloadSpec& spec) {
    graph.finalize();
    graph.deadline = graph.release_time + spec.deadline_factor * basic_makespan(graph, spec.deadline_capability);
}

namespace {

// Raw profile draws before clamping; the clamps shape the final distribution.
double draw_runtime(Rng& rng) { return 20.0 + 780.0 * uniform01(rng); }
double draw_bc(Rng& rng) { return 0.012 * uniform01(rng); }

double draw_exponential(Rng& rng, double mean) {
    double u;
    do {
        u = uniform01(rng);
    } while (u == 0.0);
    return -mean * std::log(u);
}

}  // namespace

std::vector<TaskGraph> generate(const WorkloadSpec& spec) {
    spec.validate();
    Rng arrivals = make_stream(spec.seed, "arrivals");
    Rng homes = make_stream(spec.seed, "homes");
    std::vector<TaskGraph> apps;
    apps.reserve(spec.n_apps);
    double clock = 0.0;
    for (std::size_t n = 0; n < spec.n_apps; ++n) {
        Rng shape = make_stream(spec.seed, "graph", n);
        clock += draw_exponential(arrivals, spec.mean_gap());

        RawGraph raw = montage25_shape();
        raw.app_id = n;
        raw.release_time = clock;
        raw.home_ecd = uniform_index(homes, spec.ecd_count) + 1;
        for (double& w : raw.workloads) w = clamp_workload(draw_runtime(shape), spec);
        for (Edge& e : raw.edges) e.data_size = edge_data_from_bc(draw_bc(shape), spec);
        std::vector<double> offload(entry_tasks(raw).size());
        std::vector<double> result(exit_tasks(raw).size());
        for (double& d : offload) d = edge_data_from_bc(draw_bc(shape), spec);
        for (double& d : result) d = edge_data_from_bc(draw_bc(shape), spec);

        TaskGraph g = augment_with_dummies(raw, offload, result);
        assign_deadline(g, spec);
        apps.push_back(std::move(g));
    }
    return apps;
}

}  // namespace sata
