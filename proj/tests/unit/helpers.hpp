#pragma once

#include <initializer_list>
#include <utility>
#include <vector>

#include "sata/sim_engine.hpp"
#include "sata/task_graph.hpp"

namespace sata::testing {

// Builds an augmented graph from real-task workloads and real edges given as
// (src, dst, Mbit) on 1-based real ids; every entry gets `offload` Mbit and
// every exit returns `result` Mbit.
inline TaskGraph make_app(std::vector<double> workloads, std::initializer_list<Edge> real_edges, double offload,
                          double result, EcdId home = 1, double release = 0.0,
                          double deadline = std::numeric_limits<double>::infinity(), AppId id = 0) {
    RawGraph raw;
    raw.app_id = id;
    raw.release_time = release;
    raw.deadline = deadline;
    raw.home_ecd = home;
    raw.workloads = std::move(workloads);
    for (Edge e : real_edges) raw.edges.push_back({e.src - 1, e.dst - 1, e.data_size});
    const std::vector<double> off(entry_tasks(raw).size(), offload);
    const std::vector<double> res(exit_tasks(raw).size(), result);
    return augment_with_dummies(raw, off, res);
}

inline MecConfig fixed_mec(std::vector<double> capabilities, double inter_rate, double uplink) {
    MecConfig mec;
    mec.topology = NetworkTopology::full_mesh(capabilities.size(), inter_rate, uplink);
    for (double c : capabilities) mec.device_levels.push_back({c});
    mec.chain = CapabilityChain::identity(1);
    return mec;
}

}  // namespace sata::testing
