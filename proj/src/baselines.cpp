#include "sata/baselines.hpp"

#include <algorithm>
#include <stdexcept>

namespace sata {

EcdId decide_random(std::size_t ecd_count, Rng& rng) {
    if (ecd_count == 0) throw std::invalid_argument("random policy needs at least one device");
    return uniform_index(rng, ecd_count) + 1;
}

EcdId RandomScheduler::decide(const DecisionContext& ctx) {
    return decide_random(ctx.view.devices().size(), rng_);
}

EcdId decide_greedy_eft(const DecisionContext& ctx) {
    EcdId best = 0;
    double best_finish = 0.0;
    for (const EdgeDevice& d : ctx.view.devices()) {
        if (!ctx.mask.valid(d.ecd_id)) continue;
        const double finish = ctx.view.evaluate(ctx.app, ctx.task, d.ecd_id).finish;
        if (best == 0 || finish < best_finish) {
            best = d.ecd_id;
            best_finish = finish;
        }
    }
    if (best == 0) throw std::invalid_argument("no device available");
    return best;
}

EcdId decide_dueling(const StateVector& observation, const ActionMask& mask, const DuelingNetwork& net,
                     const NormalizationScales& scales) {
    const auto q = net.forward(normalize_state(observation, scales));
    return greedy_action(q, mask);
}

EcdId GreedyValueScheduler::decide(const DecisionContext& ctx) {
    const auto q = net_.forward(normalize_state(ctx.state, scales_));
    return greedy_action(q, ctx.mask);
}

std::vector<double> upward_ranks(const TaskGraph& app, double mean_capability, double mean_rate) {
    const auto order = app.topological_order();
    if (order.empty()) throw GraphError("upward rank on a cyclic graph");
    std::vector<double> rank(app.tasks.size(), 0.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const TaskId id = *it;
        double tail = 0.0;
        for (std::size_t k : app.out_edges(id)) {
            const Edge& e = app.edges[k];
            tail = std::max(tail, e.data_size / mean_rate + rank[e.dst]);
        }
        rank[id] = app.tasks[id].workload / mean_capability + tail;
    }
    return rank;
}

std::optional<std::vector<double>> HeftStyleScheduler::priority_keys(const TaskGraph& app, const MecConfig& mec) {
    double cap_sum = 0.0;
    std::size_t cap_count = 0;
    for (const auto& levels : mec.device_levels)
        for (double c : levels) {
            cap_sum += c;
            ++cap_count;
        }
    const std::size_t m = mec.ecd_count();
    const double mean_rate =
        m > 1 ? mec.topology.sum_rate() / static_cast<double>(m * (m - 1)) : mec.topology.uplink_rate();
    auto ranks = upward_ranks(app, cap_sum / static_cast<double>(cap_count), mean_rate);
    for (double& r : ranks) r = -r;
    return ranks;
}

PolicyKind parse_policy(const std::string& name) {
    if (name == "random") return PolicyKind::Random;
    if (name == "greedy-eft") return PolicyKind::GreedyEft;
    if (name == "heft") return PolicyKind::HeftStyle;
    if (name == "sata-drl") return PolicyKind::SataDrl;
    if (name == "dueling-dqn") return PolicyKind::DuelingDqn;
    throw std::invalid_argument("unknown scheduler '" + name + "'");
}

std::string to_string(PolicyKind kind) {
    switch (kind) {
    case PolicyKind::Random: return "random";
    case PolicyKind::GreedyEft: return "greedy-eft";
    case PolicyKind::HeftStyle: return "heft";
    case PolicyKind::SataDrl: return "sata-drl";
    case PolicyKind::DuelingDqn: return "dueling-dqn";
    }
    return "?";
}

}  // namespace sata
