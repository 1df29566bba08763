#include "sata/mec_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sata {

CapabilityChain::CapabilityChain(std::vector<std::vector<double>> matrix) : matrix_(std::move(matrix)) {
    if (matrix_.empty()) throw ModelError("capability chain needs at least one level");
    for (std::size_t r = 0; r < matrix_.size(); ++r) {
        const auto& row = matrix_[r];
        if (row.size() != matrix_.size()) throw ModelError("capability chain matrix must be square");
        double sum = 0.0;
        for (double p : row) {
            if (!(p >= 0.0) || !std::isfinite(p))
                throw ModelError("capability chain row " + std::to_string(r) + " has a negative entry");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw ModelError("capability chain row " + std::to_string(r) + " does not sum to 1");
    }
}

CapabilityChain CapabilityChain::reference() {
    return CapabilityChain({
        {0.5, 0.25, 0.125, 0.0625, 0.0625},
        {0.0625, 0.5, 0.25, 0.125, 0.0625},
        {0.0625, 0.0625, 0.5, 0.25, 0.125},
        {0.125, 0.0625, 0.0625, 0.5, 0.25},
        {0.25, 0.125, 0.0625, 0.0625, 0.5},
    });
}

CapabilityChain CapabilityChain::identity(std::size_t levels) {
    std::vector<std::vector<double>> m(levels, std::vector<double>(levels, 0.0));
    for (std::size_t i = 0; i < levels; ++i) m[i][i] = 1.0;
    return CapabilityChain(std::move(m));
}

std::size_t CapabilityChain::sample_next(std::size_t current, Rng& rng) const {
    const auto& row = matrix_.at(current);
    const double u = uniform01(rng);
    double acc = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        acc += row[j];
        if (u < acc) return j;
    }
    // u landed in the rounding gap above the cumulative sum
    for (std::size_t j = row.size(); j-- > 0;)
        if (row[j] > 0.0) return j;
    return current;
}

std::vector<double> default_capability_levels() { return {6000.0, 5500.0, 5000.0, 4500.0, 4000.0}; }

double EdgeDevice::queued_workload() const {
    double sum = 0.0;
    for (const QueuedTask& q : queue) sum += q.workload;
    return sum;
}

NetworkTopology::NetworkTopology(std::size_t ecd_count, std::vector<double> rates, double uplink_rate)
    : ecd_count_(ecd_count), rates_(std::move(rates)), uplink_(uplink_rate) {
    if (ecd_count_ == 0) throw ModelError("topology needs at least one edge device");
    if (rates_.size() != ecd_count_ * ecd_count_)
        throw ModelError("rate matrix must be " + std::to_string(ecd_count_) + "x" + std::to_string(ecd_count_));
    if (!(uplink_ > 0.0)) throw ModelError("uplink rate must be positive");
    max_rate_ = uplink_;
    for (std::size_t a = 0; a < ecd_count_; ++a) {
        for (std::size_t b = 0; b < ecd_count_; ++b) {
            if (a == b) continue;
            const double r = rates_[a * ecd_count_ + b];
            if (!(r > 0.0) || !std::isfinite(r))
                throw ModelError("rate " + std::to_string(a + 1) + "->" + std::to_string(b + 1) + " must be positive");
            max_rate_ = std::max(max_rate_, r);
            sum_rate_ += r;
        }
    }
}

NetworkTopology NetworkTopology::full_mesh(std::size_t ecd_count, double inter_rate, double uplink_rate) {
    return NetworkTopology(ecd_count, std::vector<double>(ecd_count * ecd_count, inter_rate), uplink_rate);
}

double NetworkTopology::rate(EcdId from, EcdId to) const {
    if (from == 0 || to == 0 || from > ecd_count_ || to > ecd_count_ || from == to)
        throw ModelError("no rate entry for device pair " + std::to_string(from) + "->" + std::to_string(to));
    return rates_[(from - 1) * ecd_count_ + (to - 1)];
}

double execution_time(const Task& task, double capability) {
    if (task.workload == 0.0) return 0.0;
    return task.workload / capability;
}

double transfer_time(const TaskGraph& app, const Edge& edge, EcdId src_ecd, EcdId dst_ecd,
                     const NetworkTopology& topo) {
    if (src_ecd == dst_ecd) return 0.0;
    const double size = edge.data_size;
    if (edge.src == app.source()) {
        double t = size / topo.uplink_rate();
        if (dst_ecd != app.home_ecd) t += size / topo.rate(app.home_ecd, dst_ecd);
        return t;
    }
    if (edge.dst == app.sink()) {
        double t = size / topo.uplink_rate();
        if (src_ecd != app.home_ecd) t += size / topo.rate(src_ecd, app.home_ecd);
        return t;
    }
    return size / topo.rate(src_ecd, dst_ecd);
}

CompletionTiming completion_time(const Task& task, double capability, double queue_free_at,
                                 std::span<const double> parent_arrivals, double now) {
    CompletionTiming t;
    t.max_arrival = parent_arrivals.empty() ? now : *std::max_element(parent_arrivals.begin(), parent_arrivals.end());
    t.exec = execution_time(task, capability);
    t.start = std::max({queue_free_at, t.max_arrival, now});
    t.finish = t.start + t.exec;
    return t;
}

double sink_completion_time(std::span<const double> parent_arrivals) {
    if (parent_arrivals.empty()) throw ModelError("sink without parents");
    return *std::max_element(parent_arrivals.begin(), parent_arrivals.end());
}

double makespan(const TaskGraph& app, const Assignment& sink_assignment) {
    if (sink_assignment.app_id != app.app_id || sink_assignment.task_id != app.sink())
        throw ModelError("makespan of incomplete application " + std::to_string(app.app_id));
    return sink_assignment.finish - app.release_time;
}

double EdgeDevice::start_capability() const {
    if (queue.empty()) return capability();
    if (upcoming_levels.size() < queue.size()) throw ModelError("capability levels not planned");
    return capability_levels.at(upcoming_levels[queue.size() - 1]);
}

std::size_t transition_capability(EdgeDevice& device, const CapabilityChain& chain) {
    if (device.upcoming_levels.empty()) {
        device.current_level = chain.sample_next(device.current_level, device.chain_rng);
    } else {
        device.current_level = device.upcoming_levels.front();
        device.upcoming_levels.pop_front();
    }
    return device.current_level;
}

void plan_levels(EdgeDevice& device, const CapabilityChain& chain, std::size_t transitions) {
    while (device.upcoming_levels.size() < transitions) {
        const std::size_t last = device.upcoming_levels.empty() ? device.current_level : device.upcoming_levels.back();
        device.upcoming_levels.push_back(chain.sample_next(last, device.chain_rng));
    }
}

}  // namespace sata
