#include "sata/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <queue>

namespace sata {

MecConfig MecConfig::reference() {
    MecConfig cfg;
    cfg.topology = NetworkTopology::full_mesh(4, 440.0, 1000.0);
    cfg.device_levels.assign(4, default_capability_levels());
    cfg.chain = CapabilityChain::reference();
    return cfg;
}

double MecConfig::max_capability() const {
    double best = 0.0;
    for (const auto& levels : device_levels)
        for (double c : levels) best = std::max(best, c);
    return best;
}

LctParams MecConfig::lct_params() const {
    return LctParams{max_capability(), topology.max_rate(), topology.uplink_rate()};
}

void prepare_apps(std::span<TaskGraph> apps, const MecConfig& mec) {
    for (TaskGraph& app : apps) {
        app.finalize();
        const auto report = validate(app);
        if (!report.ok())
            throw GraphError("application " + std::to_string(app.app_id) + " invalid: " + report.violations.front());
        if (app.home_ecd == 0 || app.home_ecd > mec.ecd_count())
            throw GraphError("application " + std::to_string(app.app_id) + " has unknown home device");
        compute_lct(app, mec.lct_params());
    }
}

std::vector<ReadyEntry> collect_ready(std::span<PendingList> lists, const AssignedFn& is_assigned) {
    std::vector<ReadyEntry> ready;
    for (PendingList& list : lists) {
        while (list.next < list.ordered.size()) {
            const TaskId id = list.ordered[list.next];
            bool parents_done = true;
            for (std::size_t k : list.app->in_edges(id)) {
                if (!is_assigned(list.app_index, list.app->edges[k].src)) {
                    parents_done = false;
                    break;
                }
            }
            if (!parents_done) break;
            ready.push_back({list.app, list.app_index, id, list.keys[id]});
            ++list.next;
        }
    }
    std::stable_sort(ready.begin(), ready.end(), [](const ReadyEntry& a, const ReadyEntry& b) {
        if (a.key != b.key) return a.key < b.key;
        if (a.app_index != b.app_index) return a.app_index < b.app_index;
        return a.task < b.task;
    });
    return ready;
}

StateVector observe_state(const NetworkTopology& topo, std::span<const EdgeDevice> devices,
                          std::span<const ReadyEntry> ready, double uplink_rate) {
    StateVector s;
    s.sum_inter_rate = topo.sum_rate();
    s.uplink_rate = uplink_rate;
    for (const EdgeDevice& d : devices) {
        s.sum_capability += d.capability();
        s.queued_workload += d.queued_workload();
    }
    for (const ReadyEntry& r : ready) s.ready_workload += r.app->tasks[r.task].workload;
    return s;
}

const char* to_string(TraceEvent e) {
    switch (e) {
    case TraceEvent::Arrival: return "arrival";
    case TraceEvent::Assign: return "assign";
    case TraceEvent::Sink: return "sink";
    case TraceEvent::Completion: return "completion";
    case TraceEvent::Transition: return "transition";
    }
    return "?";
}

double SimulationTrace::average_makespan() const {
    if (apps.empty()) return 0.0;
    double sum = 0.0;
    for (const AppResult& a : apps) sum += a.makespan;
    return sum / static_cast<double>(apps.size());
}

double SimulationTrace::violation_rate() const {
    if (apps.empty()) return 0.0;
    const auto late = std::count_if(apps.begin(), apps.end(), [](const AppResult& a) { return a.violated; });
    return 100.0 * static_cast<double>(late) / static_cast<double>(apps.size());
}

void write_trace_csv(std::ostream& out, const SimulationTrace& trace) {
    const auto old_precision = out.precision(17);
    out << "time,event,app,task,device,start,finish,sum_inter_rate,uplink_rate,sum_capability,ready_workload,"
           "queued_workload,action,reward,level_from,level_to\n";
    for (const TraceRow& r : trace.rows) {
        out << r.time << ',' << to_string(r.event) << ',' << r.app << ',' << r.task << ',' << r.device << ','
            << r.start << ',' << r.finish << ',';
        if (r.state) {
            for (double v : r.state->as_array()) out << v << ',';
        } else {
            out << ",,,,,";
        }
        if (r.event == TraceEvent::Assign) out << r.device;
        out << ',';
        if (r.reward) out << *r.reward;
        out << ',';
        if (r.event == TraceEvent::Transition) out << r.level_from << ',' << r.level_to;
        else out << ',';
        out << '\n';
    }
    out.precision(old_precision);
}

namespace {

struct SimEvent {
    enum class Kind { Arrival, Completion };
    double time = 0.0;
    std::uint64_t seq = 0;
    Kind kind = Kind::Arrival;
    std::size_t app_index = 0;
    TaskId task = 0;
    EcdId ecd = 0;
};

struct EventLater {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
        if (a.time != b.time) return a.time > b.time;
        return a.seq > b.seq;
    }
};

struct AppState {
    std::vector<std::optional<Assignment>> placed;
    std::size_t remaining_real = 0;
    bool arrived = false;
    bool done = false;
};

class Simulator final : public SimView {
public:
    Simulator(std::span<const TaskGraph> apps, const MecConfig& mec, SchedulerPort& scheduler, std::uint64_t seed,
              const SimOptions& options)
        : apps_(apps), mec_(mec), scheduler_(scheduler), options_(options) {
        const std::size_t m = mec.ecd_count();
        if (mec.device_levels.size() != m) throw SimError("device level lists do not match device count");
        if (!mec.initial_levels.empty() && mec.initial_levels.size() != m)
            throw SimError("initial levels do not match device count");
        devices_.resize(m);
        for (std::size_t k = 0; k < m; ++k) {
            EdgeDevice& d = devices_[k];
            d.ecd_id = k + 1;
            d.capability_levels = mec.device_levels[k];
            if (d.capability_levels.size() != mec.chain.size())
                throw SimError("device " + std::to_string(k + 1) + " level count does not match the chain");
            d.current_level = mec.initial_levels.empty() ? 0 : mec.initial_levels[k];
            if (d.current_level >= d.capability_levels.size()) throw SimError("initial level out of range");
            d.chain_rng = make_stream(seed, "capability", k + 1);
        }
        states_.resize(apps.size());
        trace_.apps.resize(apps.size());
        for (std::size_t i = 0; i < apps.size(); ++i) {
            const TaskGraph& app = apps[i];
            if (app.tasks.size() < 3 || app.in_edges(app.sink()).empty())
                throw SimError("application " + std::to_string(app.app_id) + " is not prepared");
            for (const Task& t : app.tasks)
                if (std::isnan(t.lct)) throw SimError("application " + std::to_string(app.app_id) + " lacks lct");
            states_[i].placed.resize(app.tasks.size());
            states_[i].remaining_real = app.real_task_count();
            trace_.apps[i] = AppResult{app.app_id, app.release_time, app.deadline, 0.0, 0.0, false};
            push({app.release_time, 0, SimEvent::Kind::Arrival, i, 0, 0});
        }
    }

    SimulationTrace run() {
        while (!events_.empty()) {
            now_ = events_.top().time;
            // every event of this instant is applied before any decision
            while (!events_.empty() && events_.top().time == now_) {
                const SimEvent ev = events_.top();
                events_.pop();
                if (ev.kind == SimEvent::Kind::Arrival) on_arrival(ev.app_index);
                else on_completion(ev);
            }
            dispatch();
        }
        for (std::size_t i = 0; i < states_.size(); ++i)
            if (!states_[i].done)
                throw SimError("deadlock: application " + std::to_string(apps_[i].app_id) + " never completed");
        trace_.final_state = observe_state(mec_.topology, devices_, {}, mec_.topology.uplink_rate());
        scheduler_.on_run_end(trace_.final_state);
        return std::move(trace_);
    }

    double now() const override { return now_; }
    const NetworkTopology& topology() const override { return mec_.topology; }
    std::span<const EdgeDevice> devices() const override { return devices_; }

    const Assignment* assignment(const TaskGraph& app, TaskId task) const override {
        const std::size_t i = index_of(app);
        const auto& slot = states_[i].placed.at(task);
        return slot ? &*slot : nullptr;
    }

    CompletionTiming evaluate(const TaskGraph& app, TaskId task, EcdId ecd) const override {
        if (ecd == 0 || ecd > devices_.size()) throw SimError("evaluate on invalid device " + std::to_string(ecd));
        const EdgeDevice& d = devices_[ecd - 1];
        const auto arrivals = parent_arrivals(index_of(app), task, ecd);
        return completion_time(app.tasks[task], d.start_capability(), d.queue_free_at, arrivals, now_);
    }

private:
    std::size_t index_of(const TaskGraph& app) const {
        const auto offset = &app - apps_.data();
        if (offset < 0 || static_cast<std::size_t>(offset) >= apps_.size())
            throw SimError("application not part of this simulation");
        return static_cast<std::size_t>(offset);
    }

    void push(SimEvent ev) {
        ev.seq = next_seq_++;
        events_.push(ev);
    }

    std::vector<double> parent_arrivals(std::size_t app_index, TaskId task, EcdId ecd) const {
        const TaskGraph& app = apps_[app_index];
        std::vector<double> arrivals;
        for (std::size_t k : app.in_edges(task)) {
            const Edge& e = app.edges[k];
            const auto& parent = states_[app_index].placed[e.src];
            if (!parent) throw SimError("unresolved parent " + std::to_string(e.src) + " of task " + std::to_string(task));
            arrivals.push_back(parent->finish + transfer_time(app, e, parent->ecd_id, ecd, mec_.topology));
        }
        return arrivals;
    }

    void record(TraceRow row) {
        if (options_.record_rows) trace_.rows.push_back(std::move(row));
    }

    void on_arrival(std::size_t i) {
        const TaskGraph& app = apps_[i];
        AppState& st = states_[i];
        st.arrived = true;
        const Assignment src{app.app_id, app.source(), 0, app.release_time, app.release_time};
        st.placed[app.source()] = src;
        trace_.assignments.push_back(src);
        record({now_, TraceEvent::Arrival, app.app_id, app.source(), 0, src.start, src.finish});

        PendingList list;
        list.app = &app;
        list.app_index = i;
        list.ordered = build_priority_list(app).ordered_tasks;
        if (auto keys = scheduler_.priority_keys(app, mec_)) {
            if (keys->size() != app.tasks.size()) throw SimError("scheduler priority keys have the wrong length");
            list.keys = std::move(*keys);
            std::stable_sort(list.ordered.begin(), list.ordered.end(),
                             [&](TaskId a, TaskId b) { return list.keys[a] < list.keys[b]; });
        } else {
            list.keys.resize(app.tasks.size());
            for (const Task& t : app.tasks) list.keys[t.task_id] = t.lct;
        }
        pending_.push_back(std::move(list));
    }

    void on_completion(const SimEvent& ev) {
        EdgeDevice& d = devices_[ev.ecd - 1];
        if (d.queue.empty() || d.queue.front().task_id != ev.task || d.queue.front().app_id != apps_[ev.app_index].app_id)
            throw SimError("FCFS violation on device " + std::to_string(ev.ecd));
        d.queue.pop_front();
        record({now_, TraceEvent::Completion, apps_[ev.app_index].app_id, ev.task, ev.ecd, now_, now_});

        const std::size_t from = d.current_level;
        const std::size_t to = transition_capability(d, mec_.chain);
        TraceRow row{now_, TraceEvent::Transition, 0, 0, ev.ecd, now_, now_};
        row.level_from = from;
        row.level_to = to;
        record(std::move(row));
    }

    void dispatch() {
        const auto ready = collect_ready(pending_, [this](std::size_t app_index, TaskId t) {
            return states_[app_index].placed[t].has_value();
        });
        const std::size_t m = devices_.size();
        for (std::size_t pos = 0; pos < ready.size(); ++pos) {
            const ReadyEntry& entry = ready[pos];
            const TaskGraph& app = *entry.app;
            const auto remaining = std::span<const ReadyEntry>(ready).subspan(pos);
            const StateVector state = observe_state(mec_.topology, devices_, remaining, mec_.topology.uplink_rate());
            const ActionMask mask(m);
            for (EdgeDevice& d : devices_) plan_levels(d, mec_.chain, d.queue.size());
            const DecisionContext ctx{app, entry.task, state, mask, *this};
            const EcdId ecd = scheduler_.decide(ctx);
            if (!mask.valid(ecd))
                throw SimError("scheduler returned invalid device " + std::to_string(ecd) + " for task " +
                               std::to_string(entry.task));
            commit(entry.app_index, entry.task, ecd, state);
        }
        pending_.erase(std::remove_if(pending_.begin(), pending_.end(),
                                      [](const PendingList& l) { return l.next == l.ordered.size(); }),
                       pending_.end());
    }

    void commit(std::size_t i, TaskId task, EcdId ecd, const StateVector& state) {
        const TaskGraph& app = apps_[i];
        AppState& st = states_[i];
        EdgeDevice& d = devices_[ecd - 1];

        const auto arrivals = parent_arrivals(i, task, ecd);
        const double queue_free_before = d.queue_free_at;
        const CompletionTiming timing =
            completion_time(app.tasks[task], d.start_capability(), d.queue_free_at, arrivals, now_);
        const Assignment a{app.app_id, task, ecd, timing.start, timing.finish};
        st.placed[task] = a;
        --st.remaining_real;
        d.queue_free_at = timing.finish;
        d.queue.push_back({app.app_id, task, app.tasks[task].workload, timing.finish});
        trace_.assignments.push_back(a);
        push({timing.finish, 0, SimEvent::Kind::Completion, i, task, ecd});

        RewardInputs ri;
        ri.workload = app.tasks[task].workload;
        ri.max_arrival = std::max(0.0, timing.max_arrival - now_);
        ri.queue_delay = std::max(0.0, queue_free_before - now_);
        ri.exec = timing.exec;
        ri.finish = timing.finish;
        ri.lct = app.tasks[task].lct;
        const double reward = compute_reward(ri, options_.reward);
        ++trace_.decisions;
        trace_.total_reward += reward;

        TraceRow row{now_, TraceEvent::Assign, app.app_id, task, ecd, timing.start, timing.finish};
        row.state = state;
        row.reward = reward;
        record(std::move(row));

        scheduler_.notify_outcome(Outcome{app, task, a, timing, queue_free_before, ri, reward});

        if (st.remaining_real == 0) finish_app(i);
    }

    void finish_app(std::size_t i) {
        const TaskGraph& app = apps_[i];
        AppState& st = states_[i];
        const TaskId sink = app.sink();
        const double finish = sink_completion_time(parent_arrivals(i, sink, 0));
        const Assignment a{app.app_id, sink, 0, finish, finish};
        st.placed[sink] = a;
        st.done = true;
        trace_.assignments.push_back(a);
        AppResult& res = trace_.apps[i];
        res.finish = finish;
        res.makespan = makespan(app, a);
        res.violated = finish > app.deadline;
        record({now_, TraceEvent::Sink, app.app_id, sink, 0, finish, finish});
    }

    std::span<const TaskGraph> apps_;
    const MecConfig& mec_;
    SchedulerPort& scheduler_;
    SimOptions options_;

    std::vector<EdgeDevice> devices_;
    std::vector<AppState> states_;
    std::vector<PendingList> pending_;
    std::priority_queue<SimEvent, std::vector<SimEvent>, EventLater> events_;
    std::uint64_t next_seq_ = 0;
    double now_ = 0.0;
    SimulationTrace trace_;
};

}  // namespace

SimulationTrace run_simulation(std::span<const TaskGraph> apps, const MecConfig& mec, SchedulerPort& scheduler,
                               std::uint64_t seed, const SimOptions& options) {
    Simulator sim(apps, mec, scheduler, seed, options);
    return sim.run();
}

}  // namespace sata
