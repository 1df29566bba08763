#include "sata/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace sata {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& value) {
    std::istringstream ss(value);
    std::vector<std::string> out;
    for (std::string w; ss >> w;) out.push_back(w);
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
    }
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v + "'");
    return std::stoull(v);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("'" + key + "' expects true/false, got '" + v + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& w : words(v)) out.push_back(to_double(key, w));
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string lambda_tag(double lambda) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", lambda);
    return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::ostringstream ss;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) ss << ' ';
        if constexpr (std::is_floating_point_v<T>) ss << fmt(v[i]);
        else ss << v[i];
    }
    return ss.str();
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    return out;
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    auto& w = workload;
    if (key == "ecd_count") ecd_count = to_uint(key, value);
    else if (key == "inter_rate") inter_rate = to_double(key, value);
    else if (key == "uplink_rate") uplink_rate = to_double(key, value);
    else if (key == "capability_levels") capability_levels = to_doubles(key, value);
    else if (key == "transition_matrix") transition_matrix = to_doubles(key, value);
    else if (key == "n_apps") w.n_apps = to_uint(key, value);
    else if (key == "lambda") w.lambda = to_double(key, value);
    else if (key == "lambda_reading") {
        if (value == "mean-gap") w.arrival_reading = ArrivalReading::MeanGap;
        else if (value == "rate") w.arrival_reading = ArrivalReading::Rate;
        else throw ConfigError("'lambda_reading' expects mean-gap or rate");
    } else if (key == "workload_min") w.workload_min = to_double(key, value);
    else if (key == "workload_max") w.workload_max = to_double(key, value);
    else if (key == "bc_min") w.bc_min = to_double(key, value);
    else if (key == "bc_max") w.bc_max = to_double(key, value);
    else if (key == "mean_rate") w.mean_rate = to_double(key, value);
    else if (key == "deadline_factor") w.deadline_factor = to_double(key, value);
    else if (key == "deadline_capability") w.deadline_capability = to_double(key, value);
    else if (key == "lambdas") lambdas = to_doubles(key, value);
    else if (key == "schedulers") {
        schedulers.clear();
        for (const auto& name : words(value)) {
            try {
                schedulers.push_back(parse_policy(name));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
    } else if (key == "agent") {
        try {
            agent = parse_policy(value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else if (key == "beta") reward.beta = to_double(key, value);
    else if (key == "psi") reward.psi = to_double(key, value);
    else if (key == "eta") reward.eta = to_double(key, value);
    else if (key == "clamp_penalty") reward.clamp_penalty = to_bool(key, value);
    else if (key == "gamma") train.gamma = to_double(key, value);
    else if (key == "batch") train.batch = to_uint(key, value);
    else if (key == "replay_capacity") train.replay_capacity = to_uint(key, value);
    else if (key == "target_sync_steps") train.target_sync_steps = to_uint(key, value);
    else if (key == "learning_rate") train.adam.learning_rate = to_double(key, value);
    else if (key == "adam_beta1") train.adam.beta1 = to_double(key, value);
    else if (key == "adam_beta2") train.adam.beta2 = to_double(key, value);
    else if (key == "adam_epsilon") train.adam.epsilon = to_double(key, value);
    else if (key == "epsilon_start") train.epsilon.start = to_double(key, value);
    else if (key == "epsilon_end") train.epsilon.end = to_double(key, value);
    else if (key == "epsilon_decay_fraction") train.epsilon.decay_fraction = to_double(key, value);
    else if (key == "episodes") train.episodes = to_uint(key, value);
    else if (key == "rate_scale") train.scales.rate = to_double(key, value);
    else if (key == "capability_scale") train.scales.capability = to_double(key, value);
    else if (key == "workload_scale") train.scales.workload = to_double(key, value);
    else if (key == "hidden_layers") {
        hidden_layers.clear();
        for (const auto& x : words(value)) hidden_layers.push_back(to_uint(key, x));
    } else if (key == "hidden_activation") {
        try {
            hidden_activation = parse_activation(value);
        } catch (const NetworkError& e) {
            throw ConfigError(e.what());
        }
    } else if (key == "identity_hidden") {
        if (to_bool(key, value)) hidden_activation = Activation::Identity;
    } else if (key == "replications") replications = to_uint(key, value);
    else if (key == "trace_replications") trace_replications = to_uint(key, value);
    else if (key == "seed") seed = to_uint(key, value);
    else if (key == "output_dir") output_dir = value;
    else throw ConfigError("unknown config key '" + key + "'");
}

ExperimentConfig ExperimentConfig::parse(std::istream& in, const std::string& origin) {
    ExperimentConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
        try {
            cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    return parse(in, path.string());
}

void ExperimentConfig::write(std::ostream& out) const {
    const auto& w = workload;
    std::vector<std::string> names;
    for (PolicyKind k : schedulers) names.push_back(to_string(k));
    const auto matrix = mec().chain.matrix();
    std::vector<double> flat;
    for (const auto& row : matrix) flat.insert(flat.end(), row.begin(), row.end());

    out << "ecd_count = " << ecd_count << '\n'
        << "inter_rate = " << fmt(inter_rate) << '\n'
        << "uplink_rate = " << fmt(uplink_rate) << '\n'
        << "capability_levels = " << join(capability_levels) << '\n'
        << "transition_matrix = " << join(flat) << '\n'
        << "n_apps = " << w.n_apps << '\n'
        << "lambda = " << fmt(w.lambda) << '\n'
        << "lambda_reading = " << (w.arrival_reading == ArrivalReading::MeanGap ? "mean-gap" : "rate") << '\n'
        << "workload_min = " << fmt(w.workload_min) << '\n'
        << "workload_max = " << fmt(w.workload_max) << '\n'
        << "bc_min = " << fmt(w.bc_min) << '\n'
        << "bc_max = " << fmt(w.bc_max) << '\n'
        << "mean_rate = " << fmt(w.mean_rate) << '\n'
        << "deadline_factor = " << fmt(w.deadline_factor) << '\n'
        << "deadline_capability = " << fmt(w.deadline_capability) << '\n'
        << "lambdas = " << join(lambdas) << '\n'
        << "schedulers = " << join(names) << '\n'
        << "agent = " << to_string(agent) << '\n'
        << "beta = " << fmt(reward.beta) << '\n'
        << "psi = " << fmt(reward.psi) << '\n'
        << "eta = " << fmt(reward.eta) << '\n'
        << "clamp_penalty = " << (reward.clamp_penalty ? "true" : "false") << '\n'
        << "gamma = " << fmt(train.gamma) << '\n'
        << "batch = " << train.batch << '\n'
        << "replay_capacity = " << train.replay_capacity << '\n'
        << "target_sync_steps = " << train.target_sync_steps << '\n'
        << "learning_rate = " << fmt(train.adam.learning_rate) << '\n'
        << "adam_beta1 = " << fmt(train.adam.beta1) << '\n'
        << "adam_beta2 = " << fmt(train.adam.beta2) << '\n'
        << "adam_epsilon = " << fmt(train.adam.epsilon) << '\n'
        << "epsilon_start = " << fmt(train.epsilon.start) << '\n'
        << "epsilon_end = " << fmt(train.epsilon.end) << '\n'
        << "epsilon_decay_fraction = " << fmt(train.epsilon.decay_fraction) << '\n'
        << "episodes = " << train.episodes << '\n'
        << "rate_scale = " << fmt(train.scales.rate) << '\n'
        << "capability_scale = " << fmt(train.scales.capability) << '\n'
        << "workload_scale = " << fmt(train.scales.workload) << '\n'
        << "hidden_layers = " << join(hidden_layers) << '\n'
        << "hidden_activation = " << to_string(hidden_activation) << '\n'
        << "replications = " << replications << '\n'
        << "trace_replications = " << trace_replications << '\n'
        << "seed = " << seed << '\n'
        << "output_dir = " << output_dir.string() << '\n';
}

void ExperimentConfig::validate() const {
    if (ecd_count == 0) throw ConfigError("ecd_count must be at least 1");
    if (capability_levels.empty()) throw ConfigError("capability_levels must not be empty");
    for (double c : capability_levels)
        if (!(c > 0.0)) throw ConfigError("capability levels must be positive");
    if (!transition_matrix.empty() && transition_matrix.size() != capability_levels.size() * capability_levels.size())
        throw ConfigError("transition_matrix must have one row per capability level");
    if (transition_matrix.empty() && capability_levels.size() != 5)
        throw ConfigError("the reference transition matrix needs exactly five capability levels");
    if (replications == 0) throw ConfigError("replications must be at least 1");
    if (lambdas.empty()) throw ConfigError("lambdas must not be empty");
    if (schedulers.empty()) throw ConfigError("schedulers must not be empty");
    if (agent != PolicyKind::SataDrl && agent != PolicyKind::DuelingDqn)
        throw ConfigError("agent must be sata-drl or dueling-dqn");
    try {
        WorkloadSpec w = workload;
        w.ecd_count = ecd_count;
        w.validate();
        for (double l : lambdas) {
            w.lambda = l;
            w.validate();
        }
        train.validate();
        (void)mec();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

MecConfig ExperimentConfig::mec() const {
    MecConfig m;
    m.topology = NetworkTopology::full_mesh(ecd_count, inter_rate, uplink_rate);
    m.device_levels.assign(ecd_count, capability_levels);
    if (transition_matrix.empty()) {
        m.chain = CapabilityChain::reference();
    } else {
        const std::size_t n = capability_levels.size();
        std::vector<std::vector<double>> rows(n);
        for (std::size_t r = 0; r < n; ++r)
            rows[r].assign(transition_matrix.begin() + static_cast<long>(r * n),
                           transition_matrix.begin() + static_cast<long>((r + 1) * n));
        m.chain = CapabilityChain(std::move(rows));
    }
    return m;
}

SimOptions ExperimentConfig::sim_options() const {
    SimOptions o;
    o.reward = reward;
    return o;
}

std::unique_ptr<QNetwork> ExperimentConfig::make_value_network(PolicyKind kind) const {
    std::vector<std::size_t> shape{StateVector::kSize};
    shape.insert(shape.end(), hidden_layers.begin(), hidden_layers.end());
    if (kind == PolicyKind::DuelingDqn) {
        if (hidden_layers.empty()) throw ConfigError("dueling network needs at least one hidden layer");
        return std::make_unique<DuelingNetwork>(shape, action_count(), hidden_activation);
    }
    shape.push_back(action_count());
    return std::make_unique<ValueNetwork>(shape, hidden_activation);
}

std::uint64_t ExperimentConfig::planned_steps() const {
    return static_cast<std::uint64_t>(train.episodes) * workload.n_apps * montage25_shape().workloads.size();
}

std::vector<TaskGraph> training_workload(const ExperimentConfig& cfg, double lambda, std::size_t episode) {
    WorkloadSpec spec = cfg.workload;
    spec.lambda = lambda;
    spec.ecd_count = cfg.ecd_count;
    spec.seed = derive_seed(cfg.seed, "train-workload:" + lambda_tag(lambda), episode);
    auto apps = generate(spec);
    prepare_apps(apps, cfg.mec());
    return apps;
}

std::vector<TaskGraph> evaluation_workload(const ExperimentConfig& cfg, double lambda, std::size_t rep) {
    WorkloadSpec spec = cfg.workload;
    spec.lambda = lambda;
    spec.ecd_count = cfg.ecd_count;
    spec.seed = derive_seed(cfg.seed, "eval-workload:" + lambda_tag(lambda), rep);
    return generate(spec);
}

TrainedAgent train_policy(const ExperimentConfig& cfg, PolicyKind kind, double lambda) {
    if (kind != PolicyKind::SataDrl && kind != PolicyKind::DuelingDqn)
        throw ConfigError(to_string(kind) + " is not a learning policy");
    const std::uint64_t agent_seed = derive_seed(cfg.seed, "agent:" + to_string(kind) + ":" + lambda_tag(lambda));
    auto net = cfg.make_value_network(kind);
    Rng init = make_stream(agent_seed, "init");
    initialize(*net, init);

    TrainedAgent out;
    out.learner = std::make_unique<DqnLearner>(std::move(net), cfg.train, agent_seed, cfg.action_count());
    out.learner->set_planned_steps(cfg.planned_steps());
    const MecConfig mec = cfg.mec();
    out.curve = train_agent(
        *out.learner, cfg.train.episodes, [&](std::size_t e) { return training_workload(cfg, lambda, e); }, mec,
        derive_seed(agent_seed, "environment"), cfg.sim_options());
    out.learner->set_greedy(true);
    return out;
}

SimulationTrace run_policy(const ExperimentConfig& cfg, PolicyKind kind, const QNetwork* net,
                           std::span<const TaskGraph> apps, double lambda, std::size_t rep) {
    // environment randomness is shared by every scheduler of a replication
    const std::uint64_t env_seed = derive_seed(cfg.seed, "eval-environment:" + lambda_tag(lambda), rep);
    const MecConfig mec = cfg.mec();
    const SimOptions options = cfg.sim_options();
    switch (kind) {
    case PolicyKind::Random: {
        RandomScheduler s(derive_seed(cfg.seed, "random:" + lambda_tag(lambda), rep));
        return run_simulation(apps, mec, s, env_seed, options);
    }
    case PolicyKind::GreedyEft: {
        GreedyEftScheduler s;
        return run_simulation(apps, mec, s, env_seed, options);
    }
    case PolicyKind::HeftStyle: {
        HeftStyleScheduler s;
        return run_simulation(apps, mec, s, env_seed, options);
    }
    case PolicyKind::SataDrl:
    case PolicyKind::DuelingDqn: {
        if (!net) throw ConfigError(to_string(kind) + " needs a trained network");
        GreedyValueScheduler s(*net, cfg.train.scales);
        return run_simulation(apps, mec, s, env_seed, options);
    }
    }
    throw ConfigError("unhandled scheduler");
}

MetricsReport summarize(const std::string& scheduler, double lambda, std::span<const SimulationTrace> runs) {
    MetricsReport r;
    r.scheduler = scheduler;
    r.lambda = lambda;
    for (const SimulationTrace& t : runs) {
        r.replication_makespans.push_back(t.average_makespan());
        r.replication_violations.push_back(t.violation_rate());
    }
    if (!runs.empty()) {
        const double n = static_cast<double>(runs.size());
        for (double v : r.replication_makespans) r.avg_makespan += v / n;
        for (double v : r.replication_violations) r.violation_rate += v / n;
    }
    return r;
}

void write_curve_csv(std::ostream& out, const LearningCurve& curve) {
    out << "episode,cumulative_reward\n";
    for (std::size_t e = 0; e < curve.episode_rewards.size(); ++e)
        out << e + 1 << ',' << fmt(curve.episode_rewards[e]) << '\n';
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsReport> reports) {
    out << "lambda,scheduler,avg_makespan,violation_rate,replications\n";
    for (const auto& r : reports)
        out << lambda_tag(r.lambda) << ',' << r.scheduler << ',' << fmt(r.avg_makespan) << ',' << fmt(r.violation_rate)
            << ',' << r.replication_makespans.size() << '\n';
}

void write_replications_csv(std::ostream& out, std::span<const MetricsReport> reports) {
    out << "lambda,scheduler,replication,avg_makespan,violation_rate\n";
    for (const auto& r : reports)
        for (std::size_t k = 0; k < r.replication_makespans.size(); ++k)
            out << lambda_tag(r.lambda) << ',' << r.scheduler << ',' << k << ',' << fmt(r.replication_makespans[k])
                << ',' << fmt(r.replication_violations[k]) << '\n';
}

std::vector<TaskGraph> cmd_gen_workload(const ExperimentConfig& cfg, const std::filesystem::path& out_file) {
    auto apps = evaluation_workload(cfg, cfg.workload.lambda, 0);
    save_workload_file(out_file, apps);
    return apps;
}

TrainedAgent cmd_train(const ExperimentConfig& cfg) {
    auto trained = train_policy(cfg, cfg.agent, cfg.workload.lambda);
    trained.learner->save(cfg.output_dir / "agent.ckpt");
    auto curve_out = open_out(cfg.output_dir / "learning_curve.csv");
    write_curve_csv(curve_out, trained.curve);
    auto manifest = open_out(cfg.output_dir / "manifest.txt");
    cfg.write(manifest);
    return trained;
}

MetricsReport cmd_evaluate(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& checkpoint) {
    std::unique_ptr<DqnLearner> learner;
    PolicyKind kind = PolicyKind::Random;
    if (checkpoint) {
        learner = DqnLearner::load(*checkpoint, cfg.train);
        if (learner->network().output_size() != cfg.action_count() ||
            learner->network().input_size() != StateVector::kSize)
            throw ConfigError("checkpoint architecture does not match the configured device count");
        kind = learner->network().kind() == "dueling" ? PolicyKind::DuelingDqn : PolicyKind::SataDrl;
    }
    const double lambda = cfg.workload.lambda;
    std::vector<SimulationTrace> runs;
    for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
        auto apps = evaluation_workload(cfg, lambda, rep);
        prepare_apps(apps, cfg.mec());
        runs.push_back(run_policy(cfg, kind, learner ? &learner->network() : nullptr, apps, lambda, rep));
    }
    MetricsReport report = summarize(to_string(kind), lambda, runs);
    auto out = open_out(cfg.output_dir / "evaluate.csv");
    write_metrics_csv(out, std::span<const MetricsReport>(&report, 1));
    auto reps = open_out(cfg.output_dir / "evaluate_replications.csv");
    write_replications_csv(reps, std::span<const MetricsReport>(&report, 1));
    return report;
}

std::map<double, std::vector<MetricsReport>> cmd_compare(const ExperimentConfig& cfg) {
    std::map<double, std::vector<MetricsReport>> tables;
    {
        auto manifest = open_out(cfg.output_dir / "manifest.txt");
        cfg.write(manifest);
    }
    for (double lambda : cfg.lambdas) {
        const auto dir = cfg.output_dir / ("lambda_" + lambda_tag(lambda));

        std::map<PolicyKind, TrainedAgent> agents;
        for (PolicyKind kind : cfg.schedulers) {
            if (kind != PolicyKind::SataDrl && kind != PolicyKind::DuelingDqn) continue;
            agents[kind] = train_policy(cfg, kind, lambda);
            auto curve = open_out(dir / ("curve_" + to_string(kind) + ".csv"));
            write_curve_csv(curve, agents[kind].curve);
        }

        std::map<PolicyKind, std::vector<SimulationTrace>> runs;
        for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
            const auto file = dir / "workloads" / ("rep_" + std::to_string(rep) + ".txt");
            save_workload_file(file, evaluation_workload(cfg, lambda, rep));
            for (PolicyKind kind : cfg.schedulers) {
                auto apps = load_workload_file(file);
                prepare_apps(apps, cfg.mec());
                const QNetwork* net = agents.count(kind) ? &agents.at(kind).learner->network() : nullptr;
                SimulationTrace trace = run_policy(cfg, kind, net, apps, lambda, rep);
                if (rep < cfg.trace_replications) {
                    auto out = open_out(dir / "traces" / (to_string(kind) + "_rep_" + std::to_string(rep) + ".csv"));
                    write_trace_csv(out, trace);
                }
                trace.rows.clear();
                trace.assignments.clear();
                runs[kind].push_back(std::move(trace));
            }
        }

        std::vector<MetricsReport> table;
        for (PolicyKind kind : cfg.schedulers) table.push_back(summarize(to_string(kind), lambda, runs[kind]));
        auto metrics = open_out(dir / "metrics.csv");
        write_metrics_csv(metrics, table);
        auto reps = open_out(dir / "replications.csv");
        write_replications_csv(reps, table);
        tables[lambda] = std::move(table);
    }
    return tables;
}

}  // namespace sata
