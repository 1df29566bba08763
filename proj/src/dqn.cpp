#include "sata/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace sata {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : storage_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
}

void ReplayBuffer::push(const MdpTransition& t) {
    storage_[head_] = t;
    head_ = (head_ + 1) % storage_.size();
    size_ = std::min(size_ + 1, storage_.size());
}

const MdpTransition& ReplayBuffer::at(std::size_t i) const {
    if (i >= size_) throw std::out_of_range("replay index out of range");
    const std::size_t oldest = (head_ + storage_.size() - size_) % storage_.size();
    return storage_[(oldest + i) % storage_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch, Rng& rng) const {
    if (batch > size_) throw std::invalid_argument("cannot sample more transitions than stored");
    std::vector<std::size_t> picked;
    picked.reserve(batch);
    for (std::size_t j = size_ - batch; j < size_; ++j) {
        const std::size_t t = uniform_index(rng, j + 1);
        if (std::find(picked.begin(), picked.end(), t) == picked.end()) picked.push_back(t);
        else picked.push_back(j);
    }
    return picked;
}

double EpsilonSchedule::at(std::uint64_t step, std::uint64_t planned_steps) const {
    const double horizon = decay_fraction * static_cast<double>(planned_steps);
    if (horizon <= 0.0) return end;
    const double frac = static_cast<double>(step) / horizon;
    if (frac >= 1.0) return end;
    return start + (end - start) * frac;
}

void TrainConfig::validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
    if (batch == 0) throw std::invalid_argument("batch must be at least 1");
    if (replay_capacity < batch) throw std::invalid_argument("replay capacity smaller than batch");
    if (target_sync_steps == 0) throw std::invalid_argument("target sync period must be positive");
    if (!(adam.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
}

std::size_t greedy_action(std::span<const double> q, const ActionMask& mask) {
    std::size_t best = q.size();
    for (std::size_t a = 0; a < q.size(); ++a) {
        if (!mask.valid(a)) continue;
        if (best == q.size() || q[a] > q[best]) best = a;
    }
    if (best == q.size()) throw std::invalid_argument("every action is masked");
    return best;
}

std::size_t select_action(std::span<const double> q, const ActionMask& mask, double epsilon, Rng& rng) {
    const std::size_t valid = mask.valid_count();
    if (valid == 0) throw std::invalid_argument("every action is masked");
    if (epsilon > 0.0 && uniform01(rng) < epsilon) {
        std::size_t k = uniform_index(rng, valid);
        for (std::size_t a = 0; a < mask.size(); ++a) {
            if (!mask.valid(a)) continue;
            if (k-- == 0) return a;
        }
    }
    return greedy_action(q, mask);
}

std::vector<double> compute_targets(const Batch& batch, const QNetwork& target, double gamma, const ActionMask& mask,
                                    const NormalizationScales& scales) {
    std::vector<double> y;
    y.reserve(batch.items.size());
    for (const MdpTransition* t : batch.items) {
        double next = 0.0;
        if (gamma != 0.0) {
            const auto q = target.forward(normalize_state(t->next_state, scales));
            next = q[greedy_action(q, mask)];
        }
        y.push_back(t->reward + gamma * next);
    }
    return y;
}

double td_loss(const QNetwork& net, const Batch& batch, std::span<const double> targets,
               const NormalizationScales& scales, std::span<double> grad) {
    const double n = static_cast<double>(batch.items.size());
    std::vector<double> d_out(net.output_size(), 0.0);
    double loss = 0.0;
    for (std::size_t b = 0; b < batch.items.size(); ++b) {
        const MdpTransition& t = *batch.items[b];
        const auto x = normalize_state(t.state, scales);
        const auto q = net.forward(x);
        const double err = q.at(t.action) - targets[b];
        loss += err * err / n;
        if (!grad.empty()) {
            std::fill(d_out.begin(), d_out.end(), 0.0);
            d_out[t.action] = 2.0 * err / n;
            net.accumulate_gradient(x, d_out, grad);
        }
    }
    return loss;
}

double train_step(QNetwork& net, const QNetwork& target, const Batch& batch, AdamOptimizer& opt, double gamma,
                  const ActionMask& mask, const NormalizationScales& scales) {
    if (batch.items.empty()) throw std::invalid_argument("empty training batch");
    const auto y = compute_targets(batch, target, gamma, mask, scales);
    std::vector<double> grad(net.parameters().size(), 0.0);
    const double loss = td_loss(net, batch, y, scales, grad);
    if (!std::isfinite(loss)) throw DivergenceError("non-finite TD loss; training diverged");
    opt.step(net.parameters(), grad);
    for (double p : net.parameters())
        if (!std::isfinite(p)) throw DivergenceError("non-finite parameter after update");
    return loss;
}

void sync_target(const QNetwork& net, QNetwork& target) {
    if (net.kind() != target.kind() || net.shape() != target.shape() ||
        net.hidden_activation() != target.hidden_activation())
        throw NetworkError("target network architecture differs from the prediction network");
    std::copy(net.parameters().begin(), net.parameters().end(), target.parameters().begin());
}

DqnLearner::DqnLearner(std::unique_ptr<QNetwork> net, TrainConfig config, std::uint64_t seed,
                       std::size_t action_count)
    : net_(std::move(net)),
      target_(net_->clone()),
      config_(config),
      optimizer_(net_->parameters().size(), config.adam),
      replay_(config.replay_capacity),
      mask_(action_count - 1),
      explore_rng_(make_stream(seed, "epsilon")),
      replay_rng_(make_stream(seed, "replay")) {
    config_.validate();
    if (net_->input_size() != StateVector::kSize) throw NetworkError("value network must take 5 state features");
    if (net_->output_size() != action_count) throw NetworkError("value network output must match action count");
}

double DqnLearner::current_epsilon() const {
    if (greedy_) return 0.0;
    return config_.epsilon.at(decision_steps_, planned_steps_);
}

std::size_t DqnLearner::select(const StateVector& state, const ActionMask& mask) {
    const auto q = net_->forward(normalize_state(state, config_.scales));
    for (double v : q)
        if (!std::isfinite(v)) throw DivergenceError("non-finite Q-value");
    if (greedy_) return greedy_action(q, mask);
    const double eps = current_epsilon();
    ++decision_steps_;
    if (decision_steps_ % config_.target_sync_steps == 0) sync_target(*net_, *target_);
    return select_action(q, mask, eps, explore_rng_);
}

void DqnLearner::observe(const MdpTransition& transition) {
    if (greedy_) return;
    replay_.push(transition);
    if (replay_.size() >= config_.batch) {
        Batch batch;
        for (std::size_t i : replay_.sample_indices(config_.batch, replay_rng_)) batch.items.push_back(&replay_.at(i));
        last_loss_ = train_step(*net_, *target_, batch, optimizer_, config_.gamma, mask_, config_.scales);
        ++updates_;
    }
}

// ---------------------------------------------------------------------------
// Checkpoint: text, parameters as hex floats so load is bitwise exact.

namespace {

void write_doubles(std::ostream& out, const char* tag, std::span<const double> values) {
    out << tag << ' ' << values.size() << '\n';
    char buf[64];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%a", values[i]);
        out << buf << ((i + 1) % 8 == 0 || i + 1 == values.size() ? '\n' : ' ');
    }
}

std::string expect_token(std::istream& in, const std::string& what) {
    std::string tok;
    if (!(in >> tok)) throw NetworkError("checkpoint truncated before " + what);
    return tok;
}

void expect_keyword(std::istream& in, const std::string& kw) {
    const auto tok = expect_token(in, kw);
    if (tok != kw) throw NetworkError("checkpoint: expected '" + kw + "', found '" + tok + "'");
}

std::vector<double> read_doubles(std::istream& in, const std::string& tag) {
    expect_keyword(in, tag);
    const std::size_t n = std::stoull(expect_token(in, tag + " count"));
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto tok = expect_token(in, tag + " value");
        char* end = nullptr;
        v[i] = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size()) throw NetworkError("checkpoint: bad number '" + tok + "'");
    }
    return v;
}

}  // namespace

void DqnLearner::save(std::ostream& out) const {
    out << "sata-checkpoint 1\n";
    out << "kind " << net_->kind() << '\n';
    out << "activation " << to_string(net_->hidden_activation()) << '\n';
    const auto shape = net_->shape();
    out << "shape " << shape.size();
    for (std::size_t s : shape) out << ' ' << s;
    out << '\n';
    write_doubles(out, "params", net_->parameters());
    write_doubles(out, "target", target_->parameters());
    out << "adam_steps " << optimizer_.steps() << '\n';
    write_doubles(out, "adam_m", optimizer_.first_moment());
    write_doubles(out, "adam_v", optimizer_.second_moment());
    out << "decision_steps " << decision_steps_ << '\n';
    out << "planned_steps " << planned_steps_ << '\n';
    out << "updates " << updates_ << '\n';
    out << "rng_epsilon " << explore_rng_ << '\n';
    out << "rng_replay " << replay_rng_ << '\n';
    out << "end\n";
}

void DqnLearner::save(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw NetworkError("cannot write checkpoint " + path.string());
    save(out);
}

std::unique_ptr<DqnLearner> DqnLearner::load(std::istream& in, TrainConfig config) {
    expect_keyword(in, "sata-checkpoint");
    if (expect_token(in, "version") != "1") throw NetworkError("unsupported checkpoint version");
    expect_keyword(in, "kind");
    const auto kind = expect_token(in, "kind");
    expect_keyword(in, "activation");
    const auto activation = parse_activation(expect_token(in, "activation"));
    expect_keyword(in, "shape");
    std::vector<std::size_t> shape(std::stoull(expect_token(in, "shape count")));
    for (auto& s : shape) s = std::stoull(expect_token(in, "shape"));

    auto net = make_network(kind, shape, activation);
    const auto params = read_doubles(in, "params");
    if (params.size() != net->parameters().size()) throw NetworkError("checkpoint parameter count mismatch");
    std::copy(params.begin(), params.end(), net->parameters().begin());

    auto learner = std::make_unique<DqnLearner>(std::move(net), config, 0, shape.back());
    const auto target = read_doubles(in, "target");
    if (target.size() != params.size()) throw NetworkError("checkpoint target parameter count mismatch");
    std::copy(target.begin(), target.end(), learner->target_->parameters().begin());

    expect_keyword(in, "adam_steps");
    const std::uint64_t t = std::stoull(expect_token(in, "adam steps"));
    auto m = read_doubles(in, "adam_m");
    auto v = read_doubles(in, "adam_v");
    learner->optimizer_.restore(t, std::move(m), std::move(v));
    expect_keyword(in, "decision_steps");
    learner->decision_steps_ = std::stoull(expect_token(in, "decision steps"));
    expect_keyword(in, "planned_steps");
    learner->planned_steps_ = std::stoull(expect_token(in, "planned steps"));
    expect_keyword(in, "updates");
    learner->updates_ = std::stoull(expect_token(in, "updates"));
    expect_keyword(in, "rng_epsilon");
    in >> learner->explore_rng_;
    expect_keyword(in, "rng_replay");
    in >> learner->replay_rng_;
    expect_keyword(in, "end");
    return learner;
}

std::unique_ptr<DqnLearner> DqnLearner::load(const std::filesystem::path& path, TrainConfig config) {
    std::ifstream in(path);
    if (!in) throw NetworkError("cannot open checkpoint " + path.string());
    return load(in, config);
}

}  // namespace sata
