#include "sata/network.hpp"

#include <cmath>

namespace sata {

Activation parse_activation(const std::string& name) {
    if (name == "relu") return Activation::Relu;
    if (name == "identity" || name == "linear") return Activation::Identity;
    throw NetworkError("unknown activation '" + name + "'");
}

const char* to_string(Activation a) { return a == Activation::Relu ? "relu" : "identity"; }

namespace {

std::size_t stack_param_count(const std::vector<std::size_t>& sizes) {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) n += sizes[l] * sizes[l + 1] + sizes[l + 1];
    return n;
}

// acts[0] is the input; acts[l+1] is the output of layer l (after activation if applied).
void stack_forward(std::span<const double> p, const std::vector<std::size_t>& sizes, Activation hidden,
                   bool activate_last, std::span<const double> input, std::vector<std::vector<double>>& acts) {
    const std::size_t layers = sizes.size() - 1;
    acts.resize(layers + 1);
    acts[0].assign(input.begin(), input.end());
    std::size_t off = 0;
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in = sizes[l], out = sizes[l + 1];
        const double* w = p.data() + off;
        const double* b = w + in * out;
        const auto& x = acts[l];
        auto& y = acts[l + 1];
        y.assign(out, 0.0);
        const bool act = hidden == Activation::Relu && (l + 1 < layers || activate_last);
        for (std::size_t o = 0; o < out; ++o) {
            double s = b[o];
            const double* row = w + o * in;
            for (std::size_t i = 0; i < in; ++i) s += row[i] * x[i];
            y[o] = (act && s < 0.0) ? 0.0 : s;
        }
        off += in * out + out;
    }
}

// `delta` is dL/d(acts.back()); on return holds dL/d(input).
void stack_backward(std::span<const double> p, const std::vector<std::size_t>& sizes, Activation hidden,
                    bool activate_last, const std::vector<std::vector<double>>& acts, std::vector<double>& delta,
                    std::span<double> grad) {
    const std::size_t layers = sizes.size() - 1;
    std::size_t off = stack_param_count(sizes);
    std::vector<double> prev;
    for (std::size_t l = layers; l-- > 0;) {
        const std::size_t in = sizes[l], out = sizes[l + 1];
        off -= in * out + out;
        const double* w = p.data() + off;
        double* gw = grad.data() + off;
        double* gb = gw + in * out;
        const bool act = hidden == Activation::Relu && (l + 1 < layers || activate_last);
        if (act)
            for (std::size_t o = 0; o < out; ++o)
                if (acts[l + 1][o] <= 0.0) delta[o] = 0.0;
        const auto& x = acts[l];
        prev.assign(in, 0.0);
        for (std::size_t o = 0; o < out; ++o) {
            const double d = delta[o];
            if (d == 0.0) continue;
            const double* row = w + o * in;
            double* grow = gw + o * in;
            for (std::size_t i = 0; i < in; ++i) {
                grow[i] += d * x[i];
                prev[i] += row[i] * d;
            }
            gb[o] += d;
        }
        delta.swap(prev);
    }
}

void check_input(std::span<const double> input, std::size_t expected) {
    if (input.size() != expected)
        throw NetworkError("input has " + std::to_string(input.size()) + " features, network expects " +
                           std::to_string(expected));
}

}  // namespace

ValueNetwork::ValueNetwork(std::vector<std::size_t> layer_sizes, Activation hidden)
    : sizes_(std::move(layer_sizes)), hidden_(hidden) {
    if (sizes_.size() < 2) throw NetworkError("network needs at least an input and an output layer");
    for (std::size_t s : sizes_)
        if (s == 0) throw NetworkError("layer sizes must be positive");
    params_.assign(stack_param_count(sizes_), 0.0);
}

std::span<double> ValueNetwork::weights(std::size_t l) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < l; ++k) off += sizes_[k] * sizes_[k + 1] + sizes_[k + 1];
    return std::span<double>(params_).subspan(off, sizes_[l] * sizes_[l + 1]);
}

std::span<double> ValueNetwork::biases(std::size_t l) {
    const auto w = weights(l);
    return std::span<double>(w.data() + w.size(), sizes_[l + 1]);
}

std::vector<double> ValueNetwork::forward(std::span<const double> input) const {
    check_input(input, sizes_.front());
    std::vector<std::vector<double>> acts;
    stack_forward(params_, sizes_, hidden_, false, input, acts);
    return std::move(acts.back());
}

void ValueNetwork::accumulate_gradient(std::span<const double> input, std::span<const double> d_output,
                                       std::span<double> grad) const {
    check_input(input, sizes_.front());
    if (d_output.size() != sizes_.back() || grad.size() != params_.size())
        throw NetworkError("gradient buffers do not match the network");
    std::vector<std::vector<double>> acts;
    stack_forward(params_, sizes_, hidden_, false, input, acts);
    std::vector<double> delta(d_output.begin(), d_output.end());
    stack_backward(params_, sizes_, hidden_, false, acts, delta, grad);
}

DuelingNetwork::DuelingNetwork(std::vector<std::size_t> trunk, std::size_t actions, Activation hidden)
    : trunk_(std::move(trunk)), actions_(actions), hidden_(hidden) {
    if (trunk_.size() < 2) throw NetworkError("dueling trunk needs an input and a hidden layer");
    if (actions_ == 0) throw NetworkError("dueling head needs at least one action");
    trunk_params_ = stack_param_count(trunk_);
    const std::size_t width = trunk_.back();
    params_.assign(trunk_params_ + (width + 1) + actions_ * (width + 1), 0.0);
}

std::vector<std::size_t> DuelingNetwork::shape() const {
    auto s = trunk_;
    s.push_back(actions_);
    return s;
}

std::span<double> DuelingNetwork::value_head() {
    return std::span<double>(params_).subspan(trunk_params_, trunk_.back() + 1);
}

std::span<double> DuelingNetwork::advantage_head() {
    const std::size_t width = trunk_.back();
    return std::span<double>(params_).subspan(trunk_params_ + width + 1, actions_ * (width + 1));
}

std::vector<double> DuelingNetwork::forward(std::span<const double> input) const {
    check_input(input, trunk_.front());
    std::vector<std::vector<double>> acts;
    stack_forward(params_, trunk_, hidden_, true, input, acts);
    const auto& h = acts.back();
    const std::size_t width = h.size();
    const double* vw = params_.data() + trunk_params_;
    const double* aw = vw + width + 1;
    const double* ab = aw + actions_ * width;

    double v = vw[width];
    for (std::size_t i = 0; i < width; ++i) v += vw[i] * h[i];
    std::vector<double> adv(actions_);
    double mean = 0.0;
    for (std::size_t a = 0; a < actions_; ++a) {
        double s = ab[a];
        for (std::size_t i = 0; i < width; ++i) s += aw[a * width + i] * h[i];
        adv[a] = s;
        mean += s;
    }
    mean /= static_cast<double>(actions_);
    for (double& q : adv) q = v + q - mean;
    return adv;
}

void DuelingNetwork::accumulate_gradient(std::span<const double> input, std::span<const double> d_output,
                                         std::span<double> grad) const {
    check_input(input, trunk_.front());
    if (d_output.size() != actions_ || grad.size() != params_.size())
        throw NetworkError("gradient buffers do not match the network");
    std::vector<std::vector<double>> acts;
    stack_forward(params_, trunk_, hidden_, true, input, acts);
    const auto& h = acts.back();
    const std::size_t width = h.size();
    const double* vw = params_.data() + trunk_params_;
    const double* aw = vw + width + 1;
    double* gvw = grad.data() + trunk_params_;
    double* gaw = gvw + width + 1;
    double* gab = gaw + actions_ * width;

    double d_value = 0.0;
    for (double d : d_output) d_value += d;
    const double d_mean = d_value / static_cast<double>(actions_);

    std::vector<double> delta(width, 0.0);
    for (std::size_t i = 0; i < width; ++i) {
        gvw[i] += d_value * h[i];
        delta[i] += vw[i] * d_value;
    }
    gvw[width] += d_value;
    for (std::size_t a = 0; a < actions_; ++a) {
        const double d = d_output[a] - d_mean;
        for (std::size_t i = 0; i < width; ++i) {
            gaw[a * width + i] += d * h[i];
            delta[i] += aw[a * width + i] * d;
        }
        gab[a] += d;
    }
    stack_backward(params_, trunk_, hidden_, true, acts, delta, grad.first(trunk_params_));
}

void initialize(QNetwork& net, Rng& rng) {
    auto params = net.parameters();
    const auto shape = net.shape();
    auto fill_layer = [&](std::size_t& off, std::size_t in, std::size_t out) {
        const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
        for (std::size_t k = 0; k < in * out; ++k) params[off + k] = (2.0 * uniform01(rng) - 1.0) * limit;
        off += in * out;
        for (std::size_t k = 0; k < out; ++k) params[off + k] = 0.0;
        off += out;
    };
    std::size_t off = 0;
    if (net.kind() == "dueling") {
        for (std::size_t l = 0; l + 2 < shape.size(); ++l) fill_layer(off, shape[l], shape[l + 1]);
        const std::size_t width = shape[shape.size() - 2];
        fill_layer(off, width, 1);
        fill_layer(off, width, shape.back());
    } else {
        for (std::size_t l = 0; l + 1 < shape.size(); ++l) fill_layer(off, shape[l], shape[l + 1]);
    }
}

std::unique_ptr<QNetwork> make_network(const std::string& kind, const std::vector<std::size_t>& shape,
                                       Activation hidden) {
    if (kind == "mlp") return std::make_unique<ValueNetwork>(shape, hidden);
    if (kind == "dueling") {
        if (shape.size() < 3) throw NetworkError("dueling network needs input, hidden and output sizes");
        return std::make_unique<DuelingNetwork>(std::vector<std::size_t>(shape.begin(), shape.end() - 1), shape.back(),
                                                hidden);
    }
    throw NetworkError("unknown network kind '" + kind + "'");
}

AdamOptimizer::AdamOptimizer(std::size_t parameter_count, AdamConfig config)
    : config_(config), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grad) {
    if (params.size() != m_.size() || grad.size() != m_.size())
        throw NetworkError("optimizer state does not match the parameter count");
    ++t_;
    const double b1 = config_.beta1, b2 = config_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
        m_[k] = b1 * m_[k] + (1.0 - b1) * grad[k];
        v_[k] = b2 * v_[k] + (1.0 - b2) * grad[k] * grad[k];
        const double m_hat = m_[k] / c1;
        const double v_hat = v_[k] / c2;
        params[k] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
}

void AdamOptimizer::restore(std::uint64_t t, std::vector<double> m, std::vector<double> v) {
    if (m.size() != m_.size() || v.size() != v_.size()) throw NetworkError("optimizer moments have the wrong size");
    t_ = t;
    m_ = std::move(m);
    v_ = std::move(v);
}

}  // namespace sata
