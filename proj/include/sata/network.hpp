#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sata/rng.hpp"

namespace sata {

class NetworkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Activation { Relu, Identity };
Activation parse_activation(const std::string& name);
const char* to_string(Activation a);

/// A differentiable Q-value approximator over a flat parameter vector.
class QNetwork {
public:
    virtual ~QNetwork() = default;

    virtual std::string kind() const = 0;
    /// Layer sizes, input first.
    virtual std::vector<std::size_t> shape() const = 0;
    virtual Activation hidden_activation() const = 0;
    std::size_t input_size() const { return shape().front(); }
    std::size_t output_size() const { return shape().back(); }

    virtual std::vector<double> forward(std::span<const double> input) const = 0;
    /// Adds dL/dθ into `grad` given dL/dQ (`d_output`) at `input`.
    virtual void accumulate_gradient(std::span<const double> input, std::span<const double> d_output,
                                     std::span<double> grad) const = 0;

    std::span<double> parameters() { return params_; }
    std::span<const double> parameters() const { return params_; }

    virtual std::unique_ptr<QNetwork> clone() const = 0;

protected:
    std::vector<double> params_;
};

/// Fully connected network; hidden layers use `hidden`, the output is linear.
class ValueNetwork final : public QNetwork {
public:
    ValueNetwork(std::vector<std::size_t> layer_sizes, Activation hidden = Activation::Relu);

    std::string kind() const override { return "mlp"; }
    std::vector<std::size_t> shape() const override { return sizes_; }
    Activation hidden_activation() const override { return hidden_; }

    std::vector<double> forward(std::span<const double> input) const override;
    void accumulate_gradient(std::span<const double> input, std::span<const double> d_output,
                             std::span<double> grad) const override;
    std::unique_ptr<QNetwork> clone() const override { return std::make_unique<ValueNetwork>(*this); }

    std::size_t layer_count() const { return sizes_.size() - 1; }
    /// Row-major weights (out x in) and biases of layer `l`.
    std::span<double> weights(std::size_t l);
    std::span<double> biases(std::size_t l);

private:
    std::vector<std::size_t> sizes_;
    Activation hidden_;
};

/// Shared trunk followed by value and advantage heads:
/// Q(s,a) = V(s) + A(s,a) - mean_a A(s,a).
class DuelingNetwork final : public QNetwork {
public:
    /// `trunk` is [input, hidden...]; `actions` is the output width.
    DuelingNetwork(std::vector<std::size_t> trunk, std::size_t actions, Activation hidden = Activation::Relu);

    std::string kind() const override { return "dueling"; }
    std::vector<std::size_t> shape() const override;
    Activation hidden_activation() const override { return hidden_; }

    std::vector<double> forward(std::span<const double> input) const override;
    void accumulate_gradient(std::span<const double> input, std::span<const double> d_output,
                             std::span<double> grad) const override;
    std::unique_ptr<QNetwork> clone() const override { return std::make_unique<DuelingNetwork>(*this); }

    /// Value head weights (width of last trunk layer) then its bias.
    std::span<double> value_head();
    /// Advantage head weights (actions x trunk width) then biases.
    std::span<double> advantage_head();

private:
    std::vector<std::size_t> trunk_;
    std::size_t actions_;
    Activation hidden_;
    std::size_t trunk_params_ = 0;
};

/// Glorot-uniform weights, zero biases.
void initialize(QNetwork& net, Rng& rng);

/// Builds a network from its serialized description.
std::unique_ptr<QNetwork> make_network(const std::string& kind, const std::vector<std::size_t>& shape,
                                       Activation hidden);

struct AdamConfig {
    double learning_rate = 6e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

class AdamOptimizer {
public:
    AdamOptimizer() = default;
    AdamOptimizer(std::size_t parameter_count, AdamConfig config);

    void step(std::span<double> params, std::span<const double> grad);

    const AdamConfig& config() const noexcept { return config_; }
    std::uint64_t steps() const noexcept { return t_; }
    std::span<const double> first_moment() const { return m_; }
    std::span<const double> second_moment() const { return v_; }
    void restore(std::uint64_t t, std::vector<double> m, std::vector<double> v);

private:
    AdamConfig config_;
    std::uint64_t t_ = 0;
    std::vector<double> m_;
    std::vector<double> v_;
};

}  // namespace sata
