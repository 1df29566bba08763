#include <gtest/gtest.h>

#include <cmath>

#include "sata/network.hpp"

using namespace sata;

namespace {

double relative_error(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-8});
    return std::abs(a - b) / scale;
}

// Finite-difference check of d(sum_k c_k Q_k)/dθ.
void check_gradient(QNetwork& net, std::uint64_t seed) {
    Rng rng = make_stream(seed, "grad");
    initialize(net, rng);
    for (double& p : net.parameters()) p += 0.05 * (uniform01(rng) - 0.5);
    std::vector<double> x(net.input_size());
    for (double& v : x) v = 2.0 * uniform01(rng) - 1.0;
    std::vector<double> c(net.output_size());
    for (double& v : c) v = 2.0 * uniform01(rng) - 1.0;

    std::vector<double> grad(net.parameters().size(), 0.0);
    net.accumulate_gradient(x, c, grad);
    auto objective = [&] {
        const auto q = net.forward(x);
        double s = 0;
        for (std::size_t k = 0; k < q.size(); ++k) s += c[k] * q[k];
        return s;
    };
    const double h = 1e-5;
    auto params = net.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double keep = params[i];
        params[i] = keep + h;
        const double up = objective();
        params[i] = keep - h;
        const double down = objective();
        params[i] = keep;
        const double numeric = (up - down) / (2 * h);
        if (std::abs(numeric) < 1e-9 && std::abs(grad[i]) < 1e-9) continue;
        EXPECT_LT(relative_error(grad[i], numeric), 1e-4) << "parameter " << i;
    }
}

}  // namespace

TEST(ValueNetwork, ZeroParametersGiveZeroOutput) {
    ValueNetwork net({5, 4, 3});
    for (double q : net.forward(std::vector<double>{1, 2, 3, 4, 5})) EXPECT_EQ(q, 0.0);
}

TEST(ValueNetwork, HandComputedForward) {
    ValueNetwork net({2, 2, 1});
    auto w0 = net.weights(0);
    // hidden = relu([x0 - x1, x1]) + [0, 1]
    w0[0] = 1;
    w0[1] = -1;
    w0[2] = 0;
    w0[3] = 1;
    net.biases(0)[1] = 1;
    auto w1 = net.weights(1);
    w1[0] = 2;
    w1[1] = 3;
    net.biases(1)[0] = -0.5;
    // x = (1, 3): hidden = (relu(-2), 4) = (0, 4); q = 0 + 12 - 0.5
    EXPECT_DOUBLE_EQ(net.forward(std::vector<double>{1, 3})[0], 11.5);
    // x = (3, 1): hidden = (2, 2); q = 4 + 6 - 0.5
    EXPECT_DOUBLE_EQ(net.forward(std::vector<double>{3, 1})[0], 9.5);

    ValueNetwork linear({2, 2, 1}, Activation::Identity);
    std::copy(net.parameters().begin(), net.parameters().end(), linear.parameters().begin());
    // identity hidden layer keeps the negative unit: -4 + 12 - 0.5
    EXPECT_DOUBLE_EQ(linear.forward(std::vector<double>{1, 3})[0], 7.5);
}

TEST(ValueNetwork, RowsAreIndependent) {
    ValueNetwork net({5, 16, 8, 5});
    Rng rng = make_stream(1, "init");
    initialize(net, rng);
    const std::vector<double> a{0.1, 0.2, 0.3, 0.4, 0.5};
    const auto before = net.forward(a);
    for (int i = 0; i < 63; ++i) {
        std::vector<double> other(5);
        for (double& v : other) v = uniform01(rng);
        (void)net.forward(other);
    }
    EXPECT_EQ(net.forward(a), before);
    EXPECT_EQ(net.forward(a).size(), 5u);
}

TEST(ValueNetwork, GradientMatchesFiniteDifferences) {
    ValueNetwork small({5, 2, 2});
    check_gradient(small, 1);
    ValueNetwork deep({5, 8, 8, 5});
    check_gradient(deep, 2);
    ValueNetwork linear({5, 8, 5}, Activation::Identity);
    check_gradient(linear, 3);
}

TEST(ValueNetwork, GlorotInitialization) {
    ValueNetwork net({5, 128, 64});
    Rng rng = make_stream(4, "init");
    initialize(net, rng);
    const double limit0 = std::sqrt(6.0 / (5 + 128));
    for (double w : net.weights(0)) EXPECT_LE(std::abs(w), limit0);
    for (double b : net.biases(0)) EXPECT_EQ(b, 0.0);
    const double limit1 = std::sqrt(6.0 / (128 + 64));
    for (double w : net.weights(1)) EXPECT_LE(std::abs(w), limit1);
}

TEST(DuelingNetwork, EqualAdvantagesGiveValue) {
    DuelingNetwork net({2, 3}, 4);
    Rng rng = make_stream(5, "init");
    initialize(net, rng);
    auto adv = net.advantage_head();
    std::fill(adv.begin(), adv.end(), 0.0);
    auto value = net.value_head();
    std::fill(value.begin(), value.end(), 0.0);
    value[3] = 2.5;  // bias
    for (double q : net.forward(std::vector<double>{0.3, -0.7})) EXPECT_DOUBLE_EQ(q, 2.5);
}

TEST(DuelingNetwork, HandBuiltTwoActionHead) {
    // trunk: one relu unit h = relu(x0); V = 2h + 1; A = (h, -h)
    DuelingNetwork net({1, 1}, 2);
    net.parameters()[0] = 1;  // trunk weight
    net.parameters()[1] = 0;  // trunk bias
    auto v = net.value_head();
    v[0] = 2;
    v[1] = 1;
    auto a = net.advantage_head();
    a[0] = 1;
    a[1] = -1;
    a[2] = 0;
    a[3] = 0;
    // x = 3: h = 3, V = 7, A = (3, -3), mean 0
    const auto q = net.forward(std::vector<double>{3});
    EXPECT_DOUBLE_EQ(q[0], 10);
    EXPECT_DOUBLE_EQ(q[1], 4);
    EXPECT_EQ(net.shape(), (std::vector<std::size_t>{1, 1, 2}));
}

TEST(DuelingNetwork, GradientMatchesFiniteDifferences) {
    DuelingNetwork net({5, 8, 8}, 5);
    check_gradient(net, 6);
}

TEST(Adam, FirstStepMovesByLearningRate) {
    AdamConfig cfg;
    cfg.learning_rate = 0.01;
    AdamOptimizer opt(3, cfg);
    std::vector<double> p{1.0, 2.0, 3.0};
    const std::vector<double> g{0.5, -2.0, 0.0};
    opt.step(p, g);
    EXPECT_NEAR(p[0], 1.0 - 0.01, 1e-9);
    EXPECT_NEAR(p[1], 2.0 + 0.01, 1e-9);
    EXPECT_EQ(p[2], 3.0);
    EXPECT_EQ(opt.steps(), 1u);
    EXPECT_DOUBLE_EQ(opt.first_moment()[0], 0.05);
    EXPECT_DOUBLE_EQ(opt.second_moment()[1], 0.001 * 4.0);
}

TEST(Activation, Parse) {
    EXPECT_EQ(parse_activation("relu"), Activation::Relu);
    EXPECT_EQ(parse_activation("identity"), Activation::Identity);
    EXPECT_EQ(parse_activation("linear"), Activation::Identity);
    EXPECT_THROW(parse_activation("softmax"), NetworkError);
}

TEST(MakeNetwork, RebuildsBothKinds) {
    const auto mlp = make_network("mlp", {5, 4, 3}, Activation::Relu);
    EXPECT_EQ(mlp->shape(), (std::vector<std::size_t>{5, 4, 3}));
    const auto duel = make_network("dueling", {5, 4, 3}, Activation::Identity);
    EXPECT_EQ(duel->kind(), "dueling");
    EXPECT_EQ(duel->shape(), (std::vector<std::size_t>{5, 4, 3}));
    EXPECT_THROW(make_network("cnn", {5, 3}, Activation::Relu), NetworkError);
}
