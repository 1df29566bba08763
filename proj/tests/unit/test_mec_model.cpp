#include <gtest/gtest.h>

#include "helpers.hpp"
#include "sata/mec_model.hpp"

using namespace sata;
using sata::testing::make_app;

namespace {

Task real_task(double workload) { return Task{0, 1, workload, kUnsetLct}; }

}  // namespace

TEST(ExecutionTime, DividesWorkloadByCapability) {
    EXPECT_DOUBLE_EQ(execution_time(real_task(500), 5000), 0.1);
    EXPECT_DOUBLE_EQ(execution_time(real_task(100), 4000), 0.025);
    EXPECT_EQ(execution_time(Task{0, 0, 0.0, kUnsetLct}, 6000), 0.0);
}

TEST(TransferTime, Cases) {
    const NetworkTopology topo = NetworkTopology::full_mesh(4, 440, 1000);
    // app: source 0 -> 1 -> 2 -> sink 3, home device 1
    TaskGraph app = make_app({100, 100}, {{1, 2, 44}}, 100, 10, 1);
    const Edge& offload = app.edges[app.in_edges(1)[0]];
    const Edge& inner = app.edges[app.in_edges(2)[0]];

    EXPECT_EQ(transfer_time(app, inner, 2, 2, topo), 0.0);
    EXPECT_DOUBLE_EQ(transfer_time(app, offload, 0, 1, topo), 0.1);
    EXPECT_DOUBLE_EQ(transfer_time(app, inner, 1, 3, topo), 0.1);

    TaskGraph far = make_app({100}, {}, 440, 1, 1);
    const Edge& big = far.edges[far.in_edges(1)[0]];
    EXPECT_DOUBLE_EQ(transfer_time(far, big, 0, 3, topo), 0.44 + 1.0);
}

TEST(TransferTime, ResultReturnsThroughHome) {
    const NetworkTopology topo = NetworkTopology::full_mesh(3, 440, 1000);
    TaskGraph app = make_app({100}, {}, 1, 440, 2);
    const Edge& result = app.edges[app.in_edges(app.sink())[0]];
    EXPECT_DOUBLE_EQ(transfer_time(app, result, 2, 0, topo), 0.44);
    EXPECT_DOUBLE_EQ(transfer_time(app, result, 3, 0, topo), 0.44 + 1.0);
}

TEST(CompletionTime, QueueBound) {
    const std::vector<double> arrivals{1.5, 0.3};
    const auto t = completion_time(real_task(500), 5000, 2.0, arrivals, 1.0);
    EXPECT_DOUBLE_EQ(t.start, 2.0);
    EXPECT_DOUBLE_EQ(t.finish, 2.1);
    EXPECT_DOUBLE_EQ(t.max_arrival, 1.5);
    EXPECT_DOUBLE_EQ(t.exec, 0.1);
}

TEST(CompletionTime, IdleDevice) {
    const double now = 3.25;
    const std::vector<double> arrivals{now};
    const auto t = completion_time(real_task(500), 5000, now, arrivals, now);
    EXPECT_DOUBLE_EQ(t.finish, now + 0.1);
}

TEST(CompletionTime, SinkTakesLatestArrival) {
    const std::vector<double> arrivals{3.0, 2.5};
    EXPECT_DOUBLE_EQ(sink_completion_time(arrivals), 3.0);
}

TEST(Makespan, SubtractsRelease) {
    TaskGraph app = make_app({100}, {}, 1, 1, 1, 2.4);
    EXPECT_DOUBLE_EQ(makespan(app, Assignment{0, app.sink(), 0, 12.4, 12.4}), 10.0);
    EXPECT_EQ(makespan(app, Assignment{0, app.sink(), 0, 2.4, 2.4}), 0.0);
    EXPECT_THROW(makespan(app, Assignment{0, 1, 1, 3, 3}), ModelError);
}

TEST(CapabilityChain, ReferenceMatrix) {
    const auto chain = CapabilityChain::reference();
    ASSERT_EQ(chain.size(), 5u);
    EXPECT_EQ(chain.probability(0, 0), 0.5);
    EXPECT_EQ(chain.probability(4, 0), 0.25);
    EXPECT_EQ(chain.probability(2, 4), 0.125);
    EXPECT_EQ(default_capability_levels(), (std::vector<double>{6000, 5500, 5000, 4500, 4000}));
}

TEST(CapabilityChain, RejectsNonStochasticRows) {
    EXPECT_THROW(CapabilityChain({{0.5, 0.4}, {0.5, 0.5}}), ModelError);
    EXPECT_THROW(CapabilityChain({{1.5, -0.5}, {0.5, 0.5}}), ModelError);
    EXPECT_THROW(CapabilityChain({{1.0, 0.0}}), ModelError);
}

TEST(CapabilityChain, IdentityNeverMoves) {
    const auto chain = CapabilityChain::identity(5);
    EdgeDevice d;
    d.capability_levels = default_capability_levels();
    d.current_level = 3;
    d.chain_rng = make_stream(1, "test");
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(transition_capability(d, chain), 3u);
}

TEST(CapabilityChain, EmpiricalRowMatches) {
    const auto chain = CapabilityChain::reference();
    Rng rng = make_stream(42, "row");
    std::vector<double> counts(5, 0.0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) counts[chain.sample_next(2, rng)] += 1.0;
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(counts[j] / n, chain.probability(2, j), 0.01);
}

TEST(CapabilityChain, PlannedLevelsFollowTheSameStream) {
    const auto chain = CapabilityChain::reference();
    EdgeDevice a, b;
    a.capability_levels = b.capability_levels = default_capability_levels();
    a.chain_rng = make_stream(9, "cap");
    b.chain_rng = make_stream(9, "cap");
    plan_levels(b, chain, 6);
    ASSERT_EQ(b.upcoming_levels.size(), 6u);
    for (int i = 0; i < 20; ++i) EXPECT_EQ(transition_capability(a, chain), transition_capability(b, chain));
}

TEST(EdgeDevice, StartCapabilityLooksPastTheQueue) {
    const auto chain = CapabilityChain::reference();
    EdgeDevice d;
    d.capability_levels = default_capability_levels();
    d.chain_rng = make_stream(3, "cap");
    EXPECT_EQ(d.start_capability(), 6000.0);
    d.queue.push_back({0, 1, 100, 1.0});
    d.queue.push_back({0, 2, 100, 2.0});
    EXPECT_THROW(d.start_capability(), ModelError);
    plan_levels(d, chain, 2);
    EXPECT_EQ(d.start_capability(), d.capability_levels[d.upcoming_levels[1]]);
}

TEST(Topology, RatesAndAggregates) {
    const auto topo = NetworkTopology::full_mesh(4, 440, 1000);
    EXPECT_DOUBLE_EQ(topo.sum_rate(), 12 * 440.0);
    EXPECT_EQ(topo.max_rate(), 1000.0);
    EXPECT_EQ(topo.rate(1, 3), 440.0);
    EXPECT_THROW(topo.rate(0, 1), ModelError);
    EXPECT_THROW(topo.rate(2, 2), ModelError);
    EXPECT_THROW(topo.rate(1, 5), ModelError);
}

TEST(EdgeDevice, QueuedWorkloadSumsQueue) {
    EdgeDevice d;
    d.capability_levels = {5000};
    d.queue.push_back({0, 1, 120, 1.0});
    d.queue.push_back({1, 4, 80, 2.0});
    EXPECT_DOUBLE_EQ(d.queued_workload(), 200.0);
}
