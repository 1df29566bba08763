#include <gtest/gtest.h>

#include <sstream>

#include "helpers.hpp"
#include "sata/task_graph.hpp"
#include "sata/workload.hpp"

using namespace sata;
using sata::testing::make_app;

namespace {

RawGraph fig3_raw() {
    RawGraph raw;
    raw.workloads = {100, 200, 300, 400, 500, 600};
    raw.edges = {{0, 2, 1}, {1, 2, 1}, {1, 3, 1}, {2, 4, 1}, {3, 4, 1}, {3, 5, 1}};
    return raw;
}

TaskGraph fig3_graph() {
    const RawGraph raw = fig3_raw();
    const std::vector<double> off{10, 20}, res{30, 40};
    return augment_with_dummies(raw, off, res);
}

constexpr LctParams kParams{6000.0, 1000.0, 1000.0};

}  // namespace

TEST(Validate, EightTaskGraphIsValid) {
    const TaskGraph g = fig3_graph();
    EXPECT_EQ(g.tasks.size(), 8u);
    EXPECT_TRUE(validate(g).ok());
}

TEST(Validate, CycleIsRejected) {
    TaskGraph g = make_app({100, 100}, {{1, 2, 1}}, 1, 1);
    g.edges.push_back({2, 1, 1});
    g.finalize();
    const auto report = validate(g);
    EXPECT_FALSE(report.ok());
    EXPECT_TRUE(report.mentions("cycle"));
    EXPECT_TRUE(g.topological_order().empty());
}

TEST(Validate, DummyWorkloadMustBeZero) {
    TaskGraph g = make_app({100}, {}, 1, 1);
    g.tasks[0].workload = 7;
    EXPECT_TRUE(validate(g).mentions("dummy workload nonzero"));
}

TEST(Validate, OtherViolations) {
    TaskGraph g = make_app({100, 100}, {{1, 2, 1}}, 1, 1, 1, 5.0, 4.0);
    EXPECT_TRUE(validate(g).mentions("deadline not after release time"));

    g = make_app({100, 100}, {{1, 2, 1}}, 1, 1);
    g.edges.push_back({1, 1, 1});
    g.finalize();
    EXPECT_TRUE(validate(g).mentions("self loop"));

    g = make_app({100, 100}, {{1, 2, 1}}, 1, 1);
    g.edges[0].data_size = -1;
    EXPECT_TRUE(validate(g).mentions("negative or non-finite data size"));

    g = make_app({100, 100}, {{1, 2, 1}}, 1, 1);
    g.tasks[1].workload = 0;
    EXPECT_FALSE(validate(g).ok());
}

TEST(Augment, AddsSourceAndSink) {
    const RawGraph raw = fig3_raw();
    EXPECT_EQ(entry_tasks(raw), (std::vector<TaskId>{0, 1}));
    EXPECT_EQ(exit_tasks(raw), (std::vector<TaskId>{4, 5}));
    const TaskGraph g = fig3_graph();
    EXPECT_EQ(g.tasks.size(), 8u);
    EXPECT_EQ(g.edges.size(), raw.edges.size() + 4);
    EXPECT_EQ(g.tasks.front().workload, 0.0);
    EXPECT_EQ(g.tasks.back().workload, 0.0);
    for (std::size_t k = 0; k < raw.workloads.size(); ++k) EXPECT_EQ(g.tasks[k + 1].workload, raw.workloads[k]);
    EXPECT_EQ(g.out_edges(g.source()).size(), 2u);
    EXPECT_EQ(g.in_edges(g.sink()).size(), 2u);
}

TEST(Augment, SingleTaskBecomesChain) {
    const TaskGraph g = make_app({100}, {}, 10, 10);
    ASSERT_EQ(g.tasks.size(), 3u);
    ASSERT_EQ(g.edges.size(), 2u);
    EXPECT_EQ(g.edges[0].src, 0u);
    EXPECT_EQ(g.edges[0].dst, 1u);
    EXPECT_EQ(g.edges[1].src, 1u);
    EXPECT_EQ(g.edges[1].dst, 2u);
    EXPECT_EQ(g.edges[0].data_size, 10.0);
}

TEST(Augment, Errors) {
    RawGraph empty;
    EXPECT_THROW(augment_with_dummies(empty, {}, {}), GraphError);
    const RawGraph raw = fig3_raw();
    const std::vector<double> one{1};
    const std::vector<double> two{1, 2};
    EXPECT_THROW(augment_with_dummies(raw, one, two), GraphError);
}

TEST(Lct, SinkParentSubtractsResultTransfer) {
    TaskGraph g = make_app({100}, {}, 0, 100, 1, 0.0, 10.0);
    compute_lct(g, kParams);
    EXPECT_DOUBLE_EQ(g.tasks[1].lct, 9.9);
    EXPECT_DOUBLE_EQ(g.tasks[2].lct, 10.0);
}

TEST(Lct, ZeroResultTransferKeepsDeadline) {
    TaskGraph g = make_app({100}, {}, 0, 0, 1, 0.0, 10.0);
    compute_lct(g, kParams);
    EXPECT_DOUBLE_EQ(g.tasks[1].lct, 10.0);
}

TEST(Lct, ChainPropagatesBackwards) {
    TaskGraph g = make_app({100, 6000}, {{1, 2, 0}}, 0, 0, 1, 0.0, 10.0);
    compute_lct(g, kParams);
    EXPECT_DOUBLE_EQ(g.tasks[2].lct, 10.0);
    EXPECT_DOUBLE_EQ(g.tasks[1].lct, 9.0);
}

TEST(Lct, ShiftingDeadlineShiftsEveryLct) {
    TaskGraph a = fig3_graph();
    a.deadline = 20.0;
    TaskGraph b = a;
    b.deadline = 27.5;
    compute_lct(a, kParams);
    compute_lct(b, kParams);
    for (std::size_t i = 0; i < a.tasks.size(); ++i) EXPECT_NEAR(b.tasks[i].lct - a.tasks[i].lct, 7.5, 1e-12);
}

TEST(Lct, EdgeInequalityHolds) {
    WorkloadSpec spec;
    spec.n_apps = 5;
    for (TaskGraph g : generate(spec)) {
        compute_lct(g, kParams);
        for (const Edge& e : g.edges) {
            if (g.is_dummy(e.src) || g.is_dummy(e.dst)) continue;
            const double bound = g.tasks[e.dst].lct - g.tasks[e.dst].workload / kParams.max_capability -
                                 e.data_size / kParams.max_rate;
            EXPECT_LE(g.tasks[e.src].lct, bound + 1e-12);
        }
    }
}

TEST(Lct, RejectsBadParameters) {
    TaskGraph g = make_app({100}, {}, 0, 0, 1, 0.0, 10.0);
    EXPECT_THROW(compute_lct(g, LctParams{0.0, 1000, 1000}), GraphError);
}

TEST(PriorityList, SortsByLct) {
    TaskGraph g = make_app({100, 100, 100}, {}, 1, 1);
    g.tasks[1].lct = 5;
    g.tasks[2].lct = 3;
    g.tasks[3].lct = 7;
    EXPECT_EQ(build_priority_list(g).ordered_tasks, (std::vector<TaskId>{2, 1, 3}));
}

TEST(PriorityList, TiesBreakById) {
    TaskGraph g = make_app({100, 100}, {}, 1, 1);
    g.tasks[1].lct = 5;
    g.tasks[2].lct = 5;
    EXPECT_EQ(build_priority_list(g).ordered_tasks, (std::vector<TaskId>{1, 2}));
}

TEST(PriorityList, SingleTaskAndDeterminism) {
    TaskGraph g = make_app({100}, {}, 1, 1, 1, 0.0, 5.0);
    compute_lct(g, kParams);
    EXPECT_EQ(build_priority_list(g).ordered_tasks, (std::vector<TaskId>{1}));

    TaskGraph f = fig3_graph();
    f.deadline = 10;
    compute_lct(f, kParams);
    EXPECT_EQ(build_priority_list(f).ordered_tasks, build_priority_list(f).ordered_tasks);
}

TEST(PriorityList, UncomputedLctThrows) {
    const TaskGraph g = make_app({100}, {}, 1, 1);
    EXPECT_THROW(build_priority_list(g), GraphError);
}

TEST(Pipeline, DoesNotMutateWorkloadsOrData) {
    const RawGraph raw = fig3_raw();
    const std::vector<double> off{10, 20}, res{30, 40};
    TaskGraph g = augment_with_dummies(raw, off, res);
    g.deadline = 30;
    const TaskGraph before = g;
    ASSERT_TRUE(validate(g).ok());
    compute_lct(g, kParams);
    (void)build_priority_list(g);
    for (std::size_t i = 0; i < g.tasks.size(); ++i) EXPECT_EQ(g.tasks[i].workload, before.tasks[i].workload);
    for (std::size_t i = 0; i < g.edges.size(); ++i) EXPECT_EQ(g.edges[i].data_size, before.edges[i].data_size);
}

TEST(WorkloadFile, RoundTripsMontageApplication) {
    WorkloadSpec spec;
    spec.n_apps = 1;
    const auto apps = generate(spec);
    std::stringstream ss;
    write_workload(ss, apps);
    const auto back = read_workload(ss);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].real_task_count(), 25u);
    EXPECT_EQ(back[0].release_time, apps[0].release_time);
    EXPECT_EQ(back[0].deadline, apps[0].deadline);
    ASSERT_EQ(back[0].edges.size(), apps[0].edges.size());
    for (std::size_t i = 0; i < apps[0].edges.size(); ++i)
        EXPECT_EQ(back[0].edges[i].data_size, apps[0].edges[i].data_size);
}

TEST(WorkloadFile, NegativeDataIsSchemaError) {
    std::istringstream in("app 0 release 0 deadline 5 home 1\ntask 0 0\ntask 1 100\ntask 2 0\n"
                          "edge 0 1 -3\nedge 1 2 1\n");
    try {
        read_workload(in, "neg.txt");
        FAIL() << "expected a schema error";
    } catch (const GraphError& e) {
        EXPECT_NE(std::string(e.what()).find("schema"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("neg.txt:5"), std::string::npos);
    }
}

TEST(WorkloadFile, EmptyInputGivesNoGraphs) {
    std::istringstream in("");
    EXPECT_TRUE(read_workload(in).empty());
    std::istringstream comments("# nothing here\n\n");
    EXPECT_TRUE(read_workload(comments).empty());
}

TEST(WorkloadFile, InfiniteDeadlineRoundTrips) {
    const TaskGraph g = make_app({100}, {}, 1, 1);
    std::stringstream ss;
    write_workload(ss, std::span<const TaskGraph>(&g, 1));
    const auto back = read_workload(ss);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_TRUE(std::isinf(back[0].deadline));
}
