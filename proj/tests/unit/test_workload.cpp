#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "sata/workload.hpp"

using namespace sata;
using sata::testing::make_app;

TEST(Clamp, WorkloadAndData) {
    const WorkloadSpec spec;
    EXPECT_EQ(clamp_workload(900, spec), 500.0);
    EXPECT_EQ(clamp_workload(50, spec), 100.0);
    EXPECT_EQ(clamp_workload(250, spec), 250.0);
    EXPECT_DOUBLE_EQ(edge_data_from_bc(1e-2, spec), 5.2);
    EXPECT_DOUBLE_EQ(edge_data_from_bc(0.0, spec), 0.52);
    EXPECT_DOUBLE_EQ(edge_data_from_bc(0.05, spec), 5.2);
}

TEST(Deadline, ChainOfTwo) {
    const WorkloadSpec spec;
    TaskGraph g = make_app({500, 500}, {{1, 2, 3}}, 1, 1, 1, 4.0);
    EXPECT_DOUBLE_EQ(basic_makespan(g, 5000), 0.2);
    assign_deadline(g, spec);
    EXPECT_DOUBLE_EQ(g.deadline, 4.0 + 1.2);
}

TEST(Deadline, SingleTask) {
    const WorkloadSpec spec;
    TaskGraph g = make_app({100}, {}, 1, 1, 1, 0.0);
    EXPECT_DOUBLE_EQ(basic_makespan(g, 5000), 0.02);
    assign_deadline(g, spec);
    EXPECT_DOUBLE_EQ(g.deadline, 0.12);
}

TEST(Deadline, ParallelBranchesTakeTheMaximum) {
    TaskGraph g = make_app({500, 100}, {}, 1, 1);
    EXPECT_DOUBLE_EQ(basic_makespan(g, 5000), 0.1);
}

TEST(Montage, TemplateShape) {
    RawGraph raw = montage25_shape();
    EXPECT_EQ(raw.workloads.size(), 25u);
    EXPECT_EQ(entry_tasks(raw).size(), 1u);
    EXPECT_EQ(exit_tasks(raw).size(), 1u);
    std::fill(raw.workloads.begin(), raw.workloads.end(), 100.0);
    const std::vector<double> one{1.0};
    const TaskGraph g = augment_with_dummies(raw, one, one);
    EXPECT_TRUE(validate(g).ok());
    EXPECT_EQ(g.tasks.size(), 27u);
}

TEST(Generate, RespectsRanges) {
    WorkloadSpec spec;
    spec.n_apps = 20;
    spec.seed = 3;
    const auto apps = generate(spec);
    ASSERT_EQ(apps.size(), 20u);
    double previous_release = 0.0;
    for (std::size_t n = 0; n < apps.size(); ++n) {
        const TaskGraph& g = apps[n];
        EXPECT_EQ(g.app_id, n);
        EXPECT_TRUE(validate(g).ok());
        EXPECT_EQ(g.real_task_count(), 25u);
        EXPECT_GE(g.home_ecd, 1u);
        EXPECT_LE(g.home_ecd, 4u);
        EXPECT_GE(g.release_time, previous_release);
        previous_release = g.release_time;
        for (const Task& t : g.tasks) {
            if (g.is_dummy(t.task_id)) continue;
            EXPECT_GE(t.workload, 100.0);
            EXPECT_LE(t.workload, 500.0);
        }
        for (const Edge& e : g.edges) {
            EXPECT_GE(e.data_size, 0.52 - 1e-12);
            EXPECT_LE(e.data_size, 5.2 + 1e-12);
        }
        EXPECT_NEAR(g.deadline, g.release_time + 6.0 * basic_makespan(g, 5000), 1e-12);
    }
}

TEST(Generate, SameSeedSameWorkload) {
    WorkloadSpec spec;
    spec.seed = 11;
    const auto a = generate(spec);
    const auto b = generate(spec);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t n = 0; n < a.size(); ++n) {
        EXPECT_EQ(a[n].release_time, b[n].release_time);
        EXPECT_EQ(a[n].home_ecd, b[n].home_ecd);
        for (std::size_t i = 0; i < a[n].tasks.size(); ++i) EXPECT_EQ(a[n].tasks[i].workload, b[n].tasks[i].workload);
    }
    spec.seed = 12;
    EXPECT_NE(generate(spec)[0].release_time, a[0].release_time);
}

namespace {

// Kolmogorov-Smirnov statistic of `gaps` against an exponential with `mean`.
double ks_exponential(std::vector<double> gaps, double mean) {
    std::sort(gaps.begin(), gaps.end());
    const double n = static_cast<double>(gaps.size());
    double d = 0.0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        const double cdf = 1.0 - std::exp(-gaps[i] / mean);
        d = std::max({d, cdf - i / n, (i + 1) / n - cdf});
    }
    return d;
}

std::vector<double> gaps_of(const WorkloadSpec& spec) {
    const auto apps = generate(spec);
    std::vector<double> gaps;
    double last = 0.0;
    for (const TaskGraph& g : apps) {
        gaps.push_back(g.release_time - last);
        last = g.release_time;
    }
    return gaps;
}

}  // namespace

TEST(Generate, InterArrivalGapsAreExponential) {
    WorkloadSpec spec;
    spec.n_apps = 2000;
    spec.lambda = 9.0;
    const auto gaps = gaps_of(spec);
    // critical value at p = 0.01
    EXPECT_LT(ks_exponential(gaps, 9.0), 1.628 / std::sqrt(2000.0));

    spec.arrival_reading = ArrivalReading::Rate;
    spec.lambda = 4.0;
    EXPECT_DOUBLE_EQ(spec.mean_gap(), 0.25);
    EXPECT_LT(ks_exponential(gaps_of(spec), 0.25), 1.628 / std::sqrt(2000.0));
}

TEST(Generate, InvalidSpecIsRejected) {
    WorkloadSpec spec;
    spec.lambda = 0;
    EXPECT_THROW(generate(spec), std::invalid_argument);
    spec = WorkloadSpec{};
    spec.workload_min = 600;
    EXPECT_THROW(generate(spec), std::invalid_argument);
}
