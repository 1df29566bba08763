#pragma once

#include <cstdint>
#include <vector>

#include "sata/rng.hpp"
#include "sata/task_graph.hpp"

namespace sata {

enum class ArrivalReading {
    MeanGap,  // lambda is the mean inter-arrival gap in seconds
    Rate,     // lambda is arrivals per second
};

struct WorkloadSpec {
    std::size_t n_apps = 10;
    double lambda = 9.0;
    ArrivalReading arrival_reading = ArrivalReading::MeanGap;
    double workload_min = 100.0;  // MI
    double workload_max = 500.0;
    double bc_min = 1e-3;  // seconds
    double bc_max = 1e-2;
    double mean_rate = 520.0;  // Mbps
    double deadline_factor = 6.0;
    double deadline_capability = 5000.0;  // MIPS
    std::size_t ecd_count = 4;
    std::uint64_t seed = 1;

    double mean_gap() const;
    void validate() const;
};

/// Structure of the 25-node template: layer widths 1, 8, 8, 7, 1.
RawGraph montage25_shape();

double clamp_workload(double candidate, const WorkloadSpec& spec);
/// Edge data in megabits for a base communication time candidate.
double edge_data_from_bc(double bc_candidate, const WorkloadSpec& spec);

/// Critical-path makespan with unlimited devices of `capability`, transfers ignored.
double basic_makespan(const TaskGraph& graph, double capability);
void assign_deadline(TaskGraph& graph, const WorkloadSpec& spec);

/// Draws `spec.n_apps` applications with exponential inter-arrival gaps.
std::vector<TaskGraph> generate(const WorkloadSpec& spec);

}  // namespace sata
