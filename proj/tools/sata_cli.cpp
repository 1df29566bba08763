#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "sata/experiment.hpp"

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string output;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("-c,--config", flags.config, "key = value configuration file");
    cmd->add_option("-s,--seed", flags.seed, "override the master seed");
    cmd->add_option("-o,--output", flags.output, "output directory");
}

sata::ExperimentConfig resolve(const CommonFlags& flags) {
    sata::ExperimentConfig cfg = flags.config.empty() ? sata::ExperimentConfig{} : sata::ExperimentConfig::load(flags.config);
    if (flags.seed) cfg.seed = *flags.seed;
    if (!flags.output.empty()) cfg.output_dir = flags.output;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Event-driven DAG offloading simulator with a deep Q-learning scheduler"};
    app.require_subcommand(1);

    CommonFlags gen_flags, train_flags, eval_flags, compare_flags;
    std::string workload_file = "workload.txt";
    std::string checkpoint;

    auto* gen = app.add_subcommand("gen-workload", "generate an application workload file");
    add_common(gen, gen_flags);
    gen->add_option("-f,--file", workload_file, "workload file name inside the output directory");

    auto* train = app.add_subcommand("train", "train the learning scheduler, write checkpoint and learning curve");
    add_common(train, train_flags);

    auto* eval = app.add_subcommand("evaluate", "greedy evaluation of a checkpoint (random policy without one)");
    add_common(eval, eval_flags);
    eval->add_option("-k,--checkpoint", checkpoint, "checkpoint written by train");

    auto* compare = app.add_subcommand("compare", "run every configured scheduler on shared workloads");
    add_common(compare, compare_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const auto cfg = resolve(gen_flags);
            const auto path = cfg.output_dir / workload_file;
            const auto apps = sata::cmd_gen_workload(cfg, path);
            std::printf("wrote %zu applications to %s\n", apps.size(), path.string().c_str());
        } else if (train->parsed()) {
            const auto cfg = resolve(train_flags);
            const auto trained = sata::cmd_train(cfg);
            const auto& r = trained.curve.episode_rewards;
            std::printf("trained %zu episodes, last cumulative reward %.4f\n", r.size(), r.empty() ? 0.0 : r.back());
            std::printf("outputs in %s\n", cfg.output_dir.string().c_str());
        } else if (eval->parsed()) {
            const auto cfg = resolve(eval_flags);
            std::optional<std::filesystem::path> ckpt;
            if (!checkpoint.empty()) ckpt = checkpoint;
            const auto report = sata::cmd_evaluate(cfg, ckpt);
            std::printf("%s  lambda=%g  avg_makespan=%.6f s  violation_rate=%.2f%%  (%zu replications)\n",
                        report.scheduler.c_str(), report.lambda, report.avg_makespan, report.violation_rate,
                        report.replication_makespans.size());
        } else if (compare->parsed()) {
            const auto cfg = resolve(compare_flags);
            const auto tables = sata::cmd_compare(cfg);
            for (const auto& [lambda, rows] : tables) {
                std::printf("lambda = %g\n", lambda);
                for (const auto& r : rows)
                    std::printf("  %-12s avg_makespan=%10.6f s  violation_rate=%6.2f%%\n", r.scheduler.c_str(),
                                r.avg_makespan, r.violation_rate);
            }
            std::printf("outputs in %s\n", cfg.output_dir.string().c_str());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
