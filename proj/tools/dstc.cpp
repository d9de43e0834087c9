#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dstc/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Dynamic self-triggered control toolkit"};
    app.require_subcommand(1);

    std::string config;
    dstc::CommandOptions opt;
    std::string out_dir;

    const auto add = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "experiment config (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        sub->add_option("--seed", opt.seed, "seed for randomized checks");
        sub->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
        return sub;
    };
    add("synthesize", "synthesize the parameter family and write family.json");
    add("run", "simulate dynamic STC and baselines, write CSVs and summary.json");
    add("compare", "tabulate the mechanisms from a previous run");
    add("verify", "re-verify every parameter set on a finer grid and random points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : dstc::kExitConfig;
    }
    if (!out_dir.empty()) {
        opt.out = out_dir;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    return dstc::run_command(command, config, opt, std::cout, std::cerr);
}
