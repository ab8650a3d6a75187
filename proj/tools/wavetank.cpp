#include "wavetank/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Water-wave tank simulator and identity checks"};
    std::string config_path, kind, out;
    int jobs = 0;
    std::uint64_t seed = 0;
    app.add_option("config", config_path, "YAML run configuration")->required();
    app.add_option("--kind", kind, "simulate | pohozaev | main-identity | observability-scan | dispersion");
    app.add_option("--out", out, "output directory");
    auto* jobs_opt = app.add_option("--jobs", jobs, "parallel runs in a scan");
    auto* seed_opt = app.add_option("--seed", seed, "seed for random initial data");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        wavetank::RunConfig cfg = wavetank::load_config(config_path);
        if (!kind.empty()) cfg.kind = wavetank::parse_kind(kind);
        if (!out.empty()) cfg.output = out;
        if (jobs_opt->count()) cfg.jobs = jobs;
        if (seed_opt->count()) cfg.seed = seed;
        cfg.validate();
        return wavetank::run(cfg, std::cout);
    } catch (const wavetank::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
