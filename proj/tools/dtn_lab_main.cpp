// Command-line runner for the half-plane Stokes DtN verification suites.
//
// Usage: dtn_lab <experiment> [--config <path>] [--plots] [--out <dir>]
//                [--seed <u64>] [--n <pow2>] [--paper-literal-symbol]
//
// Exit codes: 0 all checks pass, 1 a recorded check failed, 2 configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dtnlab/reports.hpp"

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for the half-plane Stokes Dirichlet-to-Neumann map"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    bool plots = false, paper_literal = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int n_override = 0;

    std::vector<CLI::App*> subs;
    for (const auto& name : dtnlab::kExperimentNames) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " suite");
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_flag("--plots", plots, "emit SVG line plots next to the CSV tables");
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
            seed_set = true;
        });
        sub->add_option("--n", n_override, "boundary grid size override (power of two)");
        sub->add_flag("--paper-literal-symbol", paper_literal,
                      "include the literal printed symbol in the discrepancy records");
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);
    const std::string experiment = app.get_subcommands().front()->get_name();

    std::string text = "{}";
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot read config file " << config_path << "\n";
            return 2;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }

    dtnlab::ValidationResult vr = dtnlab::validate_config(text);
    if (!vr.ok()) {
        for (const auto& e : vr.errors) std::cerr << "config error: " << e << "\n";
        return 2;
    }
    dtnlab::ExperimentConfig cfg = *vr.config;
    if (!cfg.experiment.empty() && cfg.experiment != experiment) {
        std::cerr << "config error: config names experiment '" << cfg.experiment
                  << "' but the subcommand is '" << experiment << "'\n";
        return 2;
    }
    cfg.experiment = experiment;
    if (seed_set) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (plots) cfg.plots = true;
    if (paper_literal) cfg.paper_literal = true;
    if (n_override > 0) {
        cfg.n = n_override;
        if ((cfg.n & (cfg.n - 1)) != 0 || cfg.n < 8) {
            std::cerr << "config error: n must be a power of two >= 8\n";
            return 2;
        }
        if (cfg.band_limit > cfg.n / 4) cfg.band_limit = cfg.n / 4;
    }

    try {
        dtnlab::RunReport rep = dtnlab::run_experiment(cfg);
        auto files = dtnlab::write_report(rep);
        for (const auto& r : rep.records)
            std::printf("[%s] %-45s value=%.6g %s tol=%.6g\n", r.pass ? "PASS" : "FAIL",
                        r.name.c_str(), r.value, r.cmp == "le" ? "<=" : ">=", r.tolerance);
        std::printf("%s: %zu checks, %s, %.2fs; wrote %zu files under %s\n", experiment.c_str(),
                    rep.records.size(), rep.all_pass() ? "all passed" : "FAILURES present",
                    rep.wall_seconds, files.size(), cfg.out_dir.c_str());
        return rep.all_pass() ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
