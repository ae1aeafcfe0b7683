// Command-line front end: run an optimization, branch a damaged continuation
// off a stored snapshot, and export analysis tables.
//
//   finopt run --config cfg.json [--out runs]
//   finopt branch --run runs/thrust --at-gen 70 --damage-fraction 0.442
//                 --branches 5 --seeds 11,12,13,14,15 [--out runs]
//   finopt analyze --runs runs/a runs/b ... --out report/
//   finopt export --run runs/a --what paths|optimum|fourier|sensitivity|classification
//                 --format csv --out report/
//
// Exit codes: 0 success, 2 config error, 3 runtime error.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "finopt/harness.hpp"

namespace {

int do_run(const std::string& config_path, const std::string& out_root) {
    const auto config = finopt::harness::RunConfig::from_json(
        finopt::harness::read_json_file(config_path));
    const auto log = finopt::harness::run(config, out_root);
    const auto& best = finopt::harness::optimum_of(log);
    std::cout << "run " << log.run_id << " finished: " << log.termination
              << " after generation " << log.generations.back().generation
              << ", optimum fitness " << best.fitness << ", force " << best.force
              << " N\n";
    return 0;
}

int do_branch(const std::string& run_dir, int at_gen, double fraction,
              int n_branches, std::vector<std::uint64_t> seeds,
              const std::string& out_root) {
    if (seeds.empty())
        for (int i = 0; i < n_branches; ++i)
            seeds.push_back(static_cast<std::uint64_t>(1000 + i));
    if (static_cast<int>(seeds.size()) != n_branches)
        throw finopt::ConfigError("--seeds count must match --branches");
    const auto parent_config = finopt::harness::RunConfig::from_json(
        finopt::harness::read_json_file(
            finopt::harness::RunPaths{run_dir}.config()));
    const auto damage = fraction > 0.0
                            ? finopt::plant::apply_damage(parent_config.fin, fraction)
                            : finopt::plant::DamageState{};
    const auto logs =
        finopt::harness::branch(run_dir, at_gen, damage, seeds, out_root);
    for (const auto& log : logs)
        std::cout << "branch " << log.run_id << ": " << log.termination
                  << " after generation " << log.generations.back().generation
                  << "\n";
    return 0;
}

int do_analyze(const std::vector<std::string>& run_dirs, const std::string& out) {
    std::vector<std::filesystem::path> dirs(run_dirs.begin(), run_dirs.end());
    finopt::harness::report(dirs, out);
    std::cout << "report written to " << out << "\n";
    return 0;
}

int do_export(const std::string& run_dir, const std::string& what,
              const std::string& out) {
    // the bundle writer already emits one CSV per table; export writes the
    // bundle for a single run and points at the requested file
    namespace fs = std::filesystem;
    const fs::path tmp = fs::path(out);
    finopt::harness::report({run_dir}, tmp);
    const fs::path file = tmp / (what + ".csv");
    if (!fs::exists(file))
        throw finopt::ConfigError("unknown export table: " + what);
    std::cout << file.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flapping-fin trajectory optimization harness"};
    app.require_subcommand(1);

    std::string config_path, out_root = "runs";
    auto* run_cmd = app.add_subcommand("run", "execute an optimization run");
    run_cmd->add_option("--config", config_path, "run config JSON")->required();
    run_cmd->add_option("--out", out_root, "output root directory");

    std::string branch_run;
    int at_gen = 0, n_branches = 5;
    double damage_fraction = 0.442;
    std::vector<std::uint64_t> seeds;
    auto* branch_cmd =
        app.add_subcommand("branch", "resume damaged branches from a snapshot");
    branch_cmd->add_option("--run", branch_run, "parent run directory")->required();
    branch_cmd->add_option("--at-gen", at_gen, "generation to branch from")->required();
    branch_cmd->add_option("--damage-fraction", damage_fraction, "area loss fraction");
    branch_cmd->add_option("--branches", n_branches, "number of branches");
    branch_cmd->add_option("--seeds", seeds, "evaluation seeds, one per branch")
        ->delimiter(',');
    std::string branch_out = "runs";
    branch_cmd->add_option("--out", branch_out, "output root directory");

    std::vector<std::string> analyze_runs;
    std::string analyze_out = "report";
    auto* analyze_cmd = app.add_subcommand("analyze", "write the report bundle");
    analyze_cmd->add_option("--runs", analyze_runs, "run directories")->required();
    analyze_cmd->add_option("--out", analyze_out, "report output directory");

    std::string export_run, export_what = "optimum", export_format = "csv",
                export_out = "report";
    auto* export_cmd = app.add_subcommand("export", "export one table for a run");
    export_cmd->add_option("--run", export_run, "run directory")->required();
    export_cmd
        ->add_option("--what", export_what,
                     "paths|optimum|fourier|sensitivity|classification")
        ->required();
    export_cmd->add_option("--format", export_format, "csv");
    export_cmd->add_option("--out", export_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return do_run(config_path, out_root);
        if (*branch_cmd)
            return do_branch(branch_run, at_gen, damage_fraction, n_branches,
                             seeds, branch_out);
        if (*analyze_cmd) return do_analyze(analyze_runs, analyze_out);
        if (*export_cmd) {
            if (export_format != "csv")
                throw finopt::ConfigError("only csv export is supported");
            return do_export(export_run, export_what, export_out);
        }
    } catch (const finopt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const finopt::OutOfBounds& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
