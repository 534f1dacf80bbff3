// Command-line driver: solve3d, limit, capacity, study, coercivity.
//
// Exit codes: 0 success, 2 configuration error, 3 solver failure,
// 4 acceptance-verdict failure (study --strict).

#include <CLI11.hpp>
#include <iostream>

#include "patchbeam/errors.hpp"
#include "patchbeam/study.hpp"

namespace {

using namespace patchbeam;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    double tol = -1.0;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "path to the key=value run configuration")
        ->required();
    cmd->add_option("--out", args.out_dir, "output directory (default: output.dir from config)");
    cmd->add_option("--tol", args.tol, "override solver.tol");
    cmd->add_option("--threads", args.threads, "override the thread count");
}

StudyConfig load_config(const CommonArgs& args) {
    StudyConfig cfg = parse_config_file(args.config_path);
    if (args.tol > 0.0) cfg.tol = args.tol;
    if (args.threads > 0) cfg.threads = args.threads;
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    cfg.validate();
    return cfg;
}

int run_solve3d(const CommonArgs& args) {
    const StudyConfig cfg = load_config(args);
    std::vector<SolveOutcome> outcomes;
    for (double eps : cfg.eps_list) {
        outcomes.push_back(solve3d(cfg, eps));
        std::cout << "solve3d eps=" << format_double(eps)
                  << " iters=" << outcomes.back().stats.iterations
                  << " residual=" << format_double(outcomes.back().stats.residual) << "\n";
    }
    write_solve3d_outputs(outcomes, cfg, cfg.out_dir);
    return 0;
}

int run_limit_cmd(const CommonArgs& args) {
    const StudyConfig cfg = load_config(args);
    const LimitOutcome limit = run_limit(cfg);
    write_limit_outputs(limit, cfg, cfg.out_dir);
    const auto t = limit.beam.trace();
    std::cout << "limit trace:";
    for (int i = 0; i < 6; ++i) std::cout << ' ' << format_double(t[i]);
    std::cout << "\n";
    return 0;
}

int run_capacity_cmd(const CommonArgs& args) {
    const StudyConfig cfg = load_config(args);
    const CapacityStudy study = run_capacity_study(cfg);
    write_capacity_outputs(study, cfg, cfg.out_dir);
    for (const auto& e : study.entries)
        std::cout << "capacity L=" << format_double(e.L)
                  << (e.farfield == Farfield::Natural ? " natural" : " clamped")
                  << " G11=" << format_double(e.set->gram()(0, 0)) << "\n";
    return 0;
}

int run_coercivity_cmd(const CommonArgs& args) {
    const StudyConfig cfg = load_config(args);
    const CapacityStudy study = run_capacity_study(cfg);
    write_coercivity_outputs(study, cfg, cfg.out_dir);
    write_capacity_outputs(study, cfg, cfg.out_dir);
    const CapacitarySet* nat = study.find(cfg.capacity_L.back(), Farfield::Natural);
    for (const Rational& p : {Rational(3, 1), Rational(1, 1), Rational(1, 3)}) {
        const RegimeSpec regime = classify(cfg.kappa, p);
        const double eig = coercivity_eigen(penalty_form(regime, *nat));
        std::cout << "coercivity " << to_string(regime.tag)
                  << " smallest eigenvalue=" << format_double(eig) << "\n";
    }
    return 0;
}

int run_study_cmd(const CommonArgs& args, bool strict) {
    const StudyConfig cfg = load_config(args);
    const ConvergenceReport report = run_study(cfg);
    write_study_outputs(report, cfg, cfg.out_dir);
    for (const auto& row : report.rows) {
        std::cout << "eps=" << format_double(row.eps);
        if (row.ok)
            std::cout << " err_disp=" << format_double(row.err_disp)
                      << " err_strain=" << format_double(row.err_strain) << "\n";
        else
            std::cout << " FAILED: " << row.error << "\n";
    }
    std::cout << "verdict: " << (report.pass() ? "pass" : "fail") << "\n";
    if (strict && !report.pass()) return 4;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thin-cylinder elasticity with a shrinking clamp patch: 3D, limit and "
                 "capacitary solvers"};
    app.require_subcommand(1);

    CommonArgs args;
    bool strict = false;
    CLI::App* solve3d_cmd = app.add_subcommand("solve3d", "full 3D solves over the eps sweep");
    CLI::App* limit_cmd = app.add_subcommand("limit", "regime limit problem on (0,1)");
    CLI::App* capacity_cmd =
        app.add_subcommand("capacity", "half-space capacitary potentials and Gram report");
    CLI::App* study_cmd =
        app.add_subcommand("study", "corrector convergence study over the eps sweep");
    CLI::App* coercivity_cmd =
        app.add_subcommand("coercivity", "penalty coercivity report for the critical sizes");
    for (CLI::App* cmd : {solve3d_cmd, limit_cmd, capacity_cmd, study_cmd, coercivity_cmd})
        add_common(cmd, args);
    study_cmd->add_flag("--strict", strict, "exit 4 when the study verdict fails");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve3d_cmd->parsed()) return run_solve3d(args);
        if (limit_cmd->parsed()) return run_limit_cmd(args);
        if (capacity_cmd->parsed()) return run_capacity_cmd(args);
        if (coercivity_cmd->parsed()) return run_coercivity_cmd(args);
        if (study_cmd->parsed()) return run_study_cmd(args, strict);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const SolveError& e) {
        std::cerr << "solver failure: " << e.what() << " (residual " << e.residual << " after "
                  << e.iterations << " iterations)\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
