//
// Project     : schedopt
// File        : main.cpp
// Description : command-line interface: validate, solve, evaluate,
//               allocate, export, curve
//

#include "schedopt/evaluator.hpp"
#include "schedopt/heuristics.hpp"
#include "schedopt/instance.hpp"
#include "schedopt/model.hpp"
#include "schedopt/rooms.hpp"
#include "schedopt/scenarios.hpp"
#include "schedopt/solution_io.hpp"
#include "schedopt/solve.hpp"
#include "schedopt/text.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using namespace schedopt;

std::string read_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file)
        throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary);
    if (!file)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    file << content;
    if (!file.flush())
        throw std::runtime_error("write failed for '" + path + "'");
}

void print_violations(const std::vector<Violation>& violations) {
    for (const Violation& v : violations)
        std::cerr << v.family << (v.entity.empty() ? "" : " " + v.entity)
                  << (v.slot > 0 ? " slot " + std::to_string(v.slot) : "") << ": " << v.message
                  << "\n";
}

std::string show(double value) {
    return std::isnan(value) ? std::string("n/a") : format_double(value);
}

struct SolveArgs {
    std::string instance_path;
    std::vector<std::string> scenario_paths;
    std::string algo = "bnb";
    bool algo_given = false;
    bool setstart = false;
    std::string initial_path;
    std::string solver_cmd;
    std::string out_path = "solution.sol";
    double time_limit = 1e18;
    long long node_limit = 1'000'000;
    double budget = 1e7;
    bool relax_lambda_levels = true;
    int flexibility = 2;
    bool odd_starts = false;
    int threads = 0;
};

int run_solve(SolveArgs args) {
    // --setstart selects the warm path; it contradicts any other explicit algo
    if (args.setstart) {
        if (args.algo_given && args.algo != "warm") {
            std::cerr << "--setstart contradicts --algo " << args.algo << "\n";
            return 2;
        }
        args.algo = "warm";
    }
    const Instance instance = parse_instance(read_file(args.instance_path));
    const ScenarioSet scenarios = load_scenarios(args.scenario_paths, instance.horizon.T);
    const Instance pre = preprocess_penalized_starts(instance);

    SolveLimits limits;
    limits.time_limit_sec = args.time_limit;
    limits.node_limit = args.node_limit;
    limits.enumeration_budget = args.budget;

    std::optional<Schedule> initial;
    if (!args.initial_path.empty())
        initial = parse_solution(read_file(args.initial_path), instance).schedule;

    SolveResult result;
    if (args.algo == "exact") {
        result = solve_exact_small(pre, scenarios, limits);
    } else if (args.algo == "bnb") {
        MilpModel model = build_saa(pre, scenarios, compute_big_m(pre, scenarios));
        if (args.relax_lambda_levels)
            model = relax_lambda(std::move(model));
        result = branch_and_bound(model, limits, initial);
    } else if (args.algo == "external") {
        if (args.solver_cmd.empty()) {
            std::cerr << "--algo external requires --solver-cmd\n";
            return 2;
        }
        MilpModel model = build_saa(pre, scenarios, compute_big_m(pre, scenarios));
        if (args.relax_lambda_levels)
            model = relax_lambda(std::move(model));
        result = solve_external(model, ExternalSolverConfig{args.solver_cmd, ""});
    } else if (args.algo == "warm" || args.algo == "cold") {
        HeuristicConfig config;
        config.setstart = args.algo == "warm";
        config.initial = initial;
        config.phase1_limits = limits;
        config.phase2_limits = limits;
        config.flexibility = args.flexibility;
        config.relax_lambda_levels = args.relax_lambda_levels;
        config.restrict_to_even = !args.odd_starts;
        if (!args.solver_cmd.empty())
            config.external = ExternalSolverConfig{args.solver_cmd, ""};
        if (config.setstart && !config.initial) {
            std::cerr << "--algo warm requires --initial\n";
            return 2;
        }
        result = config.setstart ? warmstart_two_phase(instance, scenarios, config)
                                 : cold_two_phase(instance, scenarios, config);
    } else {
        std::cerr << "unknown algorithm '" << args.algo << "'\n";
        return 2;
    }

    std::cout << "status " << to_string(result.status) << "\n";
    if (!result.message.empty())
        std::cout << "note " << result.message << "\n";
    if (!result.schedule) {
        std::cerr << "no schedule produced\n";
        return 1;
    }

    const auto violations = check_feasibility(pre, *result.schedule);
    if (!violations.empty()) {
        print_violations(violations);
        return 1;
    }

    // always report the evaluator's true cost next to the solver's view
    const CostReport report = evaluate_cost(pre, *result.schedule, scenarios);
    std::cout << "solver_objective " << show(result.objective) << "\n";
    std::cout << "bound " << show(result.bound) << "\n";
    std::cout << "gap " << show(result.gap) << "\n";
    std::cout << "true_average_cost " << format_double(report.average.total) << "\n";
    std::cout << report.to_csv();

    write_file(args.out_path, serialize_solution(instance, *result.schedule));
    std::cout << "solution written to " << args.out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"schedopt: battery and activity scheduling under load uncertainty"};
    app.require_subcommand(1);

    // validate
    auto* validate = app.add_subcommand("validate", "check an instance file");
    std::string validate_path;
    validate->add_option("instance", validate_path, "instance file")->required();

    // solve
    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "solve an instance against scenarios");
    solve->add_option("instance", solve_args.instance_path, "instance file")->required();
    solve->add_option("-s,--scenario", solve_args.scenario_paths, "scenario CSV file(s)")
        ->required();
    auto* algo_opt = solve->add_option("--algo", solve_args.algo, "exact|bnb|warm|cold|external");
    solve->add_flag("--setstart", solve_args.setstart,
                    "take the warm-start path (same as --algo warm)");
    solve->add_option("--initial", solve_args.initial_path, "initial solution file");
    solve->add_option("--solver-cmd", solve_args.solver_cmd,
                      "external solver template with {mps} and {sol}");
    solve->add_option("--out", solve_args.out_path, "solution output path");
    solve->add_option("--time-limit", solve_args.time_limit, "seconds per solve");
    solve->add_option("--node-limit", solve_args.node_limit, "branch-and-bound node limit");
    solve->add_option("--budget", solve_args.budget, "exact enumeration budget");
    solve->add_option("--relax-lambda", solve_args.relax_lambda_levels,
                      "solve with continuous peak levels (default on)");
    solve->add_option("--flex", solve_args.flexibility,
                      "start-shift window for the cold heuristic's second phase");
    solve->add_flag("--odd-starts", solve_args.odd_starts,
                    "restrict cold phase 1 to odd instead of even slots");
    solve->add_option("--threads", solve_args.threads,
                      "worker threads (solve paths are deterministic and run on one)");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "cost and feasibility of a solution");
    std::string eval_instance, eval_solution;
    std::vector<std::string> eval_scenarios;
    evaluate->add_option("instance", eval_instance, "instance file")->required();
    evaluate->add_option("-s,--scenario", eval_scenarios, "scenario CSV file(s)")->required();
    evaluate->add_option("--solution", eval_solution, "solution file")->required();

    // allocate
    auto* allocate = app.add_subcommand("allocate", "assign concrete rooms to a solution");
    std::string alloc_instance, alloc_solution, alloc_out;
    allocate->add_option("instance", alloc_instance, "instance file")->required();
    allocate->add_option("--solution", alloc_solution, "solution file")->required();
    allocate->add_option("--out", alloc_out, "output path (default: stdout)");

    // export
    auto* export_cmd = app.add_subcommand("export", "write the SAA model as MPS");
    std::string export_instance, export_out;
    std::vector<std::string> export_scenarios;
    bool export_relax = true;
    export_cmd->add_option("instance", export_instance, "instance file")->required();
    export_cmd->add_option("-s,--scenario", export_scenarios, "scenario CSV file(s)")->required();
    export_cmd->add_option("--out", export_out, "MPS output path")->required();
    export_cmd->add_option("--relax-lambda", export_relax,
                           "export continuous peak levels (default on)");

    // curve
    auto* curve = app.add_subcommand("curve", "forecast accuracy vs scheduling cost");
    std::string curve_instance, curve_base, curve_out;
    std::vector<double> curve_sigmas;
    CurveConfig curve_config;
    bool curve_exact = false;
    bool curve_additive = false;
    double curve_time_limit = 1e18;
    long long curve_node_limit = 1'000'000;
    unsigned long long curve_seed = 1;
    curve->add_option("instance", curve_instance, "instance file")->required();
    curve->add_option("--base", curve_base, "true base-load CSV (single scenario)")->required();
    curve->add_option("--sigmas", curve_sigmas, "noise levels")->required();
    curve->add_option("--members", curve_config.members, "scenarios per family");
    curve->add_option("--seed", curve_seed, "noise seed");
    curve->add_flag("--exact", curve_exact, "use the exact oracle instead of branch and bound");
    curve->add_flag("--additive", curve_additive, "additive instead of multiplicative noise");
    curve->add_option("--time-limit", curve_time_limit, "seconds per solve");
    curve->add_option("--node-limit", curve_node_limit, "branch-and-bound node limit");
    curve->add_option("--threads", curve_config.threads, "parallel sigma evaluations");
    curve->add_option("--out", curve_out, "curve CSV output (default: stdout)");
    curve_config.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (validate->parsed()) {
            Instance instance;
            try {
                instance = parse_instance_syntactic(read_file(validate_path));
            } catch (const std::exception& e) {
                std::cerr << e.what() << "\n";
                return 1;
            }
            const auto diagnostics = validate_instance(instance);
            for (const Diagnostic& d : diagnostics)
                std::cerr << (d.severity == Severity::Error ? "error" : "warning")
                          << (d.entity.empty() ? "" : " " + d.entity) << ": " << d.message << "\n";
            return has_errors(diagnostics) ? 1 : 0;
        }
        if (solve->parsed()) {
            solve_args.algo_given = algo_opt->count() > 0;
            return run_solve(solve_args);
        }
        if (evaluate->parsed()) {
            const Instance instance = parse_instance(read_file(eval_instance));
            const ScenarioSet scenarios = load_scenarios(eval_scenarios, instance.horizon.T);
            const ParsedSolution solution = parse_solution(read_file(eval_solution), instance);
            const CostReport report = evaluate_cost(instance, solution.schedule, scenarios);
            std::cout << report.to_csv();
            const auto violations = check_feasibility(instance, solution.schedule);
            print_violations(violations);
            return violations.empty() ? 0 : 1;
        }
        if (allocate->parsed()) {
            const Instance instance = parse_instance(read_file(alloc_instance));
            const ParsedSolution solution = parse_solution(read_file(alloc_solution), instance);
            const auto violations = check_feasibility(instance, solution.schedule);
            if (!violations.empty()) {
                print_violations(violations);
                return 1;
            }
            const RoomAssignment rooms = allocate_rooms(instance, solution.schedule);
            const std::string text = serialize_solution(instance, solution.schedule, &rooms);
            if (alloc_out.empty())
                std::cout << text;
            else
                write_file(alloc_out, text);
            return 0;
        }
        if (export_cmd->parsed()) {
            const Instance instance = parse_instance(read_file(export_instance));
            const ScenarioSet scenarios = load_scenarios(export_scenarios, instance.horizon.T);
            const Instance pre = preprocess_penalized_starts(instance);
            MilpModel model = build_saa(pre, scenarios, compute_big_m(pre, scenarios));
            if (export_relax)
                model = relax_lambda(std::move(model));
            export_mps(model, export_out);
            std::cout << "model written to " << export_out << " (" << model.vars.size()
                      << " variables, " << model.cons.size() << " rows)\n";
            return 0;
        }
        if (curve->parsed()) {
            const Instance instance = parse_instance(read_file(curve_instance));
            const ScenarioSet base = load_scenarios({curve_base}, instance.horizon.T);
            if (base.count() != 1)
                throw std::runtime_error("--base must contain exactly one scenario column");
            curve_config.seed = curve_seed;
            curve_config.use_exact_oracle = curve_exact;
            curve_config.noise =
                curve_additive ? NoiseKind::Additive : NoiseKind::Multiplicative;
            curve_config.limits.time_limit_sec = curve_time_limit;
            curve_config.limits.node_limit = curve_node_limit;
            const auto points =
                accuracy_cost_curve(instance, base.series.front(), curve_sigmas, curve_config);
            const std::string csv = curve_to_csv(points);
            if (curve_out.empty())
                std::cout << csv;
            else
                write_file(curve_out, csv);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 2;
}
