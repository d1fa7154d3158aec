//
// Project     : schedopt
// File        : solve.hpp
// Description : exact oracle, internal branch and bound, external-solver bridge
//

#pragma once

#include "schedopt/instance.hpp"
#include "schedopt/model.hpp"
#include "schedopt/schedule.hpp"

#include <optional>
#include <string>
#include <vector>

namespace schedopt {

enum class SolveStatus { Optimal, Feasible, Infeasible, Unknown };

std::string to_string(SolveStatus status);

struct SolveLimits {
    double time_limit_sec = 1e18;
    long long node_limit = 1'000'000;
    double enumeration_budget = 1e7; // cap on combos * 3^(batteries*T)
};

struct SolveResult {
    std::optional<Schedule> schedule;
    double objective = 0.0; // true quadratic cost of the schedule
    double bound = 0.0;     // best proven lower bound
    double gap = 0.0;       // (objective - bound) / max(1, |objective|)
    SolveStatus status = SolveStatus::Unknown;
    long long nodes = 0;
    std::string message;
};

// Exhaustive enumeration of activity starts and battery action sequences,
// pruned by battery state bounds and an admissible cost bound; evaluates
// candidates with the evaluator's true quadratic objective. Independent of
// the MILP machinery. Throws std::invalid_argument when the search space
// exceeds limits.enumeration_budget.
SolveResult solve_exact_small(const Instance& instance, const ScenarioSet& scenarios,
                              const SolveLimits& limits = {});

// Best-first branch and bound over the model's binary structure, bounded by
// interval propagation plus the continuous-lambda chord; incumbents carry
// the true ceil(eta)^2 cost so results are comparable with the evaluator.
SolveResult branch_and_bound(const MilpModel& model, const SolveLimits& limits = {},
                             const std::optional<Schedule>& warm_start = {});

// Derived full variable assignment for a (partially) pinned model point.
struct DerivedPoint {
    bool feasible = false;
    std::vector<double> values;        // one per model variable
    double objective = 0.0;            // true cost (binary-lambda semantics)
    double relaxed_objective = 0.0;    // chord cost (continuous-lambda semantics)
    std::vector<std::string> violated; // names of violated rows
};

// Pins z/x/y from the schedule, derives every dependent variable through
// the model's equalities and reports row violations.
DerivedPoint derive_point(const MilpModel& model, const Schedule& schedule);

// Same derivation from explicit (variable, value) pins, e.g. imported
// solver output.
DerivedPoint derive_point(const MilpModel& model,
                          const std::vector<std::pair<int, double>>& pins);

Schedule schedule_from_point(const MilpModel& model, const std::vector<double>& values);

// Deterministic fixed-field MPS export; byte-identical for identical models.
std::string export_mps(const MilpModel& model);
void export_mps(const MilpModel& model, const std::string& path);

// Reads `<name> <value>` lines produced by common solvers, snaps binaries,
// rebuilds the schedule and cross-checks it against the model rows.
SolveResult import_solution(const std::string& path, const MilpModel& model);

// Runs `command_template` with {mps} and {sol} placeholders substituted.
struct ExternalSolverConfig {
    std::string command_template;
    std::string work_dir; // empty: system temp directory
};

SolveResult solve_external(const MilpModel& model, const ExternalSolverConfig& config);

} // namespace schedopt
