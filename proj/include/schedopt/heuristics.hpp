//
// Project     : schedopt
// File        : heuristics.hpp
// Description : two-phase fix-and-optimize heuristics
//

#pragma once

#include "schedopt/model.hpp"
#include "schedopt/solve.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace schedopt {

struct HeuristicConfig {
    bool setstart = false;            // true: warm-start path, needs initial
    std::optional<Schedule> initial;  // required iff setstart
    SolveLimits phase1_limits;
    SolveLimits phase2_limits;
    int flexibility = 2;              // +- slots a phase-1 start may shift in phase 2
    bool relax_lambda_levels = true;  // solve with continuous lambda
    bool restrict_to_even = true;     // cold phase 1: even slot indices (false: odd)
    std::optional<ExternalSolverConfig> external; // set: solve phases externally
};

// Bound change applied to every variable matched by the selector. var >= 0
// short-circuits the selector to a single variable index.
struct Fixation {
    std::function<bool(const VarRef&)> selector;
    double lb = 0.0;
    double ub = 0.0;
    int var = -1;
};

Fixation fix_var(int var, double value);

// Applies fixations as bound changes and solves the restricted model.
// Throws std::invalid_argument on contradictory fixations (lb > ub).
SolveResult fix_and_optimize(const MilpModel& model, const std::vector<Fixation>& fixations,
                             const SolveLimits& limits,
                             const std::optional<Schedule>& warm_start = {},
                             const std::optional<ExternalSolverConfig>& external = {});

// Warm-start path (setstart=true): phase 1 re-optimizes with battery
// integrality relaxed, phase 2 fixes the activities and restores battery
// integrality. The result never costs more than the initial solution.
SolveResult warmstart_two_phase(const Instance& instance, const ScenarioSet& scenarios,
                                const HeuristicConfig& config);

// Cold path (setstart=false): phase 1 schedules activities with batteries
// idle, penalized starts removed and starts restricted to one slot parity;
// phase 2 re-opens the batteries and lets starts shift within the
// flexibility window.
SolveResult cold_two_phase(const Instance& instance, const ScenarioSet& scenarios,
                           const HeuristicConfig& config);

} // namespace schedopt
