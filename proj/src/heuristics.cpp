//
// Project     : schedopt
// File        : heuristics.cpp
// Description : warm-start and cold two-phase fix-and-optimize
//

#include "schedopt/heuristics.hpp"
#include "schedopt/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace schedopt {

Fixation fix_var(int var, double value) {
    return Fixation{nullptr, value, value, var};
}

SolveResult fix_and_optimize(const MilpModel& model, const std::vector<Fixation>& fixations,
                             const SolveLimits& limits, const std::optional<Schedule>& warm_start,
                             const std::optional<ExternalSolverConfig>& external) {
    MilpModel restricted = model;
    for (const Fixation& fix : fixations) {
        if (fix.var >= 0) {
            VarRef& v = restricted.vars[static_cast<std::size_t>(fix.var)];
            v.lb = std::max(v.lb, fix.lb);
            v.ub = std::min(v.ub, fix.ub);
        } else {
            for (VarRef& v : restricted.vars)
                if (fix.selector(v)) {
                    v.lb = std::max(v.lb, fix.lb);
                    v.ub = std::min(v.ub, fix.ub);
                }
        }
    }
    for (const VarRef& v : restricted.vars)
        if (v.lb > v.ub + 1e-9)
            throw std::invalid_argument("contradictory fixations on variable '" + v.name + "'");
    if (external && !external->command_template.empty())
        return solve_external(restricted, *external);
    return branch_and_bound(restricted, limits, warm_start);
}

namespace {

double average_cost(const Instance& instance, const Schedule& schedule,
                    const ScenarioSet& scenarios) {
    return evaluate_cost(instance, schedule, scenarios).average.total;
}

// Pin z and w to a concrete activity assignment; battery variables are
// untouched by these fixations.
std::vector<Fixation> activity_fixations(const MilpModel& model, const Schedule& schedule) {
    std::vector<Fixation> fixes;
    const ModelIndex& ix = model.index;
    for (std::size_t a = 0; a < ix.z.size(); ++a) {
        const ActivityDecision& dec = schedule.activities[a];
        for (const auto& [slot, var] : ix.z[a])
            fixes.push_back(fix_var(var, dec.scheduled && dec.start == slot ? 1.0 : 0.0));
        fixes.push_back(fix_var(ix.w[a], dec.scheduled ? 1.0 : 0.0));
        // v, u and d follow from z through c2/c5/c6 during presolve
    }
    return fixes;
}

Schedule with_idle_batteries(const Schedule& schedule) {
    Schedule out = schedule;
    for (auto& row : out.battery_actions)
        std::fill(row.begin(), row.end(), kIdle);
    return out;
}

SolveResult finish(const Instance& instance, const ScenarioSet& scenarios, Schedule schedule,
                   std::string message) {
    SolveResult result;
    result.objective = average_cost(instance, schedule, scenarios);
    result.schedule = std::move(schedule);
    result.status = SolveStatus::Feasible;
    result.bound = std::numeric_limits<double>::quiet_NaN();
    result.gap = std::numeric_limits<double>::quiet_NaN();
    result.message = std::move(message);
    return result;
}

} // namespace

SolveResult warmstart_two_phase(const Instance& instance, const ScenarioSet& scenarios,
                                const HeuristicConfig& config) {
    if (!config.setstart || !config.initial)
        throw std::invalid_argument("warm-start path requires setstart=true and an initial solution");

    const Instance pre = preprocess_penalized_starts(instance);
    const auto violations = check_feasibility(pre, *config.initial);
    if (!violations.empty())
        throw std::runtime_error("initial solution infeasible: " + violations.front().family +
                                 " " + violations.front().message);
    const double initial_cost = average_cost(pre, *config.initial, scenarios);

    MilpModel model = build_saa(pre, scenarios, compute_big_m(pre, scenarios));
    if (config.relax_lambda_levels)
        model = relax_lambda(std::move(model));

    // phase 1: battery integrality relaxed, activities integral
    Schedule phase1_activities = *config.initial;
    std::string message = "phase1=initial";
    try {
        const MilpModel relaxed = relax_battery_integrality(model);
        const SolveResult phase1 = fix_and_optimize(relaxed, {}, config.phase1_limits,
                                                    config.initial, config.external);
        if (phase1.schedule && (phase1.status == SolveStatus::Optimal ||
                                phase1.status == SolveStatus::Feasible)) {
            phase1_activities = *phase1.schedule;
            message = "phase1=" + to_string(phase1.status);
        }
    } catch (const std::exception&) {
        // fall through with the initial activity assignment
    }

    // phase 2: activities fixed, battery integrality restored
    bool same_activities = true;
    for (std::size_t a = 0; a < phase1_activities.activities.size(); ++a) {
        const auto& lhs = phase1_activities.activities[a];
        const auto& rhs = config.initial->activities[a];
        if (lhs.scheduled != rhs.scheduled || (lhs.scheduled && lhs.start != rhs.start)) {
            same_activities = false;
            break;
        }
    }
    const Schedule phase2_warm =
        same_activities ? *config.initial : with_idle_batteries(phase1_activities);

    std::optional<Schedule> final_schedule;
    try {
        const SolveResult phase2 =
            fix_and_optimize(model, activity_fixations(model, phase1_activities),
                             config.phase2_limits, phase2_warm, config.external);
        if (phase2.schedule)
            final_schedule = phase2.schedule;
        message += " phase2=" + to_string(phase2.status);
    } catch (const std::exception&) {
        message += " phase2=failed";
    }

    if (final_schedule && average_cost(pre, *final_schedule, scenarios) <= initial_cost)
        return finish(pre, scenarios, *final_schedule, message);
    return finish(pre, scenarios, *config.initial, message + " (kept initial)");
}

SolveResult cold_two_phase(const Instance& instance, const ScenarioSet& scenarios,
                           const HeuristicConfig& config) {
    if (config.setstart || config.initial)
        throw std::invalid_argument("cold path requires setstart=false and no initial solution");

    const Instance pre = preprocess_penalized_starts(instance);
    MilpModel model = build_saa(pre, scenarios, compute_big_m(pre, scenarios));
    if (config.relax_lambda_levels)
        model = relax_lambda(std::move(model));

    // phase 1: batteries idle, penalized starts removed, one start parity
    std::vector<Fixation> base_fixes;
    base_fixes.push_back({[](const VarRef& v) {
                              return v.family == VarFamily::X || v.family == VarFamily::Y;
                          },
                          0.0, 0.0, -1});
    for (std::size_t a = 0; a < pre.activities.size(); ++a) {
        const Activity& act = pre.activities[a];
        for (const auto& [slot, var] : model.index.z[a])
            if (act.start_penalized(slot))
                base_fixes.push_back(fix_var(var, 0.0));
    }
    std::vector<Fixation> parity_fixes = base_fixes;
    const int blocked_parity = config.restrict_to_even ? 1 : 0;
    for (std::size_t a = 0; a < pre.activities.size(); ++a)
        for (const auto& [slot, var] : model.index.z[a])
            if (slot % 2 == blocked_parity)
                parity_fixes.push_back(fix_var(var, 0.0));

    std::string message;
    SolveResult phase1 = fix_and_optimize(model, parity_fixes, config.phase1_limits, {},
                                          config.external);
    if (!phase1.schedule) {
        // e.g. a recurring activity with only odd allowed starts
        message = "warning: parity restriction infeasible, retried without it; ";
        phase1 = fix_and_optimize(model, base_fixes, config.phase1_limits, {}, config.external);
        if (!phase1.schedule) {
            SolveResult result;
            result.status = SolveStatus::Infeasible;
            result.message = message + "phase 1 infeasible";
            return result;
        }
    }
    const Schedule phase1_schedule = *phase1.schedule;

    // phase 2: scheduled starts may shift within the flexibility window,
    // unscheduled once-offs stay unscheduled, batteries unfixed
    std::vector<Fixation> window_fixes;
    for (std::size_t a = 0; a < pre.activities.size(); ++a) {
        const ActivityDecision& dec = phase1_schedule.activities[a];
        window_fixes.push_back(fix_var(model.index.w[a], dec.scheduled ? 1.0 : 0.0));
        for (const auto& [slot, var] : model.index.z[a]) {
            const bool in_window = dec.scheduled &&
                                   std::abs(slot - dec.start) <= config.flexibility;
            if (!in_window)
                window_fixes.push_back(fix_var(var, 0.0));
        }
    }

    std::optional<Schedule> final_schedule;
    try {
        const SolveResult phase2 = fix_and_optimize(model, window_fixes, config.phase2_limits,
                                                    phase1_schedule, config.external);
        if (phase2.schedule)
            final_schedule = phase2.schedule;
        message += "phase1=" + to_string(phase1.status) +
                   " phase2=" + to_string(phase2.status);
    } catch (const std::exception&) {
        message += "phase2=failed";
    }

    if (final_schedule &&
        average_cost(pre, *final_schedule, scenarios) <=
            average_cost(pre, phase1_schedule, scenarios))
        return finish(pre, scenarios, *final_schedule, message);
    return finish(pre, scenarios, phase1_schedule, message + " (kept phase 1)");
}

} // namespace schedopt
