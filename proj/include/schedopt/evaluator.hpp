//
// Project     : schedopt
// File        : evaluator.hpp
// Description : ground-truth cost evaluation, feasibility checks, MASE
//
// Deliberately independent of the MILP machinery: everything here is
// computed directly from the instance and the schedule.
//

#pragma once

#include "schedopt/instance.hpp"
#include "schedopt/schedule.hpp"

#include <optional>
#include <string>
#include <vector>

namespace schedopt {

// Ceiling with a guard band: values within 1e-9 of an integer snap to it
// before rounding up, so float noise cannot shift the peak charge by one.
double ceil_guarded(double x);

struct LoadProfile {
    std::vector<double> load_kw; // aggregate load per slot
    double peak_kw = 0.0;        // max_t |load|
};

LoadProfile compute_load_profile(const Instance& instance, const Schedule& schedule,
                                 const std::vector<double>& base_load);

struct ScenarioCost {
    double energy = 0.0;      // (0.25/1000) * sum_t price_t * load_t
    double peak_charge = 0.0; // 0.005 * ceil(peak)^2
    double revenue = 0.0;
    double penalty = 0.0;
    double total = 0.0;
};

struct CostReport {
    std::vector<ScenarioCost> per_scenario;
    ScenarioCost average;

    std::string to_csv() const;
};

CostReport evaluate_cost(const Instance& instance, const Schedule& schedule,
                         const ScenarioSet& scenarios);

// Constraint families follow the formulation numbering: c2..c4 start and
// progress linkage, c5 penalized-start indicator, c6 day index, c7/c8
// precedence, c9/c10 battery dynamics, c11 charge/discharge exclusion,
// c12/c13 rooms, c14..c18 load/peak linkage, c19 recurring coverage,
// c20 battery state bounds.
struct Violation {
    std::string family; // "c2".."c20"
    std::string entity; // activity or battery id ("" for slot-global rows)
    int slot = 0;       // 0 when not slot-specific
    double magnitude = 1.0;
    std::string message;
};

std::vector<Violation> check_feasibility(const Instance& instance, const Schedule& schedule);

// Raw variable-level assignment, used to cross-check imported solver output
// and by the constraint mutation tests. Slot indices are 1-based; recurring
// activities index z/v by first-week slot.
struct RawAssignment {
    // per activity: map slot -> value for z and v (only declared slots present)
    std::vector<std::vector<std::pair<int, double>>> z;
    std::vector<std::vector<std::pair<int, double>>> v;
    std::vector<double> w;
    std::vector<double> u; // once-off only; 0 for recurring entries
    std::vector<double> d;
    // per battery per slot 1..T
    std::vector<std::vector<double>> x;
    std::vector<std::vector<double>> y;
    std::vector<std::vector<double>> s;
};

RawAssignment expand_schedule(const Instance& instance, const Schedule& schedule);

std::vector<Violation> check_assignment(const Instance& instance, const RawAssignment& assignment);

// Mean absolute scaled error. Throws std::invalid_argument on a constant
// seasonal training series (zero denominator) and on length mismatches.
double compute_mase(const std::vector<double>& forecast, const std::vector<double>& actual,
                    const std::vector<double>& training, int seasonal_period);

} // namespace schedopt
