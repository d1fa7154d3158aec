//
// Project     : schedopt
// File        : schedule.hpp
// Description : decision artifact shared by solvers, evaluator and I/O
//

#pragma once

#include "schedopt/instance.hpp"

#include <vector>

namespace schedopt {

// Battery action per slot as a signed fraction of max power: +1 charge,
// -1 discharge, 0 idle. Relaxed contexts may hold fractional values.
constexpr double kCharge = 1.0;
constexpr double kDischarge = -1.0;
constexpr double kIdle = 0.0;

struct ActivityDecision {
    bool scheduled = false;
    int start = 0; // first-week slot for recurring activities
};

struct Schedule {
    std::vector<ActivityDecision> activities;       // instance order
    std::vector<std::vector<double>> battery_actions; // [battery][slot 0..T-1]

    static Schedule empty_for(const Instance& instance);

    bool in_progress(const Instance& instance, int activity, int slot) const;

    // Total order used for deterministic tie-breaking: activity starts
    // (unscheduled first), then battery actions with idle < charge < discharge.
    bool lex_less(const Schedule& other) const;
    bool operator==(const Schedule& other) const;
};

} // namespace schedopt
