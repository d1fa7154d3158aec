//
// Project     : schedopt
// File        : model.hpp
// Description : solver-agnostic MILP construction (deterministic and SAA)
//

#pragma once

#include "schedopt/instance.hpp"

#include <string>
#include <unordered_map>
#include <vector>

namespace schedopt {

enum class VarFamily {
    X,      // battery charging indicator
    Y,      // battery discharging indicator
    S,      // battery state of charge
    Z,      // activity start indicator
    V,      // activity in-progress indicator
    W,      // activity scheduled indicator
    U,      // once-off scheduled outside working hours
    D,      // day index of the start
    Load,   // aggregate load per slot (per scenario)
    Eta,    // absolute maximum load (per scenario)
    Lambda, // peak level indicators (per scenario)
};

struct VarRef {
    VarFamily family;
    int battery = -1;  // index into Instance::batteries
    int activity = -1; // index into Instance::activities
    int slot = -1;     // 1-based slot
    int scenario = -1; // 0-based scenario, -1 for first-stage variables
    int level = -1;    // lambda level in 1..M
    bool binary = false;
    double lb = 0.0;
    double ub = 1.0;
    std::string name;
};

struct LinTerm {
    int var;
    double coef;
};

enum class Sense { LE, EQ, GE };

struct Constraint {
    std::string name;
    std::vector<LinTerm> terms;
    Sense sense = Sense::EQ;
    double rhs = 0.0;
};

// Structured lookup tables filled by the builder. Entries are -1 (or
// absent) where the variable does not exist.
struct ModelIndex {
    std::vector<std::vector<int>> x, y, s;          // [battery][slot-1]
    std::vector<std::vector<std::pair<int, int>>> z; // [activity] sorted (slot, var)
    std::vector<std::vector<std::pair<int, int>>> v; // [activity] sorted (slot, var)
    std::vector<int> w, u, d;                        // [activity]
    std::vector<std::vector<int>> load;              // [scenario][slot-1]
    std::vector<int> eta;                            // [scenario]
    std::vector<std::vector<int>> lambda;            // [scenario][level-1]
};

struct MilpModel {
    std::vector<VarRef> vars;
    std::vector<Constraint> cons;
    std::vector<LinTerm> objective; // minimize
    int big_m = 0;
    int scenario_count = 1;
    ModelIndex index;
    std::unordered_map<std::string, int> var_by_name;

    int find_var(const std::string& name) const;
    int num_binary() const;
};

// Integer upper bound on the absolute value of the maximum achievable load.
struct BigM {
    int value = 0;
};

// Drops penalized start slots of once-off activities whose net revenue
// (revenue - penalty) is zero or negative; such starts can never improve
// the objective.
Instance preprocess_penalized_starts(const Instance& instance);

BigM compute_big_m(const Instance& instance, const ScenarioSet& scenarios);

MilpModel build_deterministic(const Instance& instance, const std::vector<double>& base_load,
                              BigM big_m);
MilpModel build_saa(const Instance& instance, const ScenarioSet& scenarios, BigM big_m);

// Peak levels become continuous in [0,1]; idempotent.
MilpModel relax_lambda(MilpModel model);

// Battery charge/discharge indicators become continuous in [0,1]; used by
// the warm-start heuristic's first phase.
MilpModel relax_battery_integrality(MilpModel model);

// Cost of the continuous-lambda peak block for a given eta lower bound:
// the chord of i^2 between floor(eta) and ceil(eta), scaled by 0.005.
// Lower-bounds the true peak charge 0.005*ceil(eta)^2.
double lambda_chord_cost(double eta, int big_m);

} // namespace schedopt
