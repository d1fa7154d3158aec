//
// Project     : schedopt
// File        : scenarios.hpp
// Description : scenario CSV loading, synthetic perturbation families,
//               forecast-accuracy vs cost experiments
//

#pragma once

#include "schedopt/instance.hpp"
#include "schedopt/solve.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace schedopt {

// Column-stacks the given scenario CSV files in argument order. Every file
// must contain exactly expected_slots rows.
ScenarioSet load_scenarios(const std::vector<std::string>& paths, int expected_slots);

std::string serialize_scenarios(const ScenarioSet& scenarios);

enum class NoiseKind { Multiplicative, Additive };

struct ScenarioFamily {
    std::vector<double> base;
    std::vector<std::vector<double>> members;
    double sigma = 0.0;
    std::uint64_t seed = 0;

    ScenarioSet to_scenario_set() const;
};

// k perturbed copies of the base series. The standard-normal draws depend
// only on the seed, so families with different sigma are paired sample
// paths scaled by sigma; sigma = 0 reproduces the base exactly.
ScenarioFamily generate_perturbed(const std::vector<double>& base, int k, double sigma,
                                  std::uint64_t seed, NoiseKind kind = NoiseKind::Multiplicative);

struct CurvePoint {
    double sigma = 0.0;
    double mean_mase = 0.0;
    double mean_cost = 0.0; // true cost of the SAA schedule on the base series
};

struct CurveConfig {
    int members = 6;
    std::uint64_t seed = 1;
    NoiseKind noise = NoiseKind::Multiplicative;
    bool use_exact_oracle = false; // default: branch and bound on the SAA model
    SolveLimits limits;
    int seasonal_period = 0; // 0: slots per day
    int threads = 1;
};

// For each sigma: build a perturbed family, solve the SAA problem on it and
// evaluate the resulting schedule against the true base series.
std::vector<CurvePoint> accuracy_cost_curve(const Instance& instance,
                                            const std::vector<double>& base,
                                            const std::vector<double>& sigmas,
                                            const CurveConfig& config);

std::string curve_to_csv(const std::vector<CurvePoint>& points);

} // namespace schedopt
