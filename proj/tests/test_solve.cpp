#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "schedopt/evaluator.hpp"
#include "schedopt/solve.hpp"
#include "schedopt/text.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace schedopt;
using namespace schedopt::testing;

namespace {

Instance ti1_idle_battery() {
    // zero-capacity battery: only idle is state-feasible
    Instance instance = ti1();
    instance.batteries[0].capacity_kwh = 0.0;
    instance.batteries[0].initial_kwh = 0.0;
    return instance;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("oracle solves TI-1 with the battery pinned idle", "[solve]") {
    const SolveResult result =
        solve_exact_small(ti1_idle_battery(), single_scenario(ti1_base_load()));
    REQUIRE(result.status == SolveStatus::Optimal);
    REQUIRE(result.schedule.has_value());
    CHECK(result.schedule->activities[0].scheduled);
    CHECK(result.schedule->activities[0].start == 1); // non-penalized start wins
    CHECK_THAT(result.objective, Catch::Matchers::WithinAbs(-47.18, 1e-9));
}

TEST_CASE("oracle solves TI-1 with the battery free", "[solve]") {
    const SolveResult result = solve_exact_small(ti1(), single_scenario(ti1_base_load()));
    REQUIRE(result.status == SolveStatus::Optimal);
    // discharge through the two activity slots: energy 1.9, peak 0.5
    CHECK_THAT(result.objective, Catch::Matchers::WithinAbs(-47.6, 1e-9));
    CHECK(result.schedule->activities[0].start == 1);
    CHECK(result.schedule->battery_actions[0][0] == kDischarge);
    CHECK(result.schedule->battery_actions[0][1] == kDischarge);
}

TEST_CASE("oracle reports infeasibility for an unstartable recurring activity", "[solve]") {
    Instance instance = ti1();
    instance.activities[0].kind = ActivityKind::Recurring;
    instance.activities[0].revenue = 0;
    instance.activities[0].penalty = 0;
    instance.activities[0].allowed_starts.clear();
    instance.activities[0].penalized_starts.clear();
    const SolveResult result = solve_exact_small(instance, single_scenario(ti1_base_load()));
    CHECK(result.status == SolveStatus::Infeasible);
}

TEST_CASE("oracle zero case", "[solve]") {
    Instance instance;
    instance.horizon = make_test_horizon(4, 4);
    instance.rooms = {0, 0};
    instance.prices.assign(4, 0.0);
    const SolveResult result =
        solve_exact_small(instance, single_scenario(std::vector<double>(4, 0.0)));
    REQUIRE(result.status == SolveStatus::Optimal);
    CHECK(result.objective == 0.0);
    CHECK(result.schedule->activities.empty());
}

TEST_CASE("oracle refuses oversized search spaces", "[solve]") {
    Instance instance = ti1();
    instance.horizon = make_test_horizon(28, 4);
    instance.prices.assign(28, 100.0);
    instance.activities[0].allowed_starts = {1};
    instance.activities[0].penalized_starts.clear();
    CHECK_THROWS_AS(solve_exact_small(instance, single_scenario(std::vector<double>(28, 10.0))),
                    std::invalid_argument);
}

TEST_CASE("branch and bound matches the oracle on TI-1", "[solve]") {
    const Instance instance = ti1();
    const auto scenarios = single_scenario(ti1_base_load());
    const MilpModel model = build_saa(preprocess_penalized_starts(instance), scenarios,
                                      compute_big_m(instance, scenarios));
    const SolveResult bnb = branch_and_bound(model);
    const SolveResult oracle = solve_exact_small(instance, scenarios);
    REQUIRE(bnb.status == SolveStatus::Optimal);
    CHECK_THAT(bnb.objective, Catch::Matchers::WithinAbs(oracle.objective, 1e-6));
    CHECK(bnb.gap == 0.0);
    CHECK_THAT(bnb.bound, Catch::Matchers::WithinAbs(bnb.objective, 1e-9));
}

TEST_CASE("branch and bound detects infeasibility", "[solve]") {
    Instance instance = ti1();
    instance.activities[0].kind = ActivityKind::Recurring;
    instance.activities[0].revenue = 0;
    instance.activities[0].penalty = 0;
    instance.activities[0].allowed_starts.clear();
    instance.activities[0].penalized_starts.clear();
    const auto scenarios = single_scenario(ti1_base_load());
    const MilpModel model = build_saa(instance, scenarios, compute_big_m(instance, scenarios));
    CHECK(branch_and_bound(model).status == SolveStatus::Infeasible);
}

TEST_CASE("zero-node limit returns the warm start with a root-bound gap", "[solve]") {
    const Instance instance = ti1();
    const auto scenarios = single_scenario(ti1_base_load());
    const MilpModel model =
        build_saa(instance, scenarios, compute_big_m(instance, scenarios));
    Schedule warm = Schedule::empty_for(instance);
    warm.activities[0] = {true, 1};
    SolveLimits limits;
    limits.node_limit = 0;
    const SolveResult result = branch_and_bound(model, limits, warm);
    REQUIRE(result.status == SolveStatus::Feasible);
    CHECK_THAT(result.objective, Catch::Matchers::WithinAbs(-47.18, 1e-9));
    CHECK(result.bound <= result.objective);
    CHECK(result.gap >= 0.0);
    CHECK(result.nodes == 0);
}

TEST_CASE("warm start must be feasible", "[solve]") {
    const Instance instance = ti1();
    const auto scenarios = single_scenario(ti1_base_load());
    const MilpModel model = build_saa(instance, scenarios, compute_big_m(instance, scenarios));
    Schedule bad = Schedule::empty_for(instance);
    bad.activities[0] = {true, 3}; // not an allowed start
    CHECK_THROWS_AS(branch_and_bound(model, {}, bad), std::invalid_argument);
}

TEST_CASE("derived point reproduces the evaluator's cost exactly", "[solve]") {
    const Instance instance = ti1();
    const auto scenarios = single_scenario(ti1_base_load());
    const SolveResult oracle = solve_exact_small(instance, scenarios);
    const MilpModel model = build_saa(instance, scenarios, compute_big_m(instance, scenarios));

    const DerivedPoint point = derive_point(model, *oracle.schedule);
    REQUIRE(point.feasible);
    const double evaluator_total =
        evaluate_cost(instance, *oracle.schedule, scenarios).average.total;
    CHECK_THAT(point.objective, Catch::Matchers::WithinAbs(evaluator_total, 1e-9));
    CHECK(point.relaxed_objective <= evaluator_total + 1e-12);
}

TEST_CASE("MPS export is deterministic and structured", "[solve]") {
    const Instance instance = ti1();
    const auto scenarios = single_scenario(ti1_base_load());
    const MilpModel model =
        build_deterministic(instance, ti1_base_load(), compute_big_m(instance, scenarios));

    const std::string first = export_mps(model);
    const std::string second = export_mps(model);
    CHECK(first == second);
    const MilpModel rebuilt =
        build_deterministic(instance, ti1_base_load(), compute_big_m(instance, scenarios));
    CHECK(export_mps(rebuilt) == first); // identical models, identical bytes

    CHECK(first.rfind("NAME", 0) == 0);
    CHECK(first.find("ROWS\n") != std::string::npos);
    CHECK(first.find(" N  COST\n") != std::string::npos);
    CHECK(first.find("'INTORG'") != std::string::npos);
    CHECK(first.find("'INTEND'") != std::string::npos);
    CHECK(first.find(" BV BND         x_b1_t1\n") != std::string::npos);
    CHECK(first.find(" FR BND         l_t1\n") != std::string::npos);
    CHECK(first.find("ENDATA\n") != std::string::npos);

    // ROWS section holds every constraint plus the objective row
    std::size_t row_lines = 0;
    std::size_t pos = first.find("ROWS\n") + 5;
    const std::size_t columns_at = first.find("COLUMNS\n");
    while (pos < columns_at) {
        pos = first.find('\n', pos) + 1;
        ++row_lines;
    }
    CHECK(row_lines == model.cons.size() + 1);
}

TEST_CASE("relaxed lambda columns move from markers to bounds", "[solve]") {
    const Instance instance = ti1();
    const auto scenarios = single_scenario(ti1_base_load());
    const MilpModel model = relax_lambda(
        build_deterministic(instance, ti1_base_load(), compute_big_m(instance, scenarios)));
    const std::string mps = export_mps(model);
    CHECK(mps.find(" BV BND         lam_1\n") == std::string::npos);
    CHECK(mps.find(" UP BND         lam_1") != std::string::npos);
}

TEST_CASE("solution import round-trips the oracle optimum", "[solve]") {
    const Instance instance = ti1();
    const auto scenarios = single_scenario(ti1_base_load());
    const SolveResult oracle = solve_exact_small(instance, scenarios);
    const MilpModel model = build_saa(instance, scenarios, compute_big_m(instance, scenarios));
    const DerivedPoint point = derive_point(model, *oracle.schedule);
    REQUIRE(point.feasible);

    const auto path = temp_file("schedopt_roundtrip.sol");
    {
        std::ofstream out(path);
        out << "# full assignment\n";
        for (std::size_t j = 0; j < model.vars.size(); ++j)
            out << model.vars[j].name << " " << format_double(point.values[j]) << "\n";
    }
    const SolveResult imported = import_solution(path.string(), model);
    REQUIRE(imported.schedule.has_value());
    CHECK(*imported.schedule == *oracle.schedule);
    CHECK_THAT(imported.objective, Catch::Matchers::WithinAbs(oracle.objective, 1e-9));
    std::filesystem::remove(path);
}

TEST_CASE("solution import snaps near-half binaries down", "[solve]") {
    const Instance instance = ti1();
    const auto scenarios = single_scenario(ti1_base_load());
    const MilpModel model = build_saa(instance, scenarios, compute_big_m(instance, scenarios));

    const auto path = temp_file("schedopt_snap.sol");
    {
        std::ofstream out(path);
        out << "z_a1_t1 0.4999\n";
    }
    const SolveResult imported = import_solution(path.string(), model);
    REQUIRE(imported.schedule.has_value());
    CHECK_FALSE(imported.schedule->activities[0].scheduled);
    CHECK(imported.message.find("warning") != std::string::npos); // battery vars defaulted
    std::filesystem::remove(path);
}

TEST_CASE("solution import rejects unknown variables", "[solve]") {
    const Instance instance = ti1();
    const auto scenarios = single_scenario(ti1_base_load());
    const MilpModel model = build_saa(instance, scenarios, compute_big_m(instance, scenarios));
    const auto path = temp_file("schedopt_unknown.sol");
    {
        std::ofstream out(path);
        out << "zz_nonsense 1\n";
    }
    CHECK_THROWS_WITH(import_solution(path.string(), model),
                      Catch::Matchers::ContainsSubstring("not in model"));
    std::filesystem::remove(path);
}

TEST_CASE("external solver stub round trip", "[solve]") {
    const Instance instance = ti1();
    const auto scenarios = single_scenario(ti1_base_load());
    const SolveResult oracle = solve_exact_small(instance, scenarios);
    const MilpModel model = build_saa(instance, scenarios, compute_big_m(instance, scenarios));
    const DerivedPoint point = derive_point(model, *oracle.schedule);

    const auto premade = temp_file("schedopt_premade.sol");
    {
        std::ofstream out(premade);
        for (std::size_t j = 0; j < model.vars.size(); ++j)
            out << model.vars[j].name << " " << format_double(point.values[j]) << "\n";
    }
    ExternalSolverConfig config;
    config.command_template = "cp " + premade.string() + " {sol}";
    const SolveResult result = solve_external(model, config);
    REQUIRE(result.schedule.has_value());
    CHECK(*result.schedule == *oracle.schedule);
    CHECK_THAT(result.objective, Catch::Matchers::WithinAbs(oracle.objective, 1e-9));
    std::filesystem::remove(premade);

    ExternalSolverConfig failing{"false", ""};
    CHECK_THROWS_AS(solve_external(model, failing), std::runtime_error);
}
