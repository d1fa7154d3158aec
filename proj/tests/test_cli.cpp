#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "schedopt/evaluator.hpp"
#include "schedopt/instance.hpp"
#include "schedopt/model.hpp"
#include "schedopt/scenarios.hpp"
#include "schedopt/solve.hpp"
#include "schedopt/text.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

using namespace schedopt;

namespace {

namespace fs = std::filesystem;

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream file(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "schedopt_cli_test";
    fs::create_directories(dir);
    return dir;
}

CliResult run_cli(const std::string& args) {
    const fs::path out = work_dir() / "stdout.txt";
    const fs::path err = work_dir() / "stderr.txt";
    const std::string command = std::string(SCHEDOPT_BIN) + " " + args + " > " + out.string() +
                                " 2> " + err.string();
    const int raw = std::system(command.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

// One real week of 28 slots, no battery, one once-off activity.
Instance cli_instance() {
    Instance instance;
    instance.horizon = make_horizon(28, 4);
    instance.rooms = {1, 1};
    Activity a1;
    a1.id = "a1";
    a1.kind = ActivityKind::OnceOff;
    a1.duration = 2;
    a1.small_rooms = 1;
    a1.load_per_room_kw = 2.0;
    a1.revenue = 50.0;
    a1.penalty = 10.0;
    a1.allowed_starts = {1, 5};
    a1.penalized_starts = {5};
    instance.activities = {a1};
    instance.prices.assign(28, 100.0);
    return instance;
}

std::string write_inputs() {
    const fs::path dir = work_dir();
    std::ofstream(dir / "inst.txt") << serialize_instance(cli_instance());
    std::ofstream(dir / "scen.csv") << serialize_scenarios(
        single_scenario(std::vector<double>(28, 10.0)));
    return dir.string();
}

double grep_value(const std::string& text, const std::string& key) {
    const auto pos = text.find(key + " ");
    REQUIRE(pos != std::string::npos);
    return std::stod(text.substr(pos + key.size() + 1));
}

} // namespace

TEST_CASE("cli validate", "[cli]") {
    const std::string dir = write_inputs();
    CHECK(run_cli("validate " + dir + "/inst.txt").exit_code == 0);

    std::ofstream(dir + "/bad.txt") << "horizon 8 4\nrooms 1 1\nprice 1 1\n";
    const CliResult bad = run_cli("validate " + dir + "/bad.txt");
    CHECK(bad.exit_code == 1);
    CHECK_FALSE(bad.err.empty());

    CHECK(run_cli("validate " + dir + "/missing.txt").exit_code == 1);
}

TEST_CASE("cli solve, evaluate and allocate pipeline", "[cli]") {
    const std::string dir = write_inputs();
    const CliResult solve = run_cli("solve " + dir + "/inst.txt -s " + dir +
                                    "/scen.csv --algo exact --out " + dir + "/sol.txt");
    REQUIRE(solve.exit_code == 0);
    // flat 10 kW base plus the 2-slot activity: energy 7.1, peak 0.72
    CHECK_THAT(grep_value(solve.out, "true_average_cost"),
               Catch::Matchers::WithinAbs(-42.18, 1e-9));
    const std::string solution = slurp(dir + "/sol.txt");
    CHECK(solution.find("start a1 1") != std::string::npos);

    const CliResult evaluate = run_cli("evaluate " + dir + "/inst.txt -s " + dir +
                                       "/scen.csv --solution " + dir + "/sol.txt");
    CHECK(evaluate.exit_code == 0);
    CHECK(evaluate.out.find("scenario,energy,peak,revenue,penalty,total") != std::string::npos);
    CHECK(evaluate.out.find("average,") != std::string::npos);

    const CliResult allocate =
        run_cli("allocate " + dir + "/inst.txt --solution " + dir + "/sol.txt --out " + dir +
                "/alloc.txt");
    REQUIRE(allocate.exit_code == 0);
    const std::string allocated = slurp(dir + "/alloc.txt");
    CHECK(allocated.find("room a1 small:1 large:") != std::string::npos);

    // re-allocating an already-allocated file is an idempotent rewrite
    const CliResult again =
        run_cli("allocate " + dir + "/inst.txt --solution " + dir + "/alloc.txt --out " + dir +
                "/alloc2.txt");
    REQUIRE(again.exit_code == 0);
    CHECK(slurp(dir + "/alloc2.txt") == allocated);
}

TEST_CASE("cli solve via bnb and the heuristics", "[cli]") {
    const std::string dir = write_inputs();
    const CliResult bnb = run_cli("solve " + dir + "/inst.txt -s " + dir +
                                  "/scen.csv --algo bnb --out " + dir + "/sol_bnb.txt");
    REQUIRE(bnb.exit_code == 0);
    CHECK_THAT(grep_value(bnb.out, "true_average_cost"),
               Catch::Matchers::WithinAbs(-42.18, 1e-9));

    std::ofstream(dir + "/init.txt") << "start a1 1\n";
    const CliResult warm = run_cli("solve " + dir + "/inst.txt -s " + dir +
                                   "/scen.csv --algo warm --initial " + dir +
                                   "/init.txt --out " + dir + "/sol_warm.txt");
    REQUIRE(warm.exit_code == 0);
    CHECK(grep_value(warm.out, "true_average_cost") <= -42.18 + 1e-9);

    const CliResult cold = run_cli("solve " + dir + "/inst.txt -s " + dir +
                                   "/scen.csv --algo cold --out " + dir + "/sol_cold.txt");
    CHECK(cold.exit_code == 0);
}

TEST_CASE("cli usage errors exit with 2", "[cli]") {
    const std::string dir = write_inputs();
    CHECK(run_cli("solve " + dir + "/inst.txt -s " + dir + "/scen.csv --algo warm").exit_code ==
          2);
    CHECK(run_cli("solve " + dir + "/inst.txt -s " + dir + "/scen.csv --algo external")
              .exit_code == 2);
    CHECK(run_cli("nonsense").exit_code == 2);
    CHECK(run_cli("solve --definitely-not-a-flag x").exit_code == 2);
    CHECK(run_cli("solve " + dir + "/inst.txt -s " + dir +
                  "/scen.csv --setstart --algo cold")
              .exit_code == 2);
    CHECK(run_cli("solve " + dir + "/inst.txt -s " + dir + "/scen.csv --setstart").exit_code ==
          2); // setstart selects warm, which needs --initial
}

TEST_CASE("cli setstart flag selects the warm path", "[cli]") {
    const std::string dir = write_inputs();
    std::ofstream(dir + "/init2.txt") << "start a1 1\n";
    const CliResult warm = run_cli("solve " + dir + "/inst.txt -s " + dir +
                                   "/scen.csv --setstart --initial " + dir +
                                   "/init2.txt --out " + dir + "/sol_ss.txt");
    REQUIRE(warm.exit_code == 0);
    CHECK(grep_value(warm.out, "true_average_cost") <= -42.18 + 1e-9);
}

TEST_CASE("cli evaluate flags violations with exit 1", "[cli]") {
    const std::string dir = write_inputs();
    std::ofstream(dir + "/bad_sol.txt") << "start a1 3\n"; // not an allowed start
    const CliResult result = run_cli("evaluate " + dir + "/inst.txt -s " + dir +
                                     "/scen.csv --solution " + dir + "/bad_sol.txt");
    CHECK(result.exit_code == 1);
    CHECK(result.err.find("c4") != std::string::npos);

    // the empty solution leaves the once-off unscheduled: feasible here
    std::ofstream(dir + "/empty_sol.txt") << "# nothing\n";
    CHECK(run_cli("evaluate " + dir + "/inst.txt -s " + dir + "/scen.csv --solution " + dir +
                  "/empty_sol.txt")
              .exit_code == 0);

    // allocate refuses the infeasible solution as well
    CHECK(run_cli("allocate " + dir + "/inst.txt --solution " + dir + "/bad_sol.txt")
              .exit_code == 1);
}

TEST_CASE("cli external solver stub", "[cli]") {
    const std::string dir = write_inputs();
    // precompute a known (penalized) solution's full assignment
    const Instance instance = cli_instance();
    const ScenarioSet scenarios = single_scenario(std::vector<double>(28, 10.0));
    const Instance pre = preprocess_penalized_starts(instance);
    const MilpModel model =
        relax_lambda(build_saa(pre, scenarios, compute_big_m(pre, scenarios)));
    Schedule known = Schedule::empty_for(instance);
    known.activities[0] = {true, 5};
    const DerivedPoint point = derive_point(model, known);
    REQUIRE(point.feasible);
    {
        std::ofstream out(dir + "/premade.sol");
        for (std::size_t j = 0; j < model.vars.size(); ++j)
            out << model.vars[j].name << " " << format_double(point.values[j]) << "\n";
    }
    const CliResult result = run_cli("solve " + dir + "/inst.txt -s " + dir +
                                     "/scen.csv --algo external --solver-cmd 'cp " + dir +
                                     "/premade.sol {sol}' --out " + dir + "/sol_ext.txt");
    REQUIRE(result.exit_code == 0);
    // hand evaluation: energy 7.1, peak 0.72, revenue 50, penalty 10
    CHECK_THAT(grep_value(result.out, "true_average_cost"),
               Catch::Matchers::WithinAbs(-32.18, 1e-9));

    const CliResult failing = run_cli("solve " + dir + "/inst.txt -s " + dir +
                                      "/scen.csv --algo external --solver-cmd false");
    CHECK(failing.exit_code == 1);
}

TEST_CASE("cli export is byte-stable", "[cli]") {
    const std::string dir = write_inputs();
    REQUIRE(run_cli("export " + dir + "/inst.txt -s " + dir + "/scen.csv --out " + dir +
                    "/model1.mps")
                .exit_code == 0);
    REQUIRE(run_cli("export " + dir + "/inst.txt -s " + dir + "/scen.csv --out " + dir +
                    "/model2.mps")
                .exit_code == 0);
    const std::string first = slurp(dir + "/model1.mps");
    CHECK_FALSE(first.empty());
    CHECK(first == slurp(dir + "/model2.mps"));
    CHECK(first.rfind("NAME", 0) == 0);
}

TEST_CASE("cli curve", "[cli]") {
    const std::string dir = write_inputs();
    std::vector<double> varying(28);
    for (int t = 0; t < 28; ++t)
        varying[static_cast<std::size_t>(t)] = 8.0 + static_cast<double>(t % 5);
    std::ofstream(dir + "/base.csv") << serialize_scenarios(single_scenario(varying));
    const CliResult result = run_cli("curve " + dir + "/inst.txt --base " + dir +
                                     "/base.csv --sigmas 0 --members 2 --exact --threads 1");
    REQUIRE(result.exit_code == 0);
    CHECK(result.out.rfind("sigma,mase,cost", 0) == 0);
    CHECK(result.out.find("\n0,0,") != std::string::npos);
}
