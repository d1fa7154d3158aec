//
// Project     : schedopt
// File        : scenarios.cpp
// Description : scenario I/O, perturbation and the accuracy-cost curve
//

#include "schedopt/scenarios.hpp"
#include "schedopt/evaluator.hpp"
#include "schedopt/text.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace schedopt {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

std::vector<std::vector<double>> parse_scenario_csv(const std::string& path, int expected_slots) {
    std::ifstream file(path);
    if (!file)
        throw std::runtime_error("cannot open scenario file '" + path + "'");
    std::string line;
    if (!std::getline(file, line))
        throw std::runtime_error(path + ": empty scenario file");
    const auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "slot")
        throw std::runtime_error(path + ": header must be 'slot,<scenario>,...'");
    const std::size_t columns = header.size() - 1;

    std::vector<std::vector<double>> series(columns);
    int row = 0;
    while (std::getline(file, line)) {
        if (line.empty())
            continue;
        ++row;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw std::runtime_error(path + ": row " + std::to_string(row) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(header.size()));
        long long slot;
        if (!parse_int(fields[0], slot) || slot != row)
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     " must start with slot " + std::to_string(row));
        for (std::size_t c = 0; c < columns; ++c) {
            double value;
            if (!parse_double(fields[c + 1], value))
                throw std::runtime_error(path + ": row " + std::to_string(row) +
                                         " column " + std::to_string(c + 2) + " is not numeric");
            series[c].push_back(value);
        }
    }
    if (row != expected_slots)
        throw std::runtime_error(path + ": expected " + std::to_string(expected_slots) +
                                 " rows, got " + std::to_string(row));
    return series;
}

} // namespace

ScenarioSet load_scenarios(const std::vector<std::string>& paths, int expected_slots) {
    if (paths.empty())
        throw std::invalid_argument("at least one scenario file required");
    ScenarioSet set;
    for (const std::string& path : paths)
        for (auto& series : parse_scenario_csv(path, expected_slots))
            set.series.push_back(std::move(series));
    return set;
}

std::string serialize_scenarios(const ScenarioSet& scenarios) {
    std::string out = "slot";
    for (int s = 1; s <= scenarios.count(); ++s)
        out += ",s" + std::to_string(s);
    out += "\n";
    for (int t = 1; t <= scenarios.num_slots(); ++t) {
        out += std::to_string(t);
        for (const auto& series : scenarios.series)
            out += "," + format_double(series[static_cast<std::size_t>(t) - 1]);
        out += "\n";
    }
    return out;
}

ScenarioSet ScenarioFamily::to_scenario_set() const {
    ScenarioSet set;
    set.series = members;
    return set;
}

namespace {

// Box-Muller on an explicit mt19937_64 stream: bit-stable across standard
// library implementations, unlike std::normal_distribution.
class Gaussian {
public:
    explicit Gaussian(std::uint64_t seed) : rng_(seed) {}

    double next() {
        const double u1 = unit_open();
        const double u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    double unit() { return static_cast<double>(rng_() >> 11) * 0x1p-53; }
    double unit_open() {
        double u = unit();
        while (u == 0.0)
            u = unit();
        return u;
    }

    std::mt19937_64 rng_;
};

} // namespace

ScenarioFamily generate_perturbed(const std::vector<double>& base, int k, double sigma,
                                  std::uint64_t seed, NoiseKind kind) {
    if (k < 1)
        throw std::invalid_argument("family size must be >= 1");
    if (sigma < 0.0)
        throw std::invalid_argument("sigma must be non-negative");
    ScenarioFamily family;
    family.base = base;
    family.sigma = sigma;
    family.seed = seed;
    Gaussian gaussian(seed);
    for (int member = 0; member < k; ++member) {
        std::vector<double> series(base.size());
        for (std::size_t t = 0; t < base.size(); ++t) {
            const double eps = gaussian.next();
            series[t] = kind == NoiseKind::Multiplicative ? base[t] * (1.0 + sigma * eps)
                                                          : base[t] + sigma * eps;
        }
        family.members.push_back(std::move(series));
    }
    return family;
}

namespace {

CurvePoint curve_point(const Instance& pre, const std::vector<double>& base, double sigma,
                       const CurveConfig& config) {
    const ScenarioFamily family =
        generate_perturbed(base, config.members, sigma, config.seed, config.noise);
    const ScenarioSet scenarios = family.to_scenario_set();

    SolveResult solved;
    if (config.use_exact_oracle) {
        solved = solve_exact_small(pre, scenarios, config.limits);
    } else {
        MilpModel model = relax_lambda(build_saa(pre, scenarios, compute_big_m(pre, scenarios)));
        solved = branch_and_bound(model, config.limits);
    }
    if (!solved.schedule)
        throw std::runtime_error("SAA solve failed at sigma " + format_double(sigma) + ": " +
                                 solved.message);

    CurvePoint point;
    point.sigma = sigma;
    const int period = config.seasonal_period > 0 ? config.seasonal_period : pre.horizon.D;
    double mase_sum = 0.0;
    for (const auto& member : family.members)
        mase_sum += compute_mase(member, base, base, period);
    point.mean_mase = mase_sum / static_cast<double>(family.members.size());
    point.mean_cost =
        evaluate_cost(pre, *solved.schedule, single_scenario(base)).average.total;
    return point;
}

} // namespace

std::vector<CurvePoint> accuracy_cost_curve(const Instance& instance,
                                            const std::vector<double>& base,
                                            const std::vector<double>& sigmas,
                                            const CurveConfig& config) {
    if (static_cast<int>(base.size()) != instance.horizon.T)
        throw std::invalid_argument("base series length does not match horizon");
    const Instance pre = preprocess_penalized_starts(instance);
    std::vector<CurvePoint> points(sigmas.size());
    if (sigmas.empty())
        return points;

    const int threads = std::max(1, std::min<int>(config.threads,
                                                  static_cast<int>(sigmas.size())));
    if (threads == 1) {
        for (std::size_t i = 0; i < sigmas.size(); ++i)
            points[i] = curve_point(pre, base, sigmas[i], config);
        return points;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t i = static_cast<std::size_t>(w); i < sigmas.size();
                     i += static_cast<std::size_t>(threads))
                    points[i] = curve_point(pre, base, sigmas[i], config);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    for (auto& t : pool)
        t.join();
    for (const auto& error : errors)
        if (error)
            std::rethrow_exception(error);
    return points;
}

std::string curve_to_csv(const std::vector<CurvePoint>& points) {
    std::string out = "sigma,mase,cost\n";
    for (const CurvePoint& p : points)
        out += format_double(p.sigma) + "," + format_double(p.mean_mase) + "," +
               format_double(p.mean_cost) + "\n";
    return out;
}

} // namespace schedopt
