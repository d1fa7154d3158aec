//
// Project     : schedopt
// File        : solve_exact.cpp
// Description : exhaustive oracle for tiny instances
//
// Enumerates activity start combinations and battery action sequences in
// lexicographic order, pruning on battery state bounds and an admissible
// cost bound. Candidate costs are the evaluator's true quadratic objective,
// so the oracle is independent of the MILP path it validates.
//

#include "schedopt/evaluator.hpp"
#include "schedopt/solve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace schedopt {

namespace {

constexpr double kEnergyScale = 0.25 / 1000.0;
constexpr double kPeakScale = 0.005;

struct JointAction {
    std::vector<double> actions; // per battery: -1, 0, +1
    std::vector<double> energy_delta; // per battery: kWh change
    double load_delta = 0.0;          // grid-side kW change
};

// All 3^B per-slot action combinations, enumerated battery-major so the
// first-found optimum is the lexicographically smallest schedule.
std::vector<JointAction> joint_actions(const Instance& instance) {
    const std::size_t B = instance.batteries.size();
    std::vector<JointAction> out;
    std::vector<int> digits(B, 0);
    const double choices[3] = {kIdle, kCharge, kDischarge};
    while (true) {
        JointAction ja;
        ja.actions.resize(B);
        ja.energy_delta.resize(B);
        for (std::size_t b = 0; b < B; ++b) {
            const double action = choices[digits[b]];
            const Battery& bat = instance.batteries[b];
            ja.actions[b] = action;
            ja.energy_delta[b] = 0.25 * bat.max_power_kw * action;
            if (action > 0)
                ja.load_delta += bat.charge_draw_kw();
            else if (action < 0)
                ja.load_delta -= bat.discharge_supply_kw();
        }
        out.push_back(std::move(ja));
        std::size_t i = B;
        while (i > 0) {
            --i;
            if (++digits[i] < 3)
                break;
            digits[i] = 0;
            if (i == 0)
                return out;
        }
        if (B == 0)
            return out;
    }
}

class Oracle {
public:
    Oracle(const Instance& instance, const ScenarioSet& scenarios, const SolveLimits& limits)
        : instance_(instance), scenarios_(scenarios), limits_(limits),
          joints_(joint_actions(instance)) {}

    SolveResult run() {
        check_budget();
        const std::size_t A = instance_.activities.size();
        options_.resize(A);
        for (std::size_t a = 0; a < A; ++a) {
            const Activity& act = instance_.activities[a];
            if (!act.recurring())
                options_[a].push_back({false, 0});
            for (int t : act.allowed_starts)
                options_[a].push_back({true, t});
            if (options_[a].empty()) { // recurring activity with no start
                SolveResult result;
                result.status = SolveStatus::Infeasible;
                result.message = "recurring activity '" + act.id + "' has no allowed start";
                return result;
            }
        }

        candidate_ = Schedule::empty_for(instance_);
        enumerate_combo(0);

        SolveResult result;
        if (!best_) {
            result.status = SolveStatus::Infeasible;
            result.message = "no feasible activity combination";
            return result;
        }
        const CostReport report = evaluate_cost(instance_, *best_, scenarios_);
        result.schedule = best_;
        result.objective = report.average.total;
        result.bound = result.objective;
        result.gap = 0.0;
        result.status = SolveStatus::Optimal;
        result.nodes = nodes_;
        return result;
    }

private:
    struct Option {
        bool scheduled;
        int start;
    };

    void check_budget() {
        double combos = 1.0;
        for (const Activity& act : instance_.activities)
            combos *= static_cast<double>(act.allowed_starts.size() + (act.recurring() ? 0 : 1));
        const double sequences =
            std::pow(3.0, static_cast<double>(instance_.batteries.size()) *
                              static_cast<double>(instance_.horizon.T));
        if (combos * sequences > limits_.enumeration_budget)
            throw std::invalid_argument("enumeration budget exceeded: " +
                                        std::to_string(combos * sequences) + " > " +
                                        std::to_string(limits_.enumeration_budget));
    }

    void enumerate_combo(std::size_t a) {
        if (a < options_.size()) {
            for (const Option& opt : options_[a]) {
                candidate_.activities[a] = {opt.scheduled, opt.start};
                enumerate_combo(a + 1);
            }
            return;
        }
        // activity-level feasibility (precedence, rooms) with idle batteries
        for (auto& row : candidate_.battery_actions)
            std::fill(row.begin(), row.end(), kIdle);
        if (!check_feasibility(instance_, candidate_).empty())
            return;
        prepare_combo();
        search_batteries();
    }

    void prepare_combo() {
        const int T = instance_.horizon.T;
        const int S = scenarios_.count();
        rev_pen_ = 0.0;
        for (std::size_t a = 0; a < instance_.activities.size(); ++a) {
            const Activity& act = instance_.activities[a];
            const ActivityDecision& dec = candidate_.activities[a];
            if (act.recurring() || !dec.scheduled)
                continue;
            rev_pen_ -= act.revenue;
            if (act.start_penalized(dec.start))
                rev_pen_ += act.penalty;
        }
        base_.assign(static_cast<std::size_t>(S),
                     std::vector<double>(static_cast<std::size_t>(T), 0.0));
        for (int s = 0; s < S; ++s)
            for (int t = 1; t <= T; ++t) {
                double load = scenarios_.series[static_cast<std::size_t>(s)][static_cast<std::size_t>(t) - 1];
                for (std::size_t a = 0; a < instance_.activities.size(); ++a)
                    if (candidate_.in_progress(instance_, static_cast<int>(a), t))
                        load += instance_.activities[a].total_load_kw();
                base_[static_cast<std::size_t>(s)][static_cast<std::size_t>(t) - 1] = load;
            }

        double delta_min = 0.0, delta_max = 0.0;
        for (const Battery& b : instance_.batteries) {
            delta_min -= b.discharge_supply_kw();
            delta_max += b.charge_draw_kw();
        }
        // suffix_cost[s][t]: cheapest achievable weighted load sum from slot
        // t on; suffix_peak[s][t]: unavoidable |load| from slot t on
        suffix_cost_.assign(static_cast<std::size_t>(S),
                            std::vector<double>(static_cast<std::size_t>(T) + 2, 0.0));
        suffix_peak_.assign(static_cast<std::size_t>(S),
                            std::vector<double>(static_cast<std::size_t>(T) + 2, 0.0));
        for (int s = 0; s < S; ++s)
            for (int t = T; t >= 1; --t) {
                const double pi = instance_.prices[static_cast<std::size_t>(t) - 1];
                const double lo = base_[static_cast<std::size_t>(s)][static_cast<std::size_t>(t) - 1] + delta_min;
                const double hi = base_[static_cast<std::size_t>(s)][static_cast<std::size_t>(t) - 1] + delta_max;
                const double slot_min = std::min(pi * lo, pi * hi);
                const double min_abs = lo > 0 ? lo : (hi < 0 ? -hi : 0.0);
                suffix_cost_[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] =
                    slot_min + suffix_cost_[static_cast<std::size_t>(s)][static_cast<std::size_t>(t) + 1];
                suffix_peak_[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] = std::max(
                    min_abs, suffix_peak_[static_cast<std::size_t>(s)][static_cast<std::size_t>(t) + 1]);
            }
    }

    void search_batteries() {
        const int S = scenarios_.count();
        states_.clear();
        for (const Battery& b : instance_.batteries)
            states_.push_back(b.initial_kwh);
        wsum_.assign(static_cast<std::size_t>(S), 0.0);
        maxabs_.assign(static_cast<std::size_t>(S), 0.0);
        const std::size_t depth = static_cast<std::size_t>(instance_.horizon.T) + 2;
        saved_wsum_.assign(depth, std::vector<double>(static_cast<std::size_t>(S), 0.0));
        saved_max_.assign(depth, std::vector<double>(static_cast<std::size_t>(S), 0.0));
        dfs(1);
    }

    double partial_bound(int next_slot) const {
        const int S = scenarios_.count();
        double sum = 0.0;
        for (int s = 0; s < S; ++s) {
            const double energy =
                wsum_[static_cast<std::size_t>(s)] +
                suffix_cost_[static_cast<std::size_t>(s)][static_cast<std::size_t>(next_slot)];
            const double peak = std::max(
                maxabs_[static_cast<std::size_t>(s)],
                suffix_peak_[static_cast<std::size_t>(s)][static_cast<std::size_t>(next_slot)]);
            const double level = ceil_guarded(peak);
            sum += kEnergyScale * energy + kPeakScale * level * level;
        }
        return sum / static_cast<double>(S) + rev_pen_;
    }

    void dfs(int t) {
        ++nodes_;
        if (best_ && partial_bound(t) >= best_total_)
            return;
        const int T = instance_.horizon.T;
        const int S = scenarios_.count();
        if (t > T) {
            double total = 0.0;
            for (int s = 0; s < S; ++s) {
                const double level = ceil_guarded(maxabs_[static_cast<std::size_t>(s)]);
                total += kEnergyScale * wsum_[static_cast<std::size_t>(s)] +
                         kPeakScale * level * level;
            }
            total = total / static_cast<double>(S) + rev_pen_;
            if (!best_ || total < best_total_) {
                best_total_ = total;
                best_ = candidate_;
            }
            return;
        }
        const std::size_t B = instance_.batteries.size();
        for (const JointAction& ja : joints_) {
            bool ok = true;
            for (std::size_t b = 0; b < B && ok; ++b) {
                const double next = states_[b] + ja.energy_delta[b];
                if (next < -1e-9 || next > instance_.batteries[b].capacity_kwh + 1e-9)
                    ok = false;
            }
            if (!ok)
                continue;
            for (std::size_t b = 0; b < B; ++b) {
                states_[b] += ja.energy_delta[b];
                candidate_.battery_actions[b][static_cast<std::size_t>(t) - 1] = ja.actions[b];
            }
            saved_wsum_[static_cast<std::size_t>(t)] = wsum_;
            saved_max_[static_cast<std::size_t>(t)] = maxabs_;
            const double pi = instance_.prices[static_cast<std::size_t>(t) - 1];
            for (int s = 0; s < S; ++s) {
                const double load =
                    base_[static_cast<std::size_t>(s)][static_cast<std::size_t>(t) - 1] +
                    ja.load_delta;
                wsum_[static_cast<std::size_t>(s)] += pi * load;
                maxabs_[static_cast<std::size_t>(s)] =
                    std::max(maxabs_[static_cast<std::size_t>(s)], std::abs(load));
            }
            dfs(t + 1);
            wsum_ = saved_wsum_[static_cast<std::size_t>(t)];
            maxabs_ = saved_max_[static_cast<std::size_t>(t)];
            for (std::size_t b = 0; b < B; ++b) {
                states_[b] -= ja.energy_delta[b];
                candidate_.battery_actions[b][static_cast<std::size_t>(t) - 1] = kIdle;
            }
        }
    }

    const Instance& instance_;
    const ScenarioSet& scenarios_;
    SolveLimits limits_;
    std::vector<JointAction> joints_;
    std::vector<std::vector<Option>> options_;
    Schedule candidate_;
    std::optional<Schedule> best_;
    double best_total_ = 0.0;
    double rev_pen_ = 0.0;
    std::vector<std::vector<double>> base_;        // [scenario][slot-1]
    std::vector<std::vector<double>> suffix_cost_; // [scenario][slot], 1-based
    std::vector<std::vector<double>> suffix_peak_;
    std::vector<double> states_, wsum_, maxabs_;
    std::vector<std::vector<double>> saved_wsum_, saved_max_; // indexed by slot
    long long nodes_ = 0;
};

} // namespace

SolveResult solve_exact_small(const Instance& instance, const ScenarioSet& scenarios,
                              const SolveLimits& limits) {
    if (scenarios.count() < 1)
        throw std::invalid_argument("at least one scenario required");
    for (const auto& series : scenarios.series)
        if (static_cast<int>(series.size()) != instance.horizon.T)
            throw std::invalid_argument("scenario length does not match horizon");
    return Oracle(instance, scenarios, limits).run();
}

} // namespace schedopt
