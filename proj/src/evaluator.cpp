//
// Project     : schedopt
// File        : evaluator.cpp
// Description : true quadratic cost, feasibility checking, MASE
//

#include "schedopt/evaluator.hpp"
#include "schedopt/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace schedopt {

namespace {

constexpr double kEnergyScale = 0.25 / 1000.0; // $/(kW*slot) at $/MWh prices
constexpr double kPeakScale = 0.005;
constexpr double kTol = 1e-6;

// Compensated (Kahan) sum; the horizon can be thousands of slots and
// acceptance tolerances are 1e-9 relative.
class KahanSum {
public:
    void add(double value) {
        const double y = value - compensation_;
        const double t = sum_ + y;
        compensation_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

int day_of_start(int start, const Horizon& h) { return start / h.D; }

} // namespace

double ceil_guarded(double x) { return std::ceil(x - 1e-9); }

LoadProfile compute_load_profile(const Instance& instance, const Schedule& schedule,
                                 const std::vector<double>& base_load) {
    const int T = instance.horizon.T;
    if (static_cast<int>(base_load.size()) != T)
        throw std::invalid_argument("base load length does not match horizon");

    LoadProfile profile;
    profile.load_kw.assign(static_cast<std::size_t>(T), 0.0);

    for (int t = 1; t <= T; ++t) {
        double load = base_load[static_cast<std::size_t>(t) - 1];
        for (std::size_t b = 0; b < instance.batteries.size(); ++b) {
            const double action = schedule.battery_actions[b][static_cast<std::size_t>(t) - 1];
            const double charge = std::max(action, 0.0);
            const double discharge = std::max(-action, 0.0);
            const Battery& bat = instance.batteries[b];
            load += bat.max_power_kw / std::sqrt(bat.efficiency) *
                    (charge - bat.efficiency * discharge);
        }
        for (std::size_t a = 0; a < instance.activities.size(); ++a)
            if (schedule.in_progress(instance, static_cast<int>(a), t))
                load += instance.activities[a].total_load_kw();
        profile.load_kw[static_cast<std::size_t>(t) - 1] = load;
        profile.peak_kw = std::max(profile.peak_kw, std::abs(load));
    }
    return profile;
}

CostReport evaluate_cost(const Instance& instance, const Schedule& schedule,
                         const ScenarioSet& scenarios) {
    if (scenarios.count() < 1)
        throw std::invalid_argument("at least one scenario required");
    if (scenarios.num_slots() != instance.horizon.T)
        throw std::invalid_argument("scenario length does not match horizon");

    double revenue = 0.0;
    double penalty = 0.0;
    for (std::size_t a = 0; a < instance.activities.size(); ++a) {
        const Activity& act = instance.activities[a];
        const ActivityDecision& dec = schedule.activities[a];
        if (act.recurring() || !dec.scheduled)
            continue;
        revenue += act.revenue;
        if (act.start_penalized(dec.start))
            penalty += act.penalty;
    }

    CostReport report;
    KahanSum energy_sum, peak_sum, total_sum;
    for (int s = 0; s < scenarios.count(); ++s) {
        const LoadProfile profile =
            compute_load_profile(instance, schedule, scenarios.series[static_cast<std::size_t>(s)]);
        KahanSum weighted;
        for (int t = 1; t <= instance.horizon.T; ++t)
            weighted.add(instance.prices[static_cast<std::size_t>(t) - 1] *
                         profile.load_kw[static_cast<std::size_t>(t) - 1]);
        ScenarioCost cost;
        cost.energy = kEnergyScale * weighted.value();
        const double level = ceil_guarded(profile.peak_kw);
        cost.peak_charge = kPeakScale * level * level;
        cost.revenue = revenue;
        cost.penalty = penalty;
        cost.total = cost.energy + cost.peak_charge - cost.revenue + cost.penalty;
        energy_sum.add(cost.energy);
        peak_sum.add(cost.peak_charge);
        total_sum.add(cost.total);
        report.per_scenario.push_back(cost);
    }
    const double n = static_cast<double>(scenarios.count());
    report.average.energy = energy_sum.value() / n;
    report.average.peak_charge = peak_sum.value() / n;
    report.average.revenue = revenue;
    report.average.penalty = penalty;
    report.average.total = total_sum.value() / n;
    return report;
}

std::string CostReport::to_csv() const {
    std::string out = "scenario,energy,peak,revenue,penalty,total\n";
    const auto row = [](const std::string& label, const ScenarioCost& c) {
        return label + "," + format_double(c.energy) + "," + format_double(c.peak_charge) + "," +
               format_double(c.revenue) + "," + format_double(c.penalty) + "," +
               format_double(c.total) + "\n";
    };
    for (std::size_t s = 0; s < per_scenario.size(); ++s)
        out += row(std::to_string(s + 1), per_scenario[s]);
    out += row("average", average);
    return out;
}

namespace {

void check_battery_path(const Instance& instance, const Schedule& schedule,
                        std::vector<Violation>& out) {
    const int T = instance.horizon.T;
    for (std::size_t b = 0; b < instance.batteries.size(); ++b) {
        const Battery& bat = instance.batteries[b];
        double state = bat.initial_kwh;
        for (int t = 1; t <= T; ++t) {
            const double action = schedule.battery_actions[b][static_cast<std::size_t>(t) - 1];
            if (std::abs(action) > 1.0 + kTol)
                out.push_back({t == 1 ? "c9" : "c10", bat.id, t, std::abs(action) - 1.0,
                               "battery action outside [-1,1]"});
            state += 0.25 * bat.max_power_kw * action;
            if (state < -kTol)
                out.push_back({"c20", bat.id, t, -state, "battery state below zero"});
            else if (state > bat.capacity_kwh + kTol)
                out.push_back({"c20", bat.id, t, state - bat.capacity_kwh,
                               "battery state above capacity"});
        }
    }
}

void check_rooms(const Instance& instance, const Schedule& schedule, std::vector<Violation>& out) {
    for (int t = 1; t <= instance.horizon.T; ++t) {
        int small = 0;
        int large = 0;
        for (std::size_t a = 0; a < instance.activities.size(); ++a)
            if (schedule.in_progress(instance, static_cast<int>(a), t)) {
                small += instance.activities[a].small_rooms;
                large += instance.activities[a].large_rooms;
            }
        if (large > instance.rooms.large)
            out.push_back({"c12", "", t, static_cast<double>(large - instance.rooms.large),
                           "large-room demand exceeds capacity"});
        if (small > instance.rooms.small)
            out.push_back({"c13", "", t, static_cast<double>(small - instance.rooms.small),
                           "small-room demand exceeds capacity"});
    }
}

} // namespace

std::vector<Violation> check_feasibility(const Instance& instance, const Schedule& schedule) {
    std::vector<Violation> out;
    if (schedule.activities.size() != instance.activities.size() ||
        schedule.battery_actions.size() != instance.batteries.size())
        throw std::invalid_argument("schedule shape does not match instance");

    for (std::size_t a = 0; a < instance.activities.size(); ++a) {
        const Activity& act = instance.activities[a];
        const ActivityDecision& dec = schedule.activities[a];
        if (act.recurring() && !dec.scheduled) {
            out.push_back({"c19", act.id, 0, 1.0, "recurring activity not scheduled"});
            continue;
        }
        if (dec.scheduled && !act.start_allowed(dec.start))
            out.push_back({"c4", act.id, dec.start, 1.0, "start slot not in allowed set"});
    }

    for (std::size_t a = 0; a < instance.activities.size(); ++a) {
        const Activity& act = instance.activities[a];
        const ActivityDecision& dec = schedule.activities[a];
        for (const std::string& pid : act.prerequisites) {
            const int p = instance.activity_index(pid);
            if (p < 0)
                continue;
            const ActivityDecision& pre = schedule.activities[static_cast<std::size_t>(p)];
            if (dec.scheduled && !pre.scheduled) {
                out.push_back({"c8", act.id, 0, 1.0, "prerequisite '" + pid + "' not scheduled"});
                continue;
            }
            if (dec.scheduled && pre.scheduled) {
                const int day_pre = day_of_start(pre.start, instance.horizon);
                const int day_act = day_of_start(dec.start, instance.horizon);
                if (day_pre + 1 > day_act)
                    out.push_back({"c7", act.id, dec.start,
                                   static_cast<double>(day_pre + 1 - day_act),
                                   "no day gap after prerequisite '" + pid + "'"});
            }
        }
    }

    check_battery_path(instance, schedule, out);
    check_rooms(instance, schedule, out);
    return out;
}

RawAssignment expand_schedule(const Instance& instance, const Schedule& schedule) {
    RawAssignment raw;
    const Horizon& h = instance.horizon;
    const std::size_t A = instance.activities.size();
    raw.z.resize(A);
    raw.v.resize(A);
    raw.w.assign(A, 0.0);
    raw.u.assign(A, 0.0);
    raw.d.assign(A, 0.0);
    for (std::size_t a = 0; a < A; ++a) {
        const Activity& act = instance.activities[a];
        const ActivityDecision& dec = schedule.activities[a];
        for (int t : act.allowed_starts)
            raw.z[a].push_back({t, dec.scheduled && dec.start == t ? 1.0 : 0.0});
        for (int t : act.progress_slots(h)) {
            const bool on = dec.scheduled && t >= dec.start && t < dec.start + act.duration;
            raw.v[a].push_back({t, on ? 1.0 : 0.0});
        }
        raw.w[a] = dec.scheduled ? 1.0 : 0.0;
        if (!act.recurring())
            raw.u[a] = dec.scheduled && act.start_penalized(dec.start) ? 1.0 : 0.0;
        raw.d[a] = dec.scheduled ? day_of_start(dec.start, h) : h.days_upper();
    }
    const std::size_t B = instance.batteries.size();
    raw.x.assign(B, std::vector<double>(static_cast<std::size_t>(h.T), 0.0));
    raw.y.assign(B, std::vector<double>(static_cast<std::size_t>(h.T), 0.0));
    raw.s.assign(B, std::vector<double>(static_cast<std::size_t>(h.T), 0.0));
    for (std::size_t b = 0; b < B; ++b) {
        double state = instance.batteries[b].initial_kwh;
        for (int t = 1; t <= h.T; ++t) {
            const double action = schedule.battery_actions[b][static_cast<std::size_t>(t) - 1];
            raw.x[b][static_cast<std::size_t>(t) - 1] = std::max(action, 0.0);
            raw.y[b][static_cast<std::size_t>(t) - 1] = std::max(-action, 0.0);
            state += 0.25 * instance.batteries[b].max_power_kw * action;
            raw.s[b][static_cast<std::size_t>(t) - 1] = state;
        }
    }
    return raw;
}

namespace {

double lookup(const std::vector<std::pair<int, double>>& values, int slot) {
    for (const auto& [t, v] : values)
        if (t == slot)
            return v;
    return 0.0;
}

} // namespace

std::vector<Violation> check_assignment(const Instance& instance, const RawAssignment& raw) {
    std::vector<Violation> out;
    const Horizon& h = instance.horizon;

    for (std::size_t a = 0; a < instance.activities.size(); ++a) {
        const Activity& act = instance.activities[a];
        // c2: window sum of z equals v at each declared progress slot
        for (const auto& [t, v_val] : raw.v[a]) {
            double window = 0.0;
            for (const auto& [ts, z_val] : raw.z[a])
                if (ts >= t - act.duration + 1 && ts <= t)
                    window += z_val;
            if (std::abs(window - v_val) > kTol)
                out.push_back({"c2", act.id, t, std::abs(window - v_val),
                               "progress indicator inconsistent with starts"});
        }
        // c3: total progress equals duration * w
        double v_sum = 0.0;
        for (const auto& [t, v_val] : raw.v[a])
            v_sum += v_val;
        if (std::abs(v_sum - act.duration * raw.w[a]) > kTol)
            out.push_back({"c3", act.id, 0, std::abs(v_sum - act.duration * raw.w[a]),
                           "progress total inconsistent with duration"});
        // c4: exactly w starts
        double z_sum = 0.0;
        for (const auto& [t, z_val] : raw.z[a])
            z_sum += z_val;
        if (std::abs(z_sum - raw.w[a]) > kTol)
            out.push_back({"c4", act.id, 0, std::abs(z_sum - raw.w[a]),
                           "start total inconsistent with scheduled flag"});
        // c5: penalized indicator
        if (!act.recurring()) {
            double zp = 0.0;
            for (const auto& [t, z_val] : raw.z[a])
                if (act.start_penalized(t))
                    zp += z_val;
            if (std::abs(zp - raw.u[a]) > kTol)
                out.push_back({"c5", act.id, 0, std::abs(zp - raw.u[a]),
                               "penalized indicator inconsistent with starts"});
        }
        // c6: day index definition
        double day = h.days_upper() * (1.0 - raw.w[a]);
        for (const auto& [t, z_val] : raw.z[a])
            day += day_of_start(t, h) * z_val;
        if (std::abs(day - raw.d[a]) > kTol)
            out.push_back({"c6", act.id, 0, std::abs(day - raw.d[a]), "day index inconsistent"});
        // c19: recurring coverage
        if (act.recurring() && std::abs(raw.w[a] - 1.0) > kTol)
            out.push_back({"c19", act.id, 0, std::abs(raw.w[a] - 1.0),
                           "recurring activity not scheduled"});
    }

    // c7/c8: precedence
    for (std::size_t a = 0; a < instance.activities.size(); ++a) {
        const Activity& act = instance.activities[a];
        for (const std::string& pid : act.prerequisites) {
            const int p = instance.activity_index(pid);
            if (p < 0)
                continue;
            const std::size_t pi = static_cast<std::size_t>(p);
            if (raw.d[pi] + raw.w[pi] > raw.d[a] + kTol)
                out.push_back({"c7", act.id, 0, raw.d[pi] + raw.w[pi] - raw.d[a],
                               "no day gap after prerequisite '" + pid + "'"});
            if (raw.w[a] > raw.w[pi] + kTol)
                out.push_back({"c8", act.id, 0, raw.w[a] - raw.w[pi],
                               "prerequisite '" + pid + "' not scheduled"});
        }
    }

    // c9/c10/c11/c20: battery dynamics, exclusion and state bounds
    for (std::size_t b = 0; b < instance.batteries.size(); ++b) {
        const Battery& bat = instance.batteries[b];
        for (int t = 1; t <= h.T; ++t) {
            const std::size_t ti = static_cast<std::size_t>(t) - 1;
            const double prev = t == 1 ? bat.initial_kwh : raw.s[b][ti - 1];
            const double expect = prev + 0.25 * bat.max_power_kw * (raw.x[b][ti] - raw.y[b][ti]);
            if (std::abs(raw.s[b][ti] - expect) > kTol)
                out.push_back({t == 1 ? "c9" : "c10", bat.id, t, std::abs(raw.s[b][ti] - expect),
                               "battery state does not follow dynamics"});
            if (raw.x[b][ti] + raw.y[b][ti] > 1.0 + kTol)
                out.push_back({"c11", bat.id, t, raw.x[b][ti] + raw.y[b][ti] - 1.0,
                               "simultaneous charge and discharge"});
            if (raw.s[b][ti] < -kTol)
                out.push_back({"c20", bat.id, t, -raw.s[b][ti], "battery state below zero"});
            else if (raw.s[b][ti] > bat.capacity_kwh + kTol)
                out.push_back({"c20", bat.id, t, raw.s[b][ti] - bat.capacity_kwh,
                               "battery state above capacity"});
        }
    }

    // c12/c13: room capacities with recurring repetition
    for (int t = 1; t <= h.T; ++t) {
        double small = 0.0;
        double large = 0.0;
        for (std::size_t a = 0; a < instance.activities.size(); ++a) {
            const Activity& act = instance.activities[a];
            const int slot = act.recurring() ? map_to_first_week(t, h) : t;
            const double v_val = lookup(raw.v[a], slot);
            small += act.small_rooms * v_val;
            large += act.large_rooms * v_val;
        }
        if (large > instance.rooms.large + kTol)
            out.push_back({"c12", "", t, large - instance.rooms.large,
                           "large-room demand exceeds capacity"});
        if (small > instance.rooms.small + kTol)
            out.push_back({"c13", "", t, small - instance.rooms.small,
                           "small-room demand exceeds capacity"});
    }
    return out;
}

double compute_mase(const std::vector<double>& forecast, const std::vector<double>& actual,
                    const std::vector<double>& training, int seasonal_period) {
    if (forecast.size() != actual.size() || forecast.empty())
        throw std::invalid_argument("forecast and actual must have equal nonzero length");
    if (seasonal_period < 1 ||
        training.size() <= static_cast<std::size_t>(seasonal_period))
        throw std::invalid_argument("training series must be longer than the seasonal period");

    KahanSum numerator;
    for (std::size_t t = 0; t < forecast.size(); ++t)
        numerator.add(std::abs(forecast[t] - actual[t]));
    const double mae = numerator.value() / static_cast<double>(forecast.size());

    KahanSum denominator;
    const std::size_t m = static_cast<std::size_t>(seasonal_period);
    for (std::size_t t = m; t < training.size(); ++t)
        denominator.add(std::abs(training[t] - training[t - m]));
    const double scale = denominator.value() / static_cast<double>(training.size() - m);
    if (scale == 0.0)
        throw std::invalid_argument("seasonal-naive error on training series is zero");
    return mae / scale;
}

} // namespace schedopt
