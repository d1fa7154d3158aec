//
// Project     : schedopt
// File        : model.cpp
// Description : MILP assembly for the scheduling formulation
//

#include "schedopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace schedopt {

namespace {

constexpr double kEnergyScale = 0.25 / 1000.0;
constexpr double kPeakScale = 0.005;
constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

int MilpModel::find_var(const std::string& name) const {
    const auto it = var_by_name.find(name);
    return it == var_by_name.end() ? -1 : it->second;
}

int MilpModel::num_binary() const {
    return static_cast<int>(std::count_if(vars.begin(), vars.end(),
                                          [](const VarRef& v) { return v.binary; }));
}

Instance preprocess_penalized_starts(const Instance& instance) {
    Instance reduced = instance;
    for (Activity& a : reduced.activities) {
        if (a.recurring() || a.penalized_starts.empty())
            continue;
        if (a.revenue - a.penalty > 0.0)
            continue;
        std::vector<int> kept;
        for (int t : a.allowed_starts)
            if (!a.start_penalized(t))
                kept.push_back(t);
        a.allowed_starts = std::move(kept);
        a.penalized_starts.clear();
    }
    return reduced;
}

BigM compute_big_m(const Instance& instance, const ScenarioSet& scenarios) {
    double base = 0.0;
    for (const auto& series : scenarios.series)
        for (double v : series)
            base = std::max(base, std::abs(v));
    double swing = 0.0;
    for (const Battery& b : instance.batteries)
        swing += b.charge_draw_kw();
    for (const Activity& a : instance.activities)
        swing += std::abs(a.total_load_kw());
    return BigM{static_cast<int>(std::ceil(base + swing - 1e-9))};
}

namespace {

class Builder {
public:
    Builder(const Instance& instance, const ScenarioSet& scenarios, BigM big_m, bool saa_naming)
        : instance_(instance), scenarios_(scenarios), saa_(saa_naming) {
        model_.big_m = big_m.value;
        model_.scenario_count = scenarios.count();
    }

    MilpModel build() {
        declare_variables();
        add_activity_linkage();
        add_precedence();
        add_battery_rows();
        add_room_rows();
        add_scenario_rows();
        add_recurring_rows();
        build_objective();
        return std::move(model_);
    }

private:
    int add_var(VarRef v) {
        const int idx = static_cast<int>(model_.vars.size());
        model_.var_by_name.emplace(v.name, idx);
        model_.vars.push_back(std::move(v));
        return idx;
    }

    std::string scen_suffix(int s) const { return saa_ ? "_s" + std::to_string(s + 1) : ""; }

    void declare_variables() {
        const Horizon& h = instance_.horizon;
        const int B = static_cast<int>(instance_.batteries.size());
        const int A = static_cast<int>(instance_.activities.size());
        const int S = scenarios_.count();
        ModelIndex& ix = model_.index;
        ix.x.assign(B, std::vector<int>(h.T, -1));
        ix.y.assign(B, std::vector<int>(h.T, -1));
        ix.s.assign(B, std::vector<int>(h.T, -1));
        ix.z.resize(A);
        ix.v.resize(A);
        ix.w.assign(A, -1);
        ix.u.assign(A, -1);
        ix.d.assign(A, -1);
        ix.load.assign(S, std::vector<int>(h.T, -1));
        ix.eta.assign(S, -1);
        ix.lambda.assign(S, std::vector<int>(model_.big_m, -1));

        for (int b = 0; b < B; ++b)
            for (int t = 1; t <= h.T; ++t)
                ix.x[b][t - 1] = add_var({VarFamily::X, b, -1, t, -1, -1, true, 0, 1,
                                          "x_b" + std::to_string(b + 1) + "_t" + std::to_string(t)});
        for (int b = 0; b < B; ++b)
            for (int t = 1; t <= h.T; ++t)
                ix.y[b][t - 1] = add_var({VarFamily::Y, b, -1, t, -1, -1, true, 0, 1,
                                          "y_b" + std::to_string(b + 1) + "_t" + std::to_string(t)});
        for (int b = 0; b < B; ++b)
            for (int t = 1; t <= h.T; ++t)
                ix.s[b][t - 1] =
                    add_var({VarFamily::S, b, -1, t, -1, -1, false, 0,
                             instance_.batteries[static_cast<std::size_t>(b)].capacity_kwh,
                             "s_b" + std::to_string(b + 1) + "_t" + std::to_string(t)});
        for (int a = 0; a < A; ++a) {
            const Activity& act = instance_.activities[static_cast<std::size_t>(a)];
            for (int t : act.allowed_starts)
                ix.z[a].push_back({t, add_var({VarFamily::Z, -1, a, t, -1, -1, true, 0, 1,
                                               "z_a" + std::to_string(a + 1) + "_t" +
                                                   std::to_string(t)})});
            for (int t : act.progress_slots(h))
                ix.v[a].push_back({t, add_var({VarFamily::V, -1, a, t, -1, -1, true, 0, 1,
                                               "v_a" + std::to_string(a + 1) + "_t" +
                                                   std::to_string(t)})});
        }
        for (int a = 0; a < A; ++a)
            ix.w[a] = add_var({VarFamily::W, -1, a, -1, -1, -1, true, 0, 1,
                               "w_a" + std::to_string(a + 1)});
        for (int a = 0; a < A; ++a)
            if (!instance_.activities[static_cast<std::size_t>(a)].recurring())
                ix.u[a] = add_var({VarFamily::U, -1, a, -1, -1, -1, true, 0, 1,
                                   "u_a" + std::to_string(a + 1)});
        for (int a = 0; a < A; ++a)
            ix.d[a] = add_var({VarFamily::D, -1, a, -1, -1, -1, false, 0,
                               static_cast<double>(h.days_upper()),
                               "d_a" + std::to_string(a + 1)});
        for (int s = 0; s < S; ++s) {
            for (int t = 1; t <= h.T; ++t)
                ix.load[s][t - 1] = add_var({VarFamily::Load, -1, -1, t, s, -1, false, -kInf, kInf,
                                             "l_t" + std::to_string(t) + scen_suffix(s)});
            ix.eta[s] = add_var({VarFamily::Eta, -1, -1, -1, s, -1, false, 0,
                                 static_cast<double>(model_.big_m), "eta" + scen_suffix(s)});
            for (int i = 1; i <= model_.big_m; ++i)
                ix.lambda[s][i - 1] = add_var({VarFamily::Lambda, -1, -1, -1, s, i, true, 0, 1,
                                               "lam_" + std::to_string(i) + scen_suffix(s)});
        }
    }

    void add_row(std::string name, std::vector<LinTerm> terms, Sense sense, double rhs) {
        model_.cons.push_back({std::move(name), std::move(terms), sense, rhs});
    }

    // Start/progress linkage, penalized indicator, day index.
    void add_activity_linkage() {
        const Horizon& h = instance_.horizon;
        const ModelIndex& ix = model_.index;
        const int A = static_cast<int>(instance_.activities.size());
        for (int a = 0; a < A; ++a) {
            const Activity& act = instance_.activities[static_cast<std::size_t>(a)];
            for (const auto& [t, v_var] : ix.v[a]) {
                std::vector<LinTerm> terms;
                for (const auto& [ts, z_var] : ix.z[a])
                    if (ts >= t - act.duration + 1 && ts <= t)
                        terms.push_back({z_var, 1.0});
                terms.push_back({v_var, -1.0});
                add_row("c2_a" + std::to_string(a + 1) + "_t" + std::to_string(t),
                        std::move(terms), Sense::EQ, 0.0);
            }
        }
        for (int a = 0; a < A; ++a) {
            const Activity& act = instance_.activities[static_cast<std::size_t>(a)];
            std::vector<LinTerm> terms;
            for (const auto& [t, v_var] : ix.v[a])
                terms.push_back({v_var, 1.0});
            terms.push_back({ix.w[a], -static_cast<double>(act.duration)});
            add_row("c3_a" + std::to_string(a + 1), std::move(terms), Sense::EQ, 0.0);
        }
        for (int a = 0; a < A; ++a) {
            std::vector<LinTerm> terms;
            for (const auto& [t, z_var] : ix.z[a])
                terms.push_back({z_var, 1.0});
            terms.push_back({ix.w[a], -1.0});
            add_row("c4_a" + std::to_string(a + 1), std::move(terms), Sense::EQ, 0.0);
        }
        for (int a = 0; a < A; ++a) {
            const Activity& act = instance_.activities[static_cast<std::size_t>(a)];
            if (act.recurring())
                continue;
            std::vector<LinTerm> terms;
            for (const auto& [t, z_var] : ix.z[a])
                if (act.start_penalized(t))
                    terms.push_back({z_var, 1.0});
            terms.push_back({ix.u[a], -1.0});
            add_row("c5_a" + std::to_string(a + 1), std::move(terms), Sense::EQ, 0.0);
        }
        const double day_cap = static_cast<double>(h.days_upper());
        for (int a = 0; a < A; ++a) {
            std::vector<LinTerm> terms;
            for (const auto& [t, z_var] : ix.z[a])
                if (t / h.D != 0)
                    terms.push_back({z_var, static_cast<double>(t / h.D)});
            terms.push_back({ix.w[a], -day_cap});
            terms.push_back({ix.d[a], -1.0});
            add_row("c6_a" + std::to_string(a + 1), std::move(terms), Sense::EQ, -day_cap);
        }
    }

    void add_precedence() {
        const ModelIndex& ix = model_.index;
        const int A = static_cast<int>(instance_.activities.size());
        for (int a = 0; a < A; ++a)
            for (const std::string& pid :
                 instance_.activities[static_cast<std::size_t>(a)].prerequisites) {
                const int p = instance_.activity_index(pid);
                if (p < 0)
                    throw std::invalid_argument("dangling prerequisite '" + pid + "'");
                add_row("c7_a" + std::to_string(a + 1) + "_a" + std::to_string(p + 1),
                        {{ix.d[p], 1.0}, {ix.w[p], 1.0}, {ix.d[a], -1.0}}, Sense::LE, 0.0);
            }
        for (int a = 0; a < A; ++a)
            for (const std::string& pid :
                 instance_.activities[static_cast<std::size_t>(a)].prerequisites) {
                const int p = instance_.activity_index(pid);
                add_row("c8_a" + std::to_string(a + 1) + "_a" + std::to_string(p + 1),
                        {{ix.w[a], 1.0}, {ix.w[p], -1.0}}, Sense::LE, 0.0);
            }
    }

    void add_battery_rows() {
        const Horizon& h = instance_.horizon;
        const ModelIndex& ix = model_.index;
        const int B = static_cast<int>(instance_.batteries.size());
        for (int b = 0; b < B; ++b) {
            const Battery& bat = instance_.batteries[static_cast<std::size_t>(b)];
            const double step = 0.25 * bat.max_power_kw;
            add_row("c9_b" + std::to_string(b + 1),
                    {{ix.s[b][0], 1.0}, {ix.x[b][0], -step}, {ix.y[b][0], step}}, Sense::EQ,
                    bat.initial_kwh);
            for (int t = 2; t <= h.T; ++t)
                add_row("c10_b" + std::to_string(b + 1) + "_t" + std::to_string(t),
                        {{ix.s[b][t - 1], 1.0},
                         {ix.s[b][t - 2], -1.0},
                         {ix.x[b][t - 1], -step},
                         {ix.y[b][t - 1], step}},
                        Sense::EQ, 0.0);
        }
        for (int b = 0; b < B; ++b)
            for (int t = 1; t <= h.T; ++t)
                add_row("c11_b" + std::to_string(b + 1) + "_t" + std::to_string(t),
                        {{ix.x[b][t - 1], 1.0}, {ix.y[b][t - 1], 1.0}}, Sense::LE, 1.0);
    }

    // One row per slot and room size; recurring activities enter through
    // their first-week variables via the [t] mapping.
    void add_room_rows() {
        const Horizon& h = instance_.horizon;
        for (int t = 1; t <= h.T; ++t) {
            std::vector<LinTerm> large, small;
            collect_room_terms(t, large, small);
            if (!large.empty())
                add_row("c12_t" + std::to_string(t), std::move(large), Sense::LE,
                        static_cast<double>(instance_.rooms.large));
            if (!small.empty())
                add_row("c13_t" + std::to_string(t), std::move(small), Sense::LE,
                        static_cast<double>(instance_.rooms.small));
        }
    }

    void collect_room_terms(int t, std::vector<LinTerm>& large, std::vector<LinTerm>& small) {
        const ModelIndex& ix = model_.index;
        const int A = static_cast<int>(instance_.activities.size());
        for (int a = 0; a < A; ++a) {
            const Activity& act = instance_.activities[static_cast<std::size_t>(a)];
            const int slot = act.recurring() ? map_to_first_week(t, instance_.horizon) : t;
            const auto& vs = ix.v[a];
            const auto it = std::lower_bound(vs.begin(), vs.end(), std::pair<int, int>{slot, -1});
            if (it == vs.end() || it->first != slot)
                continue;
            if (act.large_rooms > 0)
                large.push_back({it->second, static_cast<double>(act.large_rooms)});
            if (act.small_rooms > 0)
                small.push_back({it->second, static_cast<double>(act.small_rooms)});
        }
    }

    void add_scenario_rows() {
        const Horizon& h = instance_.horizon;
        const ModelIndex& ix = model_.index;
        const int S = scenarios_.count();
        for (int s = 0; s < S; ++s) {
            for (int t = 1; t <= h.T; ++t) {
                std::vector<LinTerm> terms{{ix.load[s][t - 1], 1.0}};
                for (std::size_t b = 0; b < instance_.batteries.size(); ++b) {
                    const Battery& bat = instance_.batteries[b];
                    const double draw = bat.charge_draw_kw();
                    terms.push_back({ix.x[b][t - 1], -draw});
                    terms.push_back({ix.y[b][t - 1], draw * bat.efficiency});
                }
                for (std::size_t a = 0; a < instance_.activities.size(); ++a) {
                    const Activity& act = instance_.activities[a];
                    if (act.total_load_kw() == 0.0)
                        continue;
                    const int slot = act.recurring() ? map_to_first_week(t, h) : t;
                    const auto& vs = ix.v[a];
                    const auto it =
                        std::lower_bound(vs.begin(), vs.end(), std::pair<int, int>{slot, -1});
                    if (it == vs.end() || it->first != slot)
                        continue;
                    terms.push_back({it->second, -act.total_load_kw()});
                }
                add_row("c14_t" + std::to_string(t) + scen_suffix(s), std::move(terms), Sense::EQ,
                        scenarios_.series[static_cast<std::size_t>(s)][static_cast<std::size_t>(t) - 1]);
            }
            if (model_.big_m > 0) {
                std::vector<LinTerm> sum1, sum2;
                for (int i = 1; i <= model_.big_m; ++i) {
                    sum1.push_back({ix.lambda[s][i - 1], 1.0});
                    sum2.push_back({ix.lambda[s][i - 1], static_cast<double>(i)});
                }
                add_row("c15" + scen_suffix(s), std::move(sum1), Sense::LE, 1.0);
                sum2.push_back({ix.eta[s], -1.0});
                add_row("c16" + scen_suffix(s), std::move(sum2), Sense::GE, 0.0);
            } else {
                add_row("c16" + scen_suffix(s), {{ix.eta[s], -1.0}}, Sense::GE, 0.0);
            }
            for (int t = 1; t <= h.T; ++t)
                add_row("c17_t" + std::to_string(t) + scen_suffix(s),
                        {{ix.eta[s], 1.0}, {ix.load[s][t - 1], -1.0}}, Sense::GE, 0.0);
            for (int t = 1; t <= h.T; ++t)
                add_row("c18_t" + std::to_string(t) + scen_suffix(s),
                        {{ix.eta[s], 1.0}, {ix.load[s][t - 1], 1.0}}, Sense::GE, 0.0);
        }
    }

    void add_recurring_rows() {
        const int A = static_cast<int>(instance_.activities.size());
        for (int a = 0; a < A; ++a)
            if (instance_.activities[static_cast<std::size_t>(a)].recurring())
                add_row("c19_a" + std::to_string(a + 1), {{model_.index.w[a], 1.0}}, Sense::EQ,
                        1.0);
    }

    void build_objective() {
        const Horizon& h = instance_.horizon;
        const ModelIndex& ix = model_.index;
        const int S = scenarios_.count();
        const double weight = 1.0 / static_cast<double>(S);
        for (int s = 0; s < S; ++s) {
            for (int t = 1; t <= h.T; ++t) {
                const double coef =
                    kEnergyScale * weight * instance_.prices[static_cast<std::size_t>(t) - 1];
                if (coef != 0.0)
                    model_.objective.push_back({ix.load[s][t - 1], coef});
            }
            for (int i = 1; i <= model_.big_m; ++i)
                model_.objective.push_back(
                    {ix.lambda[s][i - 1], kPeakScale * weight * static_cast<double>(i) *
                                              static_cast<double>(i)});
        }
        for (std::size_t a = 0; a < instance_.activities.size(); ++a) {
            const Activity& act = instance_.activities[a];
            if (act.recurring())
                continue;
            if (act.revenue != 0.0)
                model_.objective.push_back({ix.w[a], -act.revenue});
            if (act.penalty != 0.0)
                model_.objective.push_back({ix.u[a], act.penalty});
        }
    }

    const Instance& instance_;
    const ScenarioSet& scenarios_;
    bool saa_;
    MilpModel model_;
};

void check_dimensions(const Instance& instance, const ScenarioSet& scenarios) {
    if (scenarios.count() < 1)
        throw std::invalid_argument("at least one scenario required");
    for (const auto& series : scenarios.series)
        if (static_cast<int>(series.size()) != instance.horizon.T)
            throw std::invalid_argument("scenario length does not match horizon");
    if (static_cast<int>(instance.prices.size()) != instance.horizon.T)
        throw std::invalid_argument("price series length does not match horizon");
}

} // namespace

MilpModel build_deterministic(const Instance& instance, const std::vector<double>& base_load,
                              BigM big_m) {
    ScenarioSet one = single_scenario(base_load);
    check_dimensions(instance, one);
    return Builder(instance, one, big_m, /*saa_naming=*/false).build();
}

MilpModel build_saa(const Instance& instance, const ScenarioSet& scenarios, BigM big_m) {
    check_dimensions(instance, scenarios);
    return Builder(instance, scenarios, big_m, /*saa_naming=*/true).build();
}

MilpModel relax_lambda(MilpModel model) {
    for (VarRef& v : model.vars)
        if (v.family == VarFamily::Lambda) {
            v.binary = false;
            v.lb = 0.0;
            v.ub = 1.0;
        }
    return model;
}

MilpModel relax_battery_integrality(MilpModel model) {
    for (VarRef& v : model.vars)
        if (v.family == VarFamily::X || v.family == VarFamily::Y) {
            v.binary = false;
            v.lb = std::max(v.lb, 0.0);
            v.ub = std::min(v.ub, 1.0);
        }
    return model;
}

double lambda_chord_cost(double eta, int big_m) {
    if (eta <= 0.0 || big_m <= 0)
        return 0.0;
    const double clamped = std::min(eta, static_cast<double>(big_m));
    const double k = std::floor(clamped);
    if (k >= big_m)
        return kPeakScale * static_cast<double>(big_m) * static_cast<double>(big_m);
    return kPeakScale * (k * k + (clamped - k) * (2.0 * k + 1.0));
}

} // namespace schedopt
