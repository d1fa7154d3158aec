//
// Test fixtures: the TI-1 toy instance and seeded random tiny instances.
//
// TI-1: 8 slots (W set to T, the test-only sub-week relaxation), one
// battery (4 kWh, half charged, 4 kW, lossless), one once-off activity
// (2 slots, one small room, 2 kW, revenue 50, penalty 10, starts {1,5}
// with 5 penalized), flat 100 $/MWh prices, flat 10 kW base load.
//

#pragma once

#include "schedopt/instance.hpp"
#include "schedopt/schedule.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace schedopt::testing {

inline Instance ti1() {
    Instance instance;
    instance.horizon = make_test_horizon(8, 4);
    instance.rooms = {1, 1};
    instance.batteries = {{"b1", 4.0, 2.0, 4.0, 1.0}};
    Activity a1;
    a1.id = "a1";
    a1.kind = ActivityKind::OnceOff;
    a1.duration = 2;
    a1.small_rooms = 1;
    a1.large_rooms = 0;
    a1.load_per_room_kw = 2.0;
    a1.revenue = 50.0;
    a1.penalty = 10.0;
    a1.allowed_starts = {1, 5};
    a1.penalized_starts = {5};
    instance.activities = {a1};
    instance.prices.assign(8, 100.0);
    return instance;
}

inline std::vector<double> ti1_base_load() { return std::vector<double>(8, 10.0); }

// TI-1 written in the canonical file format, at a real whole-week horizon.
inline std::string ti1_document() {
    std::string text;
    text += "horizon 672 96\n";
    text += "rooms 1 1\n";
    text += "battery b1 4 2 4 1\n";
    text += "activity a1 onceoff 2 1 0 2 50 10\n";
    text += "starts a1 1 5\n";
    text += "penalized a1 5\n";
    for (int t = 1; t <= 672; ++t)
        text += "price " + std::to_string(t) + " 100\n";
    return text;
}

// Seeded generator for oracle-sized instances: T <= 12 (W = T), at most
// two activities and one battery, loose rooms. Start sets keep the exact
// oracle's enumeration budget small at T = 12.
struct RandomInstanceOptions {
    bool allow_battery = true;
    bool allow_prereq = true;
    bool force_even_starts = false; // guarantee the cold heuristic a parity-feasible start
    int max_activities = 2;
};

inline Instance random_tiny_instance(std::uint64_t seed,
                                     const RandomInstanceOptions& options = {}) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 1);
    const auto pick = [&](int lo, int hi) {
        return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };
    Instance instance;
    const int T = 4 * pick(1, 3); // 4, 8 or 12
    instance.horizon = make_test_horizon(T, 4);
    instance.rooms = {pick(1, 2), pick(0, 1)};

    if (options.allow_battery && pick(0, 9) < 7) {
        Battery b;
        b.id = "b1";
        b.max_power_kw = pick(1, 3);
        b.capacity_kwh = 0.25 * b.max_power_kw * pick(1, 3);
        b.initial_kwh = 0.25 * b.max_power_kw * pick(0, 2);
        if (b.initial_kwh > b.capacity_kwh)
            b.initial_kwh = b.capacity_kwh;
        b.efficiency = pick(0, 1) ? 1.0 : 0.81;
        instance.batteries.push_back(b);
    }

    const int activity_count = pick(1, options.max_activities);
    const int max_starts = T <= 8 ? 4 : 3;
    for (int i = 0; i < activity_count; ++i) {
        Activity a;
        a.id = "a" + std::to_string(i + 1);
        a.kind = pick(0, 2) == 0 ? ActivityKind::Recurring : ActivityKind::OnceOff;
        a.duration = pick(1, 2);
        a.small_rooms = pick(0, 1);
        a.large_rooms = a.small_rooms ? 0 : pick(0, instance.rooms.large > 0 ? 1 : 0);
        a.load_per_room_kw = pick(1, 4);
        if (!a.recurring()) {
            a.revenue = pick(0, 60);
            a.penalty = pick(0, 20);
        }
        const int starts = pick(1, max_starts);
        std::vector<int> candidates;
        for (int t = 1; t + a.duration - 1 <= T; ++t)
            candidates.push_back(t);
        for (int s = 0; s < starts && !candidates.empty(); ++s) {
            const int j = pick(0, static_cast<int>(candidates.size()) - 1);
            a.allowed_starts.push_back(candidates[static_cast<std::size_t>(j)]);
            candidates.erase(candidates.begin() + j);
        }
        std::sort(a.allowed_starts.begin(), a.allowed_starts.end());
        a.allowed_starts.erase(std::unique(a.allowed_starts.begin(), a.allowed_starts.end()),
                               a.allowed_starts.end());
        if (options.force_even_starts) {
            bool has_even = false;
            for (int t : a.allowed_starts)
                has_even = has_even || t % 2 == 0;
            if (!has_even && 2 + a.duration - 1 <= T) {
                a.allowed_starts.push_back(2);
                std::sort(a.allowed_starts.begin(), a.allowed_starts.end());
            }
        }
        if (!a.recurring() && pick(0, 2) == 0 && !a.allowed_starts.empty())
            a.penalized_starts = {a.allowed_starts.back()};
        instance.activities.push_back(std::move(a));
    }
    if (options.allow_prereq && activity_count == 2 && pick(0, 2) == 0 &&
        instance.activities[0].kind == instance.activities[1].kind)
        instance.activities[1].prerequisites = {"a1"};

    instance.prices.resize(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t)
        instance.prices[static_cast<std::size_t>(t)] = pick(-40, 200); // markets go negative
    return instance;
}

inline std::vector<double> random_base_load(std::uint64_t seed, int T) {
    std::mt19937_64 rng(seed * 0x2545f4914f6cdd1dULL + 7);
    std::vector<double> load(static_cast<std::size_t>(T));
    for (auto& v : load)
        v = static_cast<double>(static_cast<int>(rng() % 25)) - 5.0; // in [-5, 19]
    return load;
}

} // namespace schedopt::testing
