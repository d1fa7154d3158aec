//
// Project     : schedopt
// File        : instance.hpp
// Description : problem data model, canonical text format, validation
//

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace schedopt {

// Planning horizon in 15-minute slots. Slots are 1-indexed.
// W == 7*D for real instances; test fixtures may set W == T to allow
// sub-week toy horizons (see make_test_horizon).
struct Horizon {
    int T = 0; // slots in planning horizon
    int D = 0; // slots per day
    int W = 0; // slots per week

    int days_upper() const; // ceil((T+1)/D), the day index of "not scheduled"
};

// Maps slot t in {1..T} to the corresponding slot of the first week.
int map_to_first_week(int t, const Horizon& horizon);

Horizon make_horizon(int T, int D);      // W = 7*D
Horizon make_test_horizon(int T, int D); // W = T, toy instances only

struct Battery {
    std::string id;
    double capacity_kwh = 0.0;
    double initial_kwh = 0.0;
    double max_power_kw = 0.0;
    double efficiency = 1.0;

    // Grid-side power while charging (kW): max_power / sqrt(efficiency).
    double charge_draw_kw() const;
    // Grid-side power while discharging (kW): max_power * sqrt(efficiency).
    double discharge_supply_kw() const;
    // Battery-side energy moved per slot (kWh): 0.25 * max_power.
    double slot_energy_kwh() const;
};

enum class ActivityKind { Recurring, OnceOff };

struct Activity {
    std::string id;
    ActivityKind kind = ActivityKind::OnceOff;
    int duration = 1;    // slots
    int small_rooms = 0; // rooms needed per occurrence
    int large_rooms = 0;
    double load_per_room_kw = 0.0;
    double revenue = 0.0; // once-off only
    double penalty = 0.0; // once-off only
    std::vector<int> allowed_starts;   // T'_a, sorted ascending
    std::vector<int> penalized_starts; // T''_a subset of T'_a, once-off only
    std::vector<std::string> prerequisites;

    bool recurring() const { return kind == ActivityKind::Recurring; }
    double total_load_kw() const { return load_per_room_kw * (small_rooms + large_rooms); }
    // Union of start windows: the slots where the activity can be in progress.
    // First-week slots for recurring activities, absolute slots otherwise.
    std::vector<int> progress_slots(const Horizon& horizon) const;
    bool start_allowed(int t) const;
    bool start_penalized(int t) const;
};

struct Rooms {
    int small = 0;
    int large = 0;
};

struct Instance {
    Horizon horizon;
    Rooms rooms;
    std::vector<Battery> batteries;
    std::vector<Activity> activities;
    std::vector<double> prices; // pi_t in $/MWh, length T

    int battery_index(std::string_view id) const;  // -1 if unknown
    int activity_index(std::string_view id) const; // -1 if unknown
};

// Net base load per slot per scenario (kW, may be negative).
struct ScenarioSet {
    std::vector<std::vector<double>> series; // [scenario][slot], each of length T

    int count() const { return static_cast<int>(series.size()); }
    int num_slots() const { return series.empty() ? 0 : static_cast<int>(series.front().size()); }
};

ScenarioSet single_scenario(std::vector<double> load);

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string entity;  // offending id, or "" for instance-level issues
    std::string message; // names the violated invariant
};

// Empty (ignoring warnings) iff all type invariants hold.
std::vector<Diagnostic> validate_instance(const Instance& instance);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

// Strict parser for the canonical line format. Throws ParseError with a
// line number on syntax errors and on any validation error.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what);
    int line() const { return line_; }

private:
    int line_ = 0;
};

Instance parse_instance(std::string_view text);

// Syntax-only parse; callers that want the full diagnostic list run
// validate_instance themselves.
Instance parse_instance_syntactic(std::string_view text);

std::string serialize_instance(const Instance& instance);

} // namespace schedopt
