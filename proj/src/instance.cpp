//
// Project     : schedopt
// File        : instance.cpp
// Description : instance parsing, serialization and validation
//

#include "schedopt/instance.hpp"
#include "schedopt/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace schedopt {

int Horizon::days_upper() const {
    return static_cast<int>((static_cast<long long>(T) + 1 + D - 1) / D);
}

int map_to_first_week(int t, const Horizon& horizon) {
    if (t < 1 || t > horizon.T)
        throw std::out_of_range("slot " + std::to_string(t) + " outside horizon 1.." +
                                std::to_string(horizon.T));
    return (t - 1) % horizon.W + 1;
}

Horizon make_horizon(int T, int D) { return Horizon{T, D, 7 * D}; }

Horizon make_test_horizon(int T, int D) { return Horizon{T, D, T}; }

double Battery::charge_draw_kw() const { return max_power_kw / std::sqrt(efficiency); }

double Battery::discharge_supply_kw() const { return max_power_kw * std::sqrt(efficiency); }

double Battery::slot_energy_kwh() const { return 0.25 * max_power_kw; }

std::vector<int> Activity::progress_slots(const Horizon& horizon) const {
    std::set<int> slots;
    for (int start : allowed_starts)
        for (int t = start; t < start + duration; ++t)
            if (t >= 1 && t <= (recurring() ? horizon.W : horizon.T))
                slots.insert(t);
    return std::vector<int>(slots.begin(), slots.end());
}

bool Activity::start_allowed(int t) const {
    return std::binary_search(allowed_starts.begin(), allowed_starts.end(), t);
}

bool Activity::start_penalized(int t) const {
    return std::binary_search(penalized_starts.begin(), penalized_starts.end(), t);
}

int Instance::battery_index(std::string_view id) const {
    for (std::size_t i = 0; i < batteries.size(); ++i)
        if (batteries[i].id == id)
            return static_cast<int>(i);
    return -1;
}

int Instance::activity_index(std::string_view id) const {
    for (std::size_t i = 0; i < activities.size(); ++i)
        if (activities[i].id == id)
            return static_cast<int>(i);
    return -1;
}

ScenarioSet single_scenario(std::vector<double> load) {
    ScenarioSet set;
    set.series.push_back(std::move(load));
    return set;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

namespace {

void check_starts(const Instance& instance, const Activity& a, std::vector<Diagnostic>& out) {
    const int limit = a.recurring() ? instance.horizon.W : instance.horizon.T;
    for (int t : a.allowed_starts) {
        if (t < 1 || t > limit) {
            out.push_back({Severity::Error, a.id,
                           "start slot " + std::to_string(t) + " outside 1.." + std::to_string(limit)});
        } else if (t + a.duration - 1 > limit) {
            out.push_back({Severity::Error, a.id,
                           "start slot " + std::to_string(t) + " does not fit duration " +
                               std::to_string(a.duration) + " before slot " + std::to_string(limit)});
        }
    }
    for (int t : a.penalized_starts)
        if (!a.start_allowed(t)) {
            out.push_back({Severity::Error, a.id, "penalized starts not subset of allowed starts"});
            break;
        }
}

// Cycle detection over the prerequisite graph, iterative DFS.
void check_cycles(const Instance& instance, std::vector<Diagnostic>& out) {
    const int n = static_cast<int>(instance.activities.size());
    std::vector<int> state(n, 0); // 0 unseen, 1 on stack, 2 done
    std::vector<std::pair<int, std::size_t>> stack;
    for (int root = 0; root < n; ++root) {
        if (state[root] != 0)
            continue;
        stack.push_back({root, 0});
        state[root] = 1;
        while (!stack.empty()) {
            auto& [node, edge] = stack.back();
            const auto& prereqs = instance.activities[node].prerequisites;
            if (edge == prereqs.size()) {
                state[node] = 2;
                stack.pop_back();
                continue;
            }
            const int next = instance.activity_index(prereqs[edge++]);
            if (next < 0)
                continue; // dangling reference reported separately
            if (state[next] == 1) {
                out.push_back({Severity::Error, instance.activities[node].id, "precedence cycle"});
                return;
            }
            if (state[next] == 0) {
                stack.push_back({next, 0});
                state[next] = 1;
            }
        }
    }
}

} // namespace

std::vector<Diagnostic> validate_instance(const Instance& instance) {
    std::vector<Diagnostic> out;
    const Horizon& h = instance.horizon;

    if (h.T < 1)
        out.push_back({Severity::Error, "", "horizon T must be >= 1"});
    if (h.D < 1)
        out.push_back({Severity::Error, "", "horizon D must be >= 1"});
    if (h.W != 7 * h.D)
        out.push_back({Severity::Error, "", "W must equal 7*D"});
    if (h.W >= 1 && h.T % h.W != 0)
        out.push_back({Severity::Error, "", "horizon not whole weeks"});
    if (instance.rooms.small < 0 || instance.rooms.large < 0)
        out.push_back({Severity::Error, "", "room counts must be non-negative"});
    if (static_cast<int>(instance.prices.size()) != h.T)
        out.push_back({Severity::Error, "",
                       "expected " + std::to_string(h.T) + " price lines, got " +
                           std::to_string(instance.prices.size())});

    std::set<std::string> battery_ids;
    for (const Battery& b : instance.batteries) {
        if (!battery_ids.insert(b.id).second)
            out.push_back({Severity::Error, b.id, "duplicate battery id"});
        if (b.efficiency <= 0.0 || b.efficiency > 1.0)
            out.push_back({Severity::Error, b.id, "efficiency out of (0,1]"});
        if (b.max_power_kw <= 0.0)
            out.push_back({Severity::Error, b.id, "max power must be positive"});
        if (b.initial_kwh < 0.0 || b.initial_kwh > b.capacity_kwh)
            out.push_back({Severity::Error, b.id, "initial energy outside [0, capacity]"});
    }

    std::set<std::string> activity_ids;
    for (const Activity& a : instance.activities) {
        if (!activity_ids.insert(a.id).second)
            out.push_back({Severity::Error, a.id, "duplicate activity id"});
        if (a.duration < 1)
            out.push_back({Severity::Error, a.id, "duration must be >= 1"});
        if (a.small_rooms < 0 || a.large_rooms < 0)
            out.push_back({Severity::Error, a.id, "room requirements must be non-negative"});
        if (a.recurring() && (a.revenue != 0.0 || a.penalty != 0.0))
            out.push_back({Severity::Error, a.id, "recurring activities carry no revenue or penalty"});
        if (a.recurring() && !a.penalized_starts.empty())
            out.push_back({Severity::Error, a.id, "penalized starts are defined for once-off activities only"});
        check_starts(instance, a, out);
        for (const std::string& p : a.prerequisites) {
            const int idx = instance.activity_index(p);
            if (idx < 0) {
                out.push_back({Severity::Error, a.id, "dangling prerequisite '" + p + "'"});
            } else if (instance.activities[idx].kind != a.kind) {
                out.push_back({Severity::Warning, a.id,
                               "mixed-kind precedence with '" + p + "'"});
            }
            if (p == a.id)
                out.push_back({Severity::Error, a.id, "precedence cycle"});
        }
    }
    check_cycles(instance, out);
    return out;
}

ParseError::ParseError(int line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

struct LineTokens {
    int line = 0;
    std::vector<std::string> tokens;
};

std::vector<LineTokens> tokenize(std::string_view text) {
    std::vector<LineTokens> lines;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
        ++line_no;
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        LineTokens lt{line_no, {}};
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
                ++i;
            std::size_t j = i;
            while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
                ++j;
            if (j > i)
                lt.tokens.emplace_back(line.substr(i, j - i));
            i = j;
        }
        if (!lt.tokens.empty())
            lines.push_back(std::move(lt));
    }
    return lines;
}

int parse_int_tok(const LineTokens& lt, std::size_t idx, const char* what) {
    long long v;
    if (idx >= lt.tokens.size() || !parse_int(lt.tokens[idx], v))
        throw ParseError(lt.line, std::string("expected integer ") + what);
    if (v < -1000000000LL || v > 1000000000LL)
        throw ParseError(lt.line, std::string(what) + " out of range");
    return static_cast<int>(v);
}

double parse_double_tok(const LineTokens& lt, std::size_t idx, const char* what) {
    double v;
    if (idx >= lt.tokens.size() || !parse_double(lt.tokens[idx], v))
        throw ParseError(lt.line, std::string("expected number ") + what);
    return v;
}

void expect_arity(const LineTokens& lt, std::size_t n) {
    if (lt.tokens.size() != n)
        throw ParseError(lt.line, "directive '" + lt.tokens[0] + "' takes " +
                                      std::to_string(n - 1) + " arguments");
}

} // namespace

namespace {

Instance parse_impl(std::string_view text, std::map<std::string, int>* declaration_lines) {
    Instance instance;
    bool have_horizon = false;
    bool have_rooms = false;
    std::vector<char> price_seen;
    std::map<std::string, int> activity_line; // first declaration line per id

    for (const LineTokens& lt : tokenize(text)) {
        const std::string& head = lt.tokens[0];
        if (head == "horizon") {
            expect_arity(lt, 3);
            if (have_horizon)
                throw ParseError(lt.line, "duplicate horizon directive");
            instance.horizon = make_horizon(parse_int_tok(lt, 1, "T"), parse_int_tok(lt, 2, "D"));
            if (instance.horizon.T < 1 || instance.horizon.D < 1)
                throw ParseError(lt.line, "horizon values must be >= 1");
            price_seen.assign(static_cast<std::size_t>(instance.horizon.T) + 1, 0);
            have_horizon = true;
            continue;
        }
        if (!have_horizon)
            throw ParseError(lt.line, "horizon must precede '" + head + "'");
        if (head == "rooms") {
            expect_arity(lt, 3);
            if (have_rooms)
                throw ParseError(lt.line, "duplicate rooms directive");
            instance.rooms = Rooms{parse_int_tok(lt, 1, "small count"), parse_int_tok(lt, 2, "large count")};
            have_rooms = true;
        } else if (head == "battery") {
            expect_arity(lt, 6);
            Battery b;
            b.id = lt.tokens[1];
            b.capacity_kwh = parse_double_tok(lt, 2, "capacity");
            b.initial_kwh = parse_double_tok(lt, 3, "initial energy");
            b.max_power_kw = parse_double_tok(lt, 4, "max power");
            b.efficiency = parse_double_tok(lt, 5, "efficiency");
            if (instance.battery_index(b.id) >= 0)
                throw ParseError(lt.line, "duplicate battery '" + b.id + "'");
            instance.batteries.push_back(std::move(b));
        } else if (head == "activity") {
            expect_arity(lt, 9);
            Activity a;
            a.id = lt.tokens[1];
            if (lt.tokens[2] == "recurring")
                a.kind = ActivityKind::Recurring;
            else if (lt.tokens[2] == "onceoff")
                a.kind = ActivityKind::OnceOff;
            else
                throw ParseError(lt.line, "activity kind must be 'recurring' or 'onceoff'");
            a.duration = parse_int_tok(lt, 3, "duration");
            a.small_rooms = parse_int_tok(lt, 4, "small rooms");
            a.large_rooms = parse_int_tok(lt, 5, "large rooms");
            a.load_per_room_kw = parse_double_tok(lt, 6, "load per room");
            a.revenue = parse_double_tok(lt, 7, "revenue");
            a.penalty = parse_double_tok(lt, 8, "penalty");
            if (instance.activity_index(a.id) >= 0)
                throw ParseError(lt.line, "duplicate activity '" + a.id + "'");
            activity_line[a.id] = lt.line;
            instance.activities.push_back(std::move(a));
        } else if (head == "starts" || head == "penalized") {
            if (lt.tokens.size() < 2)
                throw ParseError(lt.line, "directive '" + head + "' needs an activity id");
            const int idx = instance.activity_index(lt.tokens[1]);
            if (idx < 0)
                throw ParseError(lt.line, "unknown activity '" + lt.tokens[1] + "'");
            std::vector<int>& dest = head == "starts" ? instance.activities[idx].allowed_starts
                                                      : instance.activities[idx].penalized_starts;
            if (!dest.empty())
                throw ParseError(lt.line, "duplicate '" + head + "' for activity '" + lt.tokens[1] + "'");
            for (std::size_t i = 2; i < lt.tokens.size(); ++i)
                dest.push_back(parse_int_tok(lt, i, "slot"));
            std::sort(dest.begin(), dest.end());
            if (std::adjacent_find(dest.begin(), dest.end()) != dest.end())
                throw ParseError(lt.line, "repeated slot in '" + head + "'");
        } else if (head == "prereq") {
            if (lt.tokens.size() < 3)
                throw ParseError(lt.line, "prereq needs an activity id and at least one prerequisite");
            const int idx = instance.activity_index(lt.tokens[1]);
            if (idx < 0)
                throw ParseError(lt.line, "unknown activity '" + lt.tokens[1] + "'");
            auto& dest = instance.activities[idx].prerequisites;
            for (std::size_t i = 2; i < lt.tokens.size(); ++i)
                dest.push_back(lt.tokens[i]);
        } else if (head == "price") {
            expect_arity(lt, 3);
            const int slot = parse_int_tok(lt, 1, "slot");
            if (slot < 1 || slot > instance.horizon.T)
                throw ParseError(lt.line, "price slot " + std::to_string(slot) + " outside horizon");
            if (price_seen[static_cast<std::size_t>(slot)])
                throw ParseError(lt.line, "duplicate price for slot " + std::to_string(slot));
            price_seen[static_cast<std::size_t>(slot)] = 1;
            if (instance.prices.size() < static_cast<std::size_t>(instance.horizon.T))
                instance.prices.resize(static_cast<std::size_t>(instance.horizon.T), 0.0);
            instance.prices[static_cast<std::size_t>(slot) - 1] = parse_double_tok(lt, 2, "price");
        } else {
            throw ParseError(lt.line, "unknown directive '" + head + "'");
        }
    }

    if (!have_horizon)
        throw ParseError(1, "missing horizon directive");
    if (!have_rooms)
        throw ParseError(1, "missing rooms directive");
    const std::size_t priced =
        static_cast<std::size_t>(std::count(price_seen.begin(), price_seen.end(), 1));
    if (priced != static_cast<std::size_t>(instance.horizon.T))
        throw ParseError(1, "expected " + std::to_string(instance.horizon.T) + " price lines, got " +
                                std::to_string(priced));
    if (declaration_lines)
        *declaration_lines = std::move(activity_line);
    return instance;
}

} // namespace

Instance parse_instance_syntactic(std::string_view text) { return parse_impl(text, nullptr); }

Instance parse_instance(std::string_view text) {
    std::map<std::string, int> lines;
    Instance instance = parse_impl(text, &lines);
    const auto diagnostics = validate_instance(instance);
    for (const Diagnostic& d : diagnostics)
        if (d.severity == Severity::Error) {
            const auto it = lines.find(d.entity);
            throw ParseError(it == lines.end() ? 1 : it->second,
                             d.entity.empty() ? d.message : d.entity + ": " + d.message);
        }
    return instance;
}

std::string serialize_instance(const Instance& instance) {
    std::string out;
    out += "horizon " + std::to_string(instance.horizon.T) + " " + std::to_string(instance.horizon.D) + "\n";
    out += "rooms " + std::to_string(instance.rooms.small) + " " + std::to_string(instance.rooms.large) + "\n";
    for (const Battery& b : instance.batteries)
        out += "battery " + b.id + " " + format_double(b.capacity_kwh) + " " + format_double(b.initial_kwh) +
               " " + format_double(b.max_power_kw) + " " + format_double(b.efficiency) + "\n";
    for (const Activity& a : instance.activities) {
        out += "activity " + a.id + " " + (a.recurring() ? "recurring" : "onceoff") + " " +
               std::to_string(a.duration) + " " + std::to_string(a.small_rooms) + " " +
               std::to_string(a.large_rooms) + " " + format_double(a.load_per_room_kw) + " " +
               format_double(a.revenue) + " " + format_double(a.penalty) + "\n";
        if (!a.allowed_starts.empty()) {
            out += "starts " + a.id;
            for (int t : a.allowed_starts)
                out += " " + std::to_string(t);
            out += "\n";
        }
        if (!a.penalized_starts.empty()) {
            out += "penalized " + a.id;
            for (int t : a.penalized_starts)
                out += " " + std::to_string(t);
            out += "\n";
        }
        if (!a.prerequisites.empty()) {
            out += "prereq " + a.id;
            for (const std::string& p : a.prerequisites)
                out += " " + p;
            out += "\n";
        }
    }
    for (int t = 1; t <= instance.horizon.T; ++t)
        out += "price " + std::to_string(t) + " " + format_double(instance.prices[static_cast<std::size_t>(t) - 1]) + "\n";
    return out;
}

} // namespace schedopt
