#include "schedopt/schedule.hpp"

#include <cmath>

namespace schedopt {

Schedule Schedule::empty_for(const Instance& instance) {
    Schedule s;
    s.activities.assign(instance.activities.size(), ActivityDecision{});
    s.battery_actions.assign(instance.batteries.size(),
                             std::vector<double>(static_cast<std::size_t>(instance.horizon.T), kIdle));
    return s;
}

bool Schedule::in_progress(const Instance& instance, int activity, int slot) const {
    const ActivityDecision& d = activities[static_cast<std::size_t>(activity)];
    if (!d.scheduled)
        return false;
    const Activity& a = instance.activities[static_cast<std::size_t>(activity)];
    const int t = a.recurring() ? map_to_first_week(slot, instance.horizon) : slot;
    return t >= d.start && t < d.start + a.duration;
}

namespace {

int action_rank(double a) {
    if (a == 0.0)
        return 0;
    return a > 0.0 ? 1 : 2;
}

} // namespace

bool Schedule::lex_less(const Schedule& other) const {
    for (std::size_t i = 0; i < activities.size(); ++i) {
        const int lhs = activities[i].scheduled ? activities[i].start : 0;
        const int rhs = other.activities[i].scheduled ? other.activities[i].start : 0;
        if (lhs != rhs)
            return lhs < rhs;
    }
    const std::size_t T = battery_actions.empty() ? 0 : battery_actions.front().size();
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t b = 0; b < battery_actions.size(); ++b) {
            const int lhs = action_rank(battery_actions[b][t]);
            const int rhs = action_rank(other.battery_actions[b][t]);
            if (lhs != rhs)
                return lhs < rhs;
            if (battery_actions[b][t] != other.battery_actions[b][t])
                return std::abs(battery_actions[b][t]) < std::abs(other.battery_actions[b][t]);
        }
    return false;
}

bool Schedule::operator==(const Schedule& other) const {
    for (std::size_t i = 0; i < activities.size(); ++i) {
        if (activities[i].scheduled != other.activities[i].scheduled)
            return false;
        if (activities[i].scheduled && activities[i].start != other.activities[i].start)
            return false;
    }
    return battery_actions == other.battery_actions;
}

} // namespace schedopt
