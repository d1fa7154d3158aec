//
// Project     : schedopt
// File        : rooms.cpp
// Description : greedy interval room assignment with exact fallback
//

#include "schedopt/rooms.hpp"

#include <algorithm>
#include <stdexcept>

namespace schedopt {

namespace {

struct Demand {
    int activity;              // instance index
    int start;                 // first occupied slot
    int small_needed;
    int large_needed;
    std::vector<int> occupied; // absolute slots, recurring unrolled
};

std::vector<Demand> collect_demands(const Instance& instance, const Schedule& schedule) {
    std::vector<Demand> demands;
    for (std::size_t a = 0; a < instance.activities.size(); ++a) {
        const Activity& act = instance.activities[a];
        const ActivityDecision& dec = schedule.activities[a];
        if (!dec.scheduled || (act.small_rooms == 0 && act.large_rooms == 0))
            continue;
        Demand d{static_cast<int>(a), dec.start, act.small_rooms, act.large_rooms, {}};
        if (act.recurring()) {
            for (int base = 0; base < instance.horizon.T; base += instance.horizon.W)
                for (int t = dec.start; t < dec.start + act.duration; ++t)
                    if (base + t <= instance.horizon.T)
                        d.occupied.push_back(base + t);
        } else {
            for (int t = dec.start; t < dec.start + act.duration && t <= instance.horizon.T; ++t)
                d.occupied.push_back(t);
        }
        demands.push_back(std::move(d));
    }
    std::sort(demands.begin(), demands.end(), [&](const Demand& lhs, const Demand& rhs) {
        if (lhs.start != rhs.start)
            return lhs.start < rhs.start;
        return instance.activities[static_cast<std::size_t>(lhs.activity)].id <
               instance.activities[static_cast<std::size_t>(rhs.activity)].id;
    });
    return demands;
}

class Allocator {
public:
    Allocator(const Instance& instance, std::vector<Demand> demands)
        : instance_(instance), demands_(std::move(demands)),
          small_busy_(static_cast<std::size_t>(instance.rooms.small),
                      std::vector<char>(static_cast<std::size_t>(instance.horizon.T) + 1, 0)),
          large_busy_(static_cast<std::size_t>(instance.rooms.large),
                      std::vector<char>(static_cast<std::size_t>(instance.horizon.T) + 1, 0)) {
        small_picks_.resize(demands_.size());
        large_picks_.resize(demands_.size());
    }

    bool greedy() {
        for (std::size_t i = 0; i < demands_.size(); ++i)
            if (!place_lowest(i))
                return false;
        return true;
    }

    bool exact() {
        reset();
        return search(0);
    }

    RoomAssignment result() const {
        RoomAssignment out;
        for (std::size_t i = 0; i < demands_.size(); ++i) {
            const Demand& d = demands_[i];
            out.entries.push_back({instance_.activities[static_cast<std::size_t>(d.activity)].id,
                                   small_picks_[i], large_picks_[i]});
        }
        std::sort(out.entries.begin(), out.entries.end(),
                  [](const auto& lhs, const auto& rhs) {
                      return lhs.activity_id < rhs.activity_id;
                  });
        return out;
    }

private:
    void reset() {
        for (auto& room : small_busy_)
            std::fill(room.begin(), room.end(), 0);
        for (auto& room : large_busy_)
            std::fill(room.begin(), room.end(), 0);
        for (auto& picks : small_picks_)
            picks.clear();
        for (auto& picks : large_picks_)
            picks.clear();
    }

    bool room_free(const std::vector<std::vector<char>>& busy, int room,
                   const std::vector<int>& slots) const {
        for (int t : slots)
            if (busy[static_cast<std::size_t>(room)][static_cast<std::size_t>(t)])
                return false;
        return true;
    }

    void mark(std::vector<std::vector<char>>& busy, int room, const std::vector<int>& slots,
              char value) {
        for (int t : slots)
            busy[static_cast<std::size_t>(room)][static_cast<std::size_t>(t)] = value;
    }

    bool pick_rooms(std::vector<std::vector<char>>& busy, int count,
                    const std::vector<int>& slots, std::vector<int>& picks) {
        picks.clear();
        for (int room = 0; room < static_cast<int>(busy.size()) &&
                           static_cast<int>(picks.size()) < count;
             ++room)
            if (room_free(busy, room, slots))
                picks.push_back(room);
        if (static_cast<int>(picks.size()) < count)
            return false;
        for (int room : picks)
            mark(busy, room, slots, 1);
        return true;
    }

    bool place_lowest(std::size_t i) {
        const Demand& d = demands_[i];
        if (!pick_rooms(small_busy_, d.small_needed, d.occupied, small_picks_[i]))
            return false;
        if (!pick_rooms(large_busy_, d.large_needed, d.occupied, large_picks_[i])) {
            for (int room : small_picks_[i])
                mark(small_busy_, room, d.occupied, 0);
            small_picks_[i].clear();
            return false;
        }
        for (int& room : small_picks_[i])
            ++room; // expose 1-based ids
        for (int& room : large_picks_[i])
            ++room;
        return true;
    }

    // Backtracking over ascending room combinations; first hit wins, so the
    // result stays deterministic.
    bool search(std::size_t i) {
        if (i == demands_.size())
            return true;
        const Demand& d = demands_[i];
        std::vector<int> small_free, large_free;
        for (int room = 0; room < instance_.rooms.small; ++room)
            if (room_free(small_busy_, room, d.occupied))
                small_free.push_back(room);
        for (int room = 0; room < instance_.rooms.large; ++room)
            if (room_free(large_busy_, room, d.occupied))
                large_free.push_back(room);
        if (static_cast<int>(small_free.size()) < d.small_needed ||
            static_cast<int>(large_free.size()) < d.large_needed)
            return false;

        std::vector<int> small_sel(static_cast<std::size_t>(d.small_needed));
        std::vector<int> large_sel(static_cast<std::size_t>(d.large_needed));
        return combos(small_free, small_sel, 0, 0, [&]() {
            return combos(large_free, large_sel, 0, 0, [&]() {
                for (int room : small_sel)
                    mark(small_busy_, room, d.occupied, 1);
                for (int room : large_sel)
                    mark(large_busy_, room, d.occupied, 1);
                small_picks_[i] = small_sel;
                large_picks_[i] = large_sel;
                for (int& room : small_picks_[i])
                    ++room;
                for (int& room : large_picks_[i])
                    ++room;
                if (search(i + 1))
                    return true;
                for (int room : small_sel)
                    mark(small_busy_, room, d.occupied, 0);
                for (int room : large_sel)
                    mark(large_busy_, room, d.occupied, 0);
                return false;
            });
        });
    }

    template <typename Fn>
    bool combos(const std::vector<int>& pool, std::vector<int>& selection, std::size_t depth,
                std::size_t from, Fn&& fn) {
        if (depth == selection.size())
            return fn();
        for (std::size_t i = from; i + (selection.size() - depth - 1) < pool.size(); ++i) {
            selection[depth] = pool[i];
            if (combos(pool, selection, depth + 1, i + 1, fn))
                return true;
        }
        return false;
    }

    const Instance& instance_;
    std::vector<Demand> demands_;
    std::vector<std::vector<char>> small_busy_, large_busy_;
    std::vector<std::vector<int>> small_picks_, large_picks_;
};

// First slot where aggregate demand exceeds capacity, or 0 if none: such a
// slot means the schedule violated the room-capacity precondition.
int oversubscribed_slot(const Instance& instance, const Schedule& schedule) {
    for (int t = 1; t <= instance.horizon.T; ++t) {
        int small = 0, large = 0;
        for (std::size_t a = 0; a < instance.activities.size(); ++a)
            if (schedule.in_progress(instance, static_cast<int>(a), t)) {
                small += instance.activities[a].small_rooms;
                large += instance.activities[a].large_rooms;
            }
        if (small > instance.rooms.small || large > instance.rooms.large)
            return t;
    }
    return 0;
}

} // namespace

RoomAssignment allocate_rooms(const Instance& instance, const Schedule& schedule) {
    Allocator alloc(instance, collect_demands(instance, schedule));
    if (alloc.greedy())
        return alloc.result();
    if (alloc.exact())
        return alloc.result();
    const int slot = oversubscribed_slot(instance, schedule);
    if (slot > 0)
        throw std::runtime_error("room demand exceeds capacity at slot " + std::to_string(slot));
    throw std::runtime_error("no conflict-free room assignment exists for this schedule");
}

} // namespace schedopt
