//
// Project     : schedopt
// File        : rooms.hpp
// Description : post-processing assignment of concrete rooms
//

#pragma once

#include "schedopt/instance.hpp"
#include "schedopt/schedule.hpp"

#include <string>
#include <vector>

namespace schedopt {

// Concrete rooms held by each scheduled activity for its entire duration;
// recurring activities use the same rooms every week. Room ids are 1-based
// per size class.
struct RoomAssignment {
    struct Entry {
        std::string activity_id;
        std::vector<int> small_rooms;
        std::vector<int> large_rooms;
    };
    std::vector<Entry> entries; // sorted by activity id
};

// Greedy lowest-free-room assignment over activities sorted by start slot,
// with an exact backtracking fallback for the rare cases greedy misses.
// Requires a schedule that passes check_feasibility; throws
// std::runtime_error when no conflict-free assignment exists.
RoomAssignment allocate_rooms(const Instance& instance, const Schedule& schedule);

} // namespace schedopt
