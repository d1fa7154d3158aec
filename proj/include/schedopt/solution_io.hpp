//
// Project     : schedopt
// File        : solution_io.hpp
// Description : canonical solution file format
//
// Lines: `start <activity_id> <slot>` (first-week slot for recurring),
// `battery <battery_id> <slot> <charge|discharge>` (idle implicit) and
// optional `room <activity_id> small:<ids> large:<ids>` lines. Canonical
// order: starts by activity id, battery lines by (id, slot), rooms by id.
//

#pragma once

#include "schedopt/instance.hpp"
#include "schedopt/rooms.hpp"
#include "schedopt/schedule.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace schedopt {

struct ParsedSolution {
    Schedule schedule;
    std::optional<RoomAssignment> rooms;
};

ParsedSolution parse_solution(std::string_view text, const Instance& instance);

std::string serialize_solution(const Instance& instance, const Schedule& schedule,
                               const RoomAssignment* rooms = nullptr);

} // namespace schedopt
