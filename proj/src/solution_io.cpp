#include "schedopt/solution_io.hpp"
#include "schedopt/text.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace schedopt {

namespace {

std::vector<int> parse_room_list(const std::string& token, const std::string& prefix,
                                 int line_no) {
    if (token.rfind(prefix, 0) != 0)
        throw std::runtime_error("solution line " + std::to_string(line_no) + ": expected '" +
                                 prefix + "...'");
    std::vector<int> rooms;
    std::string body = token.substr(prefix.size());
    std::size_t pos = 0;
    while (pos < body.size()) {
        std::size_t comma = body.find(',', pos);
        if (comma == std::string::npos)
            comma = body.size();
        long long id;
        if (!parse_int(body.substr(pos, comma - pos), id) || id < 1)
            throw std::runtime_error("solution line " + std::to_string(line_no) +
                                     ": bad room id in '" + token + "'");
        rooms.push_back(static_cast<int>(id));
        pos = comma + 1;
    }
    return rooms;
}

} // namespace

ParsedSolution parse_solution(std::string_view text, const Instance& instance) {
    ParsedSolution out;
    out.schedule = Schedule::empty_for(instance);
    std::map<std::string, RoomAssignment::Entry> room_entries;

    std::istringstream stream{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        std::istringstream tokens(line);
        std::string head;
        if (!(tokens >> head))
            continue;
        if (head == "start") {
            std::string id;
            int slot;
            if (!(tokens >> id >> slot))
                throw std::runtime_error("solution line " + std::to_string(line_no) +
                                         ": expected 'start <id> <slot>'");
            const int a = instance.activity_index(id);
            if (a < 0)
                throw std::runtime_error("solution line " + std::to_string(line_no) +
                                         ": unknown activity '" + id + "'");
            ActivityDecision& dec = out.schedule.activities[static_cast<std::size_t>(a)];
            if (dec.scheduled)
                throw std::runtime_error("solution line " + std::to_string(line_no) +
                                         ": duplicate start for '" + id + "'");
            dec = {true, slot};
        } else if (head == "battery") {
            std::string id, action;
            int slot;
            if (!(tokens >> id >> slot >> action))
                throw std::runtime_error("solution line " + std::to_string(line_no) +
                                         ": expected 'battery <id> <slot> <charge|discharge>'");
            const int b = instance.battery_index(id);
            if (b < 0)
                throw std::runtime_error("solution line " + std::to_string(line_no) +
                                         ": unknown battery '" + id + "'");
            if (slot < 1 || slot > instance.horizon.T)
                throw std::runtime_error("solution line " + std::to_string(line_no) +
                                         ": slot outside horizon");
            double& cell =
                out.schedule.battery_actions[static_cast<std::size_t>(b)][static_cast<std::size_t>(slot) - 1];
            if (cell != kIdle)
                throw std::runtime_error("solution line " + std::to_string(line_no) +
                                         ": duplicate action for '" + id + "' slot " +
                                         std::to_string(slot));
            if (action == "charge")
                cell = kCharge;
            else if (action == "discharge")
                cell = kDischarge;
            else
                throw std::runtime_error("solution line " + std::to_string(line_no) +
                                         ": action must be charge or discharge");
        } else if (head == "room") {
            std::string id, small_tok, large_tok;
            if (!(tokens >> id >> small_tok >> large_tok))
                throw std::runtime_error("solution line " + std::to_string(line_no) +
                                         ": expected 'room <id> small:<ids> large:<ids>'");
            if (instance.activity_index(id) < 0)
                throw std::runtime_error("solution line " + std::to_string(line_no) +
                                         ": unknown activity '" + id + "'");
            RoomAssignment::Entry entry;
            entry.activity_id = id;
            entry.small_rooms = parse_room_list(small_tok, "small:", line_no);
            entry.large_rooms = parse_room_list(large_tok, "large:", line_no);
            room_entries[id] = std::move(entry);
        } else {
            throw std::runtime_error("solution line " + std::to_string(line_no) +
                                     ": unknown directive '" + head + "'");
        }
    }
    if (!room_entries.empty()) {
        RoomAssignment rooms;
        for (auto& [id, entry] : room_entries)
            rooms.entries.push_back(std::move(entry));
        out.rooms = std::move(rooms);
    }
    return out;
}

std::string serialize_solution(const Instance& instance, const Schedule& schedule,
                               const RoomAssignment* rooms) {
    std::vector<std::pair<std::string, int>> starts;
    for (std::size_t a = 0; a < instance.activities.size(); ++a)
        if (schedule.activities[a].scheduled)
            starts.push_back({instance.activities[a].id, schedule.activities[a].start});
    std::sort(starts.begin(), starts.end());

    std::string out;
    for (const auto& [id, slot] : starts)
        out += "start " + id + " " + std::to_string(slot) + "\n";

    std::vector<std::size_t> battery_order(instance.batteries.size());
    for (std::size_t b = 0; b < battery_order.size(); ++b)
        battery_order[b] = b;
    std::sort(battery_order.begin(), battery_order.end(), [&](std::size_t lhs, std::size_t rhs) {
        return instance.batteries[lhs].id < instance.batteries[rhs].id;
    });
    for (std::size_t b : battery_order)
        for (int t = 1; t <= instance.horizon.T; ++t) {
            const double action = schedule.battery_actions[b][static_cast<std::size_t>(t) - 1];
            if (action > 0)
                out += "battery " + instance.batteries[b].id + " " + std::to_string(t) + " charge\n";
            else if (action < 0)
                out += "battery " + instance.batteries[b].id + " " + std::to_string(t) +
                       " discharge\n";
        }

    if (rooms) {
        auto sorted = rooms->entries;
        std::sort(sorted.begin(), sorted.end(),
                  [](const auto& lhs, const auto& rhs) { return lhs.activity_id < rhs.activity_id; });
        for (const auto& entry : sorted) {
            out += "room " + entry.activity_id + " small:";
            for (std::size_t i = 0; i < entry.small_rooms.size(); ++i)
                out += (i ? "," : "") + std::to_string(entry.small_rooms[i]);
            out += " large:";
            for (std::size_t i = 0; i < entry.large_rooms.size(); ++i)
                out += (i ? "," : "") + std::to_string(entry.large_rooms[i]);
            out += "\n";
        }
    }
    return out;
}

} // namespace schedopt
