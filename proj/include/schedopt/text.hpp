//
// Project     : schedopt
// File        : text.hpp
// Description : strict number parsing and deterministic formatting
//

#pragma once

#include <string>
#include <string_view>

namespace schedopt {

// Shortest representation that round-trips through parse_double.
std::string format_double(double value);

bool parse_double(std::string_view token, double& out);
bool parse_int(std::string_view token, long long& out);

} // namespace schedopt
