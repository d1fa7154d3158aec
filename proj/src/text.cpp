#include "schedopt/text.hpp"

#include <charconv>
#include <cmath>

namespace schedopt {

std::string format_double(double value) {
    if (value == 0.0)
        return "0"; // normalize -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

bool parse_double(std::string_view token, double& out) {
    if (token.empty())
        return false;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

bool parse_int(std::string_view token, long long& out) {
    if (token.empty())
        return false;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

} // namespace schedopt
