#include "termdp/ext_cost.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace termdp {

std::string to_string(ExtCost c) {
    if (c.is_infinite()) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", c.value());
    return buf;
}

ExtCost parse_ext_cost(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    std::string lowered(text);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (lowered == "inf" || lowered == "+inf" || lowered == "infinity") return ExtCost::infinity();

    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || text.empty())
        throw std::invalid_argument("not a cost value: '" + std::string(text) + "'");
    return ExtCost(v);
}

std::ostream& operator<<(std::ostream& os, ExtCost c) { return os << to_string(c); }

}  // namespace termdp
