// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mlcspace {

// Shortest decimal text that parses back to the same double.
inline std::string format_real(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, end};
}

inline std::optional<double> parse_real(std::string_view s)
{
    double v {};
    auto const* first = s.data();
    if (!s.empty() && s.front() == '+') { ++first; }
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc {} || ptr != s.data() + s.size() || s.empty()) { return std::nullopt; }
    return v;
}

inline std::optional<std::int64_t> parse_int(std::string_view s)
{
    std::int64_t v {};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc {} || ptr != s.data() + s.size() || s.empty()) { return std::nullopt; }
    return v;
}

} // namespace mlcspace
