// SPDX-License-Identifier: Apache-2.0

#ifndef DMM_NUMFMT_HPP
#define DMM_NUMFMT_HPP

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

namespace dmm {

/// Shortest decimal text that reads back as exactly `value`.
inline std::string format_real(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

/// Parses a finite decimal literal with optional sign and exponent. The whole
/// string must be consumed; "inf", "nan" and hex forms are rejected.
inline std::optional<double> parse_real(std::string_view text) {
    if (text.empty())
        return std::nullopt;
    std::size_t i = 0;
    if (text[0] == '+' || text[0] == '-')
        ++i;
    if (i >= text.size() || !(std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.'))
        return std::nullopt;
    // from_chars does not accept a leading '+'
    std::string_view body = text[0] == '+' ? text.substr(1) : text;
    double value = 0;
    auto res = std::from_chars(body.data(), body.data() + body.size(), value,
                               std::chars_format::general);
    if (res.ec != std::errc{} || res.ptr != body.data() + body.size() || !std::isfinite(value))
        return std::nullopt;
    return value;
}

/// Parses a non-negative decimal integer with no sign.
template <class Int>
std::optional<Int> parse_uint(std::string_view text) {
    if (text.empty() || !std::isdigit(static_cast<unsigned char>(text[0])))
        return std::nullopt;
    Int value{};
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        return std::nullopt;
    return value;
}

} // namespace dmm

#endif // DMM_NUMFMT_HPP
