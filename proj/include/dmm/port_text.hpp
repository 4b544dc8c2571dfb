// SPDX-License-Identifier: Apache-2.0

#ifndef DMM_PORT_TEXT_HPP
#define DMM_PORT_TEXT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "numfmt.hpp"
#include "ports.hpp"
#include "stream.hpp"

namespace dmm {

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos)
            return parts;
        start = pos + 1;
    }
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

} // namespace detail

/// "type.copy"
inline std::optional<OutputPortId> parse_output_port(std::string_view text) {
    auto parts = detail::split(text, '.');
    if (parts.size() != 2 || !is_identifier(parts[0]))
        return std::nullopt;
    auto copy = parse_uint<std::uint64_t>(parts[1]);
    if (!copy)
        return std::nullopt;
    return OutputPortId{std::string(parts[0]), *copy};
}

/// "type.copy.slot"
inline std::optional<InputPortId> parse_input_port(std::string_view text) {
    auto parts = detail::split(text, '.');
    if (parts.size() != 3 || !is_identifier(parts[0]))
        return std::nullopt;
    auto copy = parse_uint<std::uint64_t>(parts[1]);
    auto slot = parse_uint<std::uint32_t>(parts[2]);
    if (!copy || !slot)
        return std::nullopt;
    return InputPortId{std::string(parts[0]), *copy, *slot};
}

/// One matrix literal item: "type.copy.slot <- type.copy : coefficient".
inline std::optional<std::pair<MatrixKey, double>> parse_matrix_entry(std::string_view text) {
    auto arrow = text.find("<-");
    if (arrow == std::string_view::npos)
        return std::nullopt;
    auto colon = text.find(':', arrow);
    if (colon == std::string_view::npos)
        return std::nullopt;
    auto in = parse_input_port(detail::trim(text.substr(0, arrow)));
    auto out = parse_output_port(detail::trim(text.substr(arrow + 2, colon - arrow - 2)));
    auto coef = parse_real(detail::trim(text.substr(colon + 1)));
    if (!in || !out || !coef)
        return std::nullopt;
    return std::pair{MatrixKey{std::move(*in), std::move(*out)}, *coef};
}

inline std::string format_matrix_entry(const MatrixKey& key, double coefficient) {
    return key.input.str() + " <- " + key.output.str() + " : " + format_real(coefficient);
}

} // namespace dmm

#endif // DMM_PORT_TEXT_HPP
