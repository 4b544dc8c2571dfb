// SPDX-License-Identifier: Apache-2.0

#ifndef DMM_STREAM_HPP
#define DMM_STREAM_HPP

#include <cmath>
#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "error.hpp"
#include "numfmt.hpp"
#include "ports.hpp"

namespace dmm {

/// Upper bound on vector stream dimensions accepted anywhere.
inline constexpr std::size_t max_vector_dimension = 1u << 16;

inline bool is_identifier(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
        return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

/// The type of payload a link carries each tick.
struct StreamKind {
    enum class Tag { Scalar, Vector, Sample, Matrix };

    Tag tag = Tag::Scalar;
    std::size_t dimension = 0; // Vector only
    std::string space;         // Sample only

    static StreamKind scalar() { return {}; }
    static StreamKind vector(std::size_t dimension) {
        if (dimension < 1 || dimension > max_vector_dimension)
            throw ValidationError("vector dimension must be in [1, " +
                                  std::to_string(max_vector_dimension) + "]");
        return {Tag::Vector, dimension, {}};
    }
    static StreamKind sample(std::string space) {
        if (!is_identifier(space))
            throw ValidationError("sample space must be an identifier, got '" + space + "'");
        return {Tag::Sample, 0, std::move(space)};
    }
    static StreamKind matrix() { return {Tag::Matrix, 0, {}}; }

    friend bool operator==(const StreamKind&, const StreamKind&) = default;

    std::string str() const {
        switch (tag) {
        case Tag::Scalar: return "scalar";
        case Tag::Vector: return "vector<" + std::to_string(dimension) + ">";
        case Tag::Sample: return "sample<" + space + ">";
        case Tag::Matrix: return "matrix";
        }
        return "?";
    }
};

/// Coordinate of one coefficient a_ij: row Y_i (input), column X_j (output).
struct MatrixKey {
    InputPortId input;
    OutputPortId output;

    friend auto operator<=>(const MatrixKey&, const MatrixKey&) = default;
    friend bool operator==(const MatrixKey&, const MatrixKey&) = default;
};

/// Finite-support real matrix over the countable port space. Absent entries
/// are zero and a zero coefficient is never stored. Iteration follows the
/// canonical order: input port, then output port.
class PortMatrix {
public:
    using container = std::map<MatrixKey, double>;
    using const_iterator = container::const_iterator;

    PortMatrix() = default;

    double get(const InputPortId& in, const OutputPortId& out) const {
        auto it = entries_.find(MatrixKey{in, out});
        return it == entries_.end() ? 0.0 : it->second;
    }

    bool contains(const InputPortId& in, const OutputPortId& out) const {
        return entries_.count(MatrixKey{in, out}) != 0;
    }

    /// Stores `coefficient`; zero erases the entry.
    void set(const InputPortId& in, const OutputPortId& out, double coefficient) {
        set(MatrixKey{in, out}, coefficient);
    }

    void set(MatrixKey key, double coefficient) {
        if (!std::isfinite(coefficient))
            throw ValidationError("non-finite coefficient for " + key.input.str() + " <- " +
                                  key.output.str());
        if (coefficient == 0.0)
            entries_.erase(key);
        else
            entries_.insert_or_assign(std::move(key), coefficient);
    }

    /// Copy with one entry set.
    PortMatrix with(const InputPortId& in, const OutputPortId& out, double coefficient) const {
        PortMatrix m = *this;
        m.set(in, out, coefficient);
        return m;
    }

    /// Entries of row `in` (all a_ij for fixed i), in output-port order.
    std::pair<const_iterator, const_iterator> row(const InputPortId& in) const {
        auto first = entries_.lower_bound(MatrixKey{in, OutputPortId{}});
        auto last = first;
        while (last != entries_.end() && last->first.input == in)
            ++last;
        return {first, last};
    }

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const_iterator begin() const noexcept { return entries_.begin(); }
    const_iterator end() const noexcept { return entries_.end(); }

    friend bool operator==(const PortMatrix&, const PortMatrix&) = default;

private:
    container entries_;
};

using ScalarValue = double;

struct VectorValue {
    std::vector<double> components;

    friend bool operator==(const VectorValue&, const VectorValue&) = default;
};

/// One draw from a signed measure over the token space `space`.
/// Weight 0 is the neutral element; its payload is the empty token.
struct SampleValue {
    std::string space;
    std::string payload;
    double weight = 0.0;
    int sign = +1;

    friend bool operator==(const SampleValue&, const SampleValue&) = default;
};

using MatrixValue = PortMatrix;

/// A value on a link, tagged by its kind.
class StreamValue {
public:
    using variant_type = std::variant<ScalarValue, VectorValue, SampleValue, MatrixValue>;

    StreamValue() = default;
    StreamValue(ScalarValue v) : value_(v) {}
    StreamValue(VectorValue v) : value_(std::move(v)) {}
    StreamValue(SampleValue v) : value_(std::move(v)) {}
    StreamValue(MatrixValue v) : value_(std::move(v)) {}

    StreamKind kind() const {
        switch (value_.index()) {
        case 0: return StreamKind::scalar();
        case 1: return {StreamKind::Tag::Vector, std::get<1>(value_).components.size(), {}};
        case 2: return {StreamKind::Tag::Sample, 0, std::get<2>(value_).space};
        default: return StreamKind::matrix();
        }
    }

    bool is_scalar() const noexcept { return value_.index() == 0; }
    bool is_vector() const noexcept { return value_.index() == 1; }
    bool is_sample() const noexcept { return value_.index() == 2; }
    bool is_matrix() const noexcept { return value_.index() == 3; }

    ScalarValue scalar() const { return get<ScalarValue>("scalar"); }
    const VectorValue& vector() const { return get<VectorValue>("vector"); }
    const SampleValue& sample() const { return get<SampleValue>("sample"); }
    const MatrixValue& matrix() const { return get<MatrixValue>("matrix"); }

    const variant_type& variant() const noexcept { return value_; }

    friend bool operator==(const StreamValue&, const StreamValue&) = default;

private:
    template <class T>
    const T& get(const char* what) const {
        if (const T* p = std::get_if<T>(&value_))
            return *p;
        throw MalformedNetwork(std::string("expected a ") + what + " value, got " + kind().str());
    }

    variant_type value_;
};

/// Additive identity of `kind`.
inline StreamValue neutral(const StreamKind& kind) {
    switch (kind.tag) {
    case StreamKind::Tag::Scalar: return ScalarValue{0.0};
    case StreamKind::Tag::Vector: return VectorValue{std::vector<double>(kind.dimension, 0.0)};
    case StreamKind::Tag::Sample: return SampleValue{kind.space, "", 0.0, +1};
    case StreamKind::Tag::Matrix: return MatrixValue{};
    }
    return ScalarValue{0.0};
}

/// Trace rendering: scalar as decimal, vector as comma-separated decimals,
/// sample as payload/weight/sign, matrix as its support size.
inline std::string render(const StreamValue& value) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ScalarValue>) {
                return format_real(v);
            } else if constexpr (std::is_same_v<T, VectorValue>) {
                std::string out;
                for (std::size_t i = 0; i < v.components.size(); ++i) {
                    if (i)
                        out += ',';
                    out += format_real(v.components[i]);
                }
                return out;
            } else if constexpr (std::is_same_v<T, SampleValue>) {
                return v.payload + "/" + format_real(v.weight) + "/" + (v.sign < 0 ? "-" : "+");
            } else {
                return std::to_string(v.size());
            }
        },
        value.variant());
}

} // namespace dmm

#endif // DMM_STREAM_HPP
