// SPDX-License-Identifier: Apache-2.0

#ifndef DMM_TRANSFORMS_HPP
#define DMM_TRANSFORMS_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "port_text.hpp"
#include "random.hpp"
#include "stream.hpp"

namespace dmm {

using ApplyFn = std::function<StreamValue(std::span<const StreamValue>, Rng&)>;

/// A neuron's nonlinear transform, bound to concrete stream kinds and
/// parameters. `params` holds the canonical text of each parameter item.
struct Transform {
    std::string name;
    std::vector<StreamKind> input_kinds;
    StreamKind output_kind;
    bool stochastic = false;
    std::vector<std::string> params;
    ApplyFn apply;

    std::size_t arity() const noexcept { return input_kinds.size(); }

    /// "name" or "name(p0, p1, ...)"
    std::string str() const {
        if (params.empty())
            return name;
        std::string out = name + "(";
        for (std::size_t i = 0; i < params.size(); ++i)
            out += (i ? ", " : "") + params[i];
        return out + ")";
    }

    // apply is a pure function of the other fields
    friend bool operator==(const Transform& a, const Transform& b) {
        return a.name == b.name && a.input_kinds == b.input_kinds &&
               a.output_kind == b.output_kind && a.stochastic == b.stochastic &&
               a.params == b.params;
    }
};

/// Kinds and raw parameter items a neuron type asks a transform for.
struct TransformSpec {
    std::vector<StreamKind> input_kinds;
    StreamKind output_kind;
    std::vector<std::string> params;
};

/// Bad transform parameter. `item` is the offending parameter index, or
/// npos when the parameter list as a whole is wrong.
class ParamError : public ValidationError {
public:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    ParamError(std::size_t item, const std::string& message)
        : ValidationError(message), item_(item) {}

    std::size_t item() const noexcept { return item_; }

private:
    std::size_t item_;
};

using TransformFactory = std::function<Transform(const TransformSpec&)>;

/// Transforms by name. Custom transforms may be added before parsing.
class TransformRegistry {
public:
    void add(const std::string& name, TransformFactory factory) {
        if (!is_identifier(name))
            throw ValidationError("transform name must be an identifier, got '" + name + "'");
        if (!factories_.emplace(name, std::move(factory)).second)
            throw ValidationError("transform '" + name + "' is already registered");
    }

    bool contains(const std::string& name) const { return factories_.count(name) != 0; }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& [name, _] : factories_)
            out.push_back(name);
        return out;
    }

    /// Builds the transform and checks that its declared kinds are the ones
    /// requested.
    Transform instantiate(const std::string& name, const TransformSpec& spec) const {
        auto it = factories_.find(name);
        if (it == factories_.end())
            throw ValidationError("unknown transform '" + name + "'");
        Transform t = it->second(spec);
        t.name = name;
        if (t.input_kinds != spec.input_kinds || !(t.output_kind == spec.output_kind) || !t.apply)
            throw ValidationError("transform '" + name + "' is inconsistent with its declared kinds");
        return t;
    }

private:
    std::map<std::string, TransformFactory> factories_;
};

/// Runs `t` on `inputs`, checking arity and kinds first.
inline StreamValue apply_transform(const Transform& t, std::span<const StreamValue> inputs, Rng& rng) {
    if (inputs.size() != t.arity())
        throw MalformedNetwork("transform '" + t.name + "' expects " + std::to_string(t.arity()) +
                               " inputs, got " + std::to_string(inputs.size()));
    for (std::size_t i = 0; i < inputs.size(); ++i)
        if (!(inputs[i].kind() == t.input_kinds[i]))
            throw MalformedNetwork("transform '" + t.name + "' slot " + std::to_string(i) +
                                   " expects " + t.input_kinds[i].str() + ", got " +
                                   inputs[i].kind().str());
    StreamValue out = t.apply(inputs, rng);
    if (!(out.kind() == t.output_kind))
        throw MalformedNetwork("transform '" + t.name + "' produced " + out.kind().str() +
                               " instead of " + t.output_kind.str());
    return out;
}

namespace detail {

inline void expect_kinds(const TransformSpec& spec, const std::vector<StreamKind>& in,
                         const StreamKind& out, const char* name) {
    if (spec.input_kinds != in || !(spec.output_kind == out)) {
        std::string want = "in";
        for (const auto& k : in)
            want += " " + k.str();
        throw ValidationError(std::string(name) + " requires '" + want + " out " + out.str() + "'");
    }
}

inline void expect_no_params(const TransformSpec& spec, const char* name) {
    if (!spec.params.empty())
        throw ParamError(ParamError::npos, std::string(name) + " takes no parameters");
}

inline Transform unary_scalar(const TransformSpec& spec, const char* name, double (*fn)(double)) {
    expect_no_params(spec, name);
    expect_kinds(spec, {StreamKind::scalar()}, StreamKind::scalar(), name);
    return {name, spec.input_kinds, spec.output_kind, false, {},
            [fn](std::span<const StreamValue> in, Rng&) -> StreamValue { return fn(in[0].scalar()); }};
}

inline Transform identity_of_kind(const TransformSpec& spec, const char* name, StreamKind kind,
                                  std::vector<std::string> params = {}) {
    expect_kinds(spec, {kind}, kind, name);
    return {name, spec.input_kinds, spec.output_kind, false, std::move(params),
            [](std::span<const StreamValue> in, Rng&) { return in[0]; }};
}

inline Transform make_const_scalar(const TransformSpec& spec) {
    if (spec.params.size() != 1)
        throw ParamError(ParamError::npos, "const_scalar takes exactly one parameter");
    auto c = parse_real(detail::trim(spec.params[0]));
    if (!c)
        throw ParamError(0, "const_scalar parameter must be a decimal number");
    expect_kinds(spec, {}, StreamKind::scalar(), "const_scalar");
    double value = *c;
    return {"const_scalar", {}, StreamKind::scalar(), false, {format_real(value)},
            [value](std::span<const StreamValue>, Rng&) -> StreamValue { return value; }};
}

inline Transform make_identity_vector(const TransformSpec& spec) {
    if (spec.params.size() > 1)
        throw ParamError(ParamError::npos, "identity_vector takes at most one parameter");
    if (spec.output_kind.tag != StreamKind::Tag::Vector)
        throw ValidationError("identity_vector requires a vector output kind");
    std::size_t d = spec.output_kind.dimension;
    if (spec.params.size() == 1) {
        auto given = parse_uint<std::size_t>(detail::trim(spec.params[0]));
        if (!given)
            throw ParamError(0, "identity_vector parameter must be a dimension");
        if (*given != d)
            throw ParamError(0, "identity_vector(" + std::to_string(*given) +
                                    ") does not match declared kind " + spec.output_kind.str());
    }
    return identity_of_kind(spec, "identity_vector", spec.output_kind, {std::to_string(d)});
}

inline Transform make_sample_source(const TransformSpec& spec) {
    if (spec.output_kind.tag != StreamKind::Tag::Sample)
        throw ValidationError("sample_source requires a sample output kind");
    expect_kinds(spec, {}, spec.output_kind, "sample_source");
    if (spec.params.empty())
        throw ParamError(ParamError::npos, "sample_source needs at least one token:weight item");

    std::vector<std::string> tokens;
    std::vector<double> cumulative;
    std::vector<std::string> canonical;
    std::set<std::string> seen;
    double total = 0.0;
    for (std::size_t i = 0; i < spec.params.size(); ++i) {
        auto item = detail::trim(spec.params[i]);
        auto colon = item.find(':');
        if (colon == std::string_view::npos)
            throw ParamError(i, "expected token:weight");
        auto token = detail::trim(item.substr(0, colon));
        auto weight = parse_real(detail::trim(item.substr(colon + 1)));
        if (!is_identifier(token))
            throw ParamError(i, "token must be an identifier");
        if (!seen.insert(std::string(token)).second)
            throw ParamError(i, "duplicate token '" + std::string(token) + "'");
        if (!weight || *weight < 0.0)
            throw ParamError(i, "token weight must be a non-negative number");
        total += *weight;
        tokens.emplace_back(token);
        cumulative.push_back(total);
        canonical.push_back(std::string(token) + ":" + format_real(*weight));
    }
    if (!(total > 0.0) || !std::isfinite(total))
        throw ParamError(ParamError::npos, "sample_source weights must have a positive finite sum");
    for (double& c : cumulative)
        c /= total;

    std::string space = spec.output_kind.space;
    return {"sample_source", {}, spec.output_kind, true, std::move(canonical),
            [space, tokens, cumulative](std::span<const StreamValue>, Rng& rng) -> StreamValue {
                double u = uniform01(rng);
                std::size_t k = 0;
                while (k + 1 < tokens.size() && !(u < cumulative[k]))
                    ++k;
                // skip zero-weight tokens that share the boundary
                while (k > 0 && cumulative[k] == cumulative[k - 1])
                    --k;
                return SampleValue{space, tokens[k], 1.0, +1};
            }};
}

inline Transform make_sample_map(const TransformSpec& spec) {
    if (spec.input_kinds.size() != 1 || spec.input_kinds[0].tag != StreamKind::Tag::Sample ||
        spec.output_kind.tag != StreamKind::Tag::Sample)
        throw ValidationError("sample_map requires 'in sample<a> out sample<b>'");
    std::map<std::string, std::string> relabel;
    std::vector<std::string> canonical;
    for (std::size_t i = 0; i < spec.params.size(); ++i) {
        auto item = detail::trim(spec.params[i]);
        auto arrow = item.find("->");
        if (arrow == std::string_view::npos)
            throw ParamError(i, "expected from->to");
        std::string from(detail::trim(item.substr(0, arrow)));
        std::string to(detail::trim(item.substr(arrow + 2)));
        if (!is_identifier(from) || !is_identifier(to))
            throw ParamError(i, "tokens must be identifiers");
        if (!relabel.emplace(from, to).second)
            throw ParamError(i, "token '" + from + "' is mapped twice");
        canonical.push_back(from + "->" + to);
    }
    std::string space = spec.output_kind.space;
    return {"sample_map", spec.input_kinds, spec.output_kind, false, std::move(canonical),
            [space, relabel](std::span<const StreamValue> in, Rng&) -> StreamValue {
                SampleValue s = in[0].sample();
                s.space = space;
                if (auto it = relabel.find(s.payload); it != relabel.end() && s.weight > 0.0)
                    s.payload = it->second;
                return s;
            }};
}

inline Transform make_const_matrix(const TransformSpec& spec) {
    expect_kinds(spec, {}, StreamKind::matrix(), "const_matrix");
    MatrixValue m;
    std::set<MatrixKey> seen;
    for (std::size_t i = 0; i < spec.params.size(); ++i) {
        auto entry = parse_matrix_entry(spec.params[i]);
        if (!entry)
            throw ParamError(i, "expected 'type.copy.slot <- type.copy : coefficient'");
        if (!seen.insert(entry->first).second)
            throw ParamError(i, "duplicate matrix entry");
        m.set(entry->first, entry->second);
    }
    std::vector<std::string> canonical;
    for (const auto& [key, a] : m)
        canonical.push_back(format_matrix_entry(key, a));
    return {"const_matrix", {}, StreamKind::matrix(), false, std::move(canonical),
            [m](std::span<const StreamValue>, Rng&) -> StreamValue { return m; }};
}

} // namespace detail

/// The built-in transform library.
inline TransformRegistry builtin_registry() {
    using namespace detail;
    TransformRegistry r;
    r.add("const_scalar", make_const_scalar);
    r.add("identity_scalar", [](const TransformSpec& s) {
        return unary_scalar(s, "identity_scalar", [](double x) { return x; });
    });
    r.add("tanh_scalar", [](const TransformSpec& s) {
        return unary_scalar(s, "tanh_scalar", [](double x) { return std::tanh(x); });
    });
    r.add("sigmoid_scalar", [](const TransformSpec& s) {
        return unary_scalar(s, "sigmoid_scalar", [](double x) { return 1.0 / (1.0 + std::exp(-x)); });
    });
    r.add("multiply_scalars", [](const TransformSpec& s) -> Transform {
        expect_no_params(s, "multiply_scalars");
        expect_kinds(s, {StreamKind::scalar(), StreamKind::scalar()}, StreamKind::scalar(),
                     "multiply_scalars");
        return {"multiply_scalars", s.input_kinds, s.output_kind, false, {},
                [](std::span<const StreamValue> in, Rng&) -> StreamValue {
                    return in[0].scalar() * in[1].scalar();
                }};
    });
    r.add("identity_vector", make_identity_vector);
    r.add("sample_source", make_sample_source);
    r.add("sample_identity", [](const TransformSpec& s) {
        expect_no_params(s, "sample_identity");
        if (s.output_kind.tag != StreamKind::Tag::Sample)
            throw ValidationError("sample_identity requires a sample output kind");
        return identity_of_kind(s, "sample_identity", s.output_kind);
    });
    r.add("sample_map", make_sample_map);
    r.add("identity_matrix_stream", [](const TransformSpec& s) {
        expect_no_params(s, "identity_matrix_stream");
        return identity_of_kind(s, "identity_matrix_stream", StreamKind::matrix());
    });
    r.add("const_matrix", make_const_matrix);
    return r;
}

} // namespace dmm

#endif // DMM_TRANSFORMS_HPP
