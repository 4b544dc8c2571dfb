// SPDX-License-Identifier: Apache-2.0

#ifndef DMM_NETWORK_HPP
#define DMM_NETWORK_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "ports.hpp"
#include "stream.hpp"
#include "transforms.hpp"

namespace dmm {

/// A neuron species: input slot kinds, output kind and transform.
/// Arity 0 types are sources.
struct NeuronType {
    std::string name;
    std::vector<StreamKind> input_kinds;
    StreamKind output_kind;
    Transform transform;

    std::size_t arity() const noexcept { return input_kinds.size(); }

    friend bool operator==(const NeuronType&, const NeuronType&) = default;
};

/// Resolves `transform_name` in `registry` against the given kinds.
inline NeuronType make_neuron_type(std::string name, std::vector<StreamKind> input_kinds,
                                   StreamKind output_kind, const std::string& transform_name,
                                   std::vector<std::string> params,
                                   const TransformRegistry& registry) {
    Transform t = registry.instantiate(transform_name, {input_kinds, output_kind, std::move(params)});
    return {std::move(name), std::move(input_kinds), std::move(output_kind), std::move(t)};
}

/// Finite set of neuron types with distinct names.
class Signature {
public:
    using container = std::map<std::string, NeuronType>;

    void add(NeuronType type) {
        if (!is_identifier(type.name))
            throw ValidationError("neuron type name must be an identifier, got '" + type.name + "'");
        if (type.transform.input_kinds != type.input_kinds ||
            !(type.transform.output_kind == type.output_kind))
            throw ValidationError("neuron type '" + type.name +
                                  "' disagrees with the kinds of its transform");
        std::string name = type.name;
        if (!types_.emplace(name, std::move(type)).second)
            throw ValidationError("duplicate neuron type '" + name + "'");
    }

    const NeuronType* find(const std::string& name) const {
        auto it = types_.find(name);
        return it == types_.end() ? nullptr : &it->second;
    }

    const NeuronType& at(const std::string& name) const {
        if (const NeuronType* t = find(name))
            return *t;
        throw ValidationError("unknown neuron type '" + name + "'");
    }

    std::optional<StreamKind> output_kind(const OutputPortId& port) const {
        if (const NeuronType* t = find(port.type_name))
            return t->output_kind;
        return std::nullopt;
    }

    std::optional<StreamKind> input_kind(const InputPortId& port) const {
        if (const NeuronType* t = find(port.type_name); t && port.slot < t->arity())
            return t->input_kinds[port.slot];
        return std::nullopt;
    }

    std::size_t size() const noexcept { return types_.size(); }
    bool empty() const noexcept { return types_.empty(); }
    container::const_iterator begin() const noexcept { return types_.begin(); }
    container::const_iterator end() const noexcept { return types_.end(); }

    friend bool operator==(const Signature&, const Signature&) = default;

private:
    container types_;
};

struct Violation {
    enum class Code { UnknownType, SlotOutOfRange, KindMismatch };

    Code code;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

inline std::string describe(const std::vector<Violation>& violations) {
    std::string out;
    for (const auto& v : violations)
        out += (out.empty() ? "" : "; ") + v.message;
    return out;
}

namespace detail {

inline void check_entry(const Signature& sig, const InputPortId& in, const OutputPortId& out,
                        std::vector<Violation>& violations) {
    const NeuronType* dst = sig.find(in.type_name);
    const NeuronType* src = sig.find(out.type_name);
    if (!dst)
        violations.push_back({Violation::Code::UnknownType,
                              "unknown neuron type '" + in.type_name + "' in " + in.str()});
    if (!src)
        violations.push_back({Violation::Code::UnknownType,
                              "unknown neuron type '" + out.type_name + "' in " + out.str()});
    if (dst && in.slot >= dst->arity())
        violations.push_back({Violation::Code::SlotOutOfRange,
                              "slot " + std::to_string(in.slot) + " of " + in.str() +
                                  " is out of range for arity " + std::to_string(dst->arity())});
    if (dst && src && in.slot < dst->arity() && !(dst->input_kinds[in.slot] == src->output_kind))
        violations.push_back({Violation::Code::KindMismatch,
                              "kind mismatch: " + out.str() + " emits " + src->output_kind.str() +
                                  " but " + in.str() + " takes " + dst->input_kinds[in.slot].str()});
}

} // namespace detail

/// Every typing violation of `matrix` under `sig`; empty means valid.
inline std::vector<Violation> validate(const Signature& sig, const PortMatrix& matrix) {
    std::vector<Violation> violations;
    for (const auto& [key, a] : matrix)
        detail::check_entry(sig, key.input, key.output, violations);
    return violations;
}

/// Copy of `matrix` with a_ij set; zero removes the entry.
inline PortMatrix set_weight(const Signature& sig, const PortMatrix& matrix, const InputPortId& in,
                             const OutputPortId& out, double coefficient) {
    std::vector<Violation> violations;
    detail::check_entry(sig, in, out, violations);
    if (!violations.empty())
        throw ValidationError(describe(violations));
    return matrix.with(in, out, coefficient);
}

/// Neuron copies named by any entry, as destination or source.
inline std::set<NeuronId> active_neurons(const PortMatrix& matrix) {
    std::set<NeuronId> active;
    for (const auto& [key, a] : matrix) {
        active.insert(key.input.neuron());
        active.insert(key.output);
    }
    return active;
}

/// Everything a network file describes.
struct Program {
    Signature signature;
    PortMatrix matrix;
    /// Copies declared explicitly; they run even when no entry names them.
    std::set<NeuronId> neurons;
    std::map<OutputPortId, StreamValue> initial_outputs;
    std::optional<OutputPortId> updater;
    std::vector<OutputPortId> watch;

    friend bool operator==(const Program&, const Program&) = default;
};

/// validate() plus the checks on declared copies, initial values, the
/// updater and the watch list.
inline std::vector<Violation> validate(const Program& p) {
    auto violations = validate(p.signature, p.matrix);
    auto known = [&](const OutputPortId& port, const char* role) {
        if (p.signature.find(port.type_name))
            return true;
        violations.push_back({Violation::Code::UnknownType,
                              std::string(role) + " " + port.str() + " has unknown type"});
        return false;
    };
    for (const auto& n : p.neurons)
        known(n, "neuron");
    for (const auto& [port, value] : p.initial_outputs)
        if (known(port, "initial value for") && !(value.kind() == *p.signature.output_kind(port)))
            violations.push_back({Violation::Code::KindMismatch,
                                  "initial value for " + port.str() + " is " + value.kind().str() +
                                      ", expected " + p.signature.output_kind(port)->str()});
    if (p.updater && known(*p.updater, "updater") &&
        p.signature.output_kind(*p.updater)->tag != StreamKind::Tag::Matrix)
        violations.push_back({Violation::Code::KindMismatch,
                              "updater " + p.updater->str() + " must emit matrix, not " +
                                  p.signature.output_kind(*p.updater)->str()});
    for (const auto& w : p.watch)
        known(w, "watched port");
    return violations;
}

} // namespace dmm

#endif // DMM_NETWORK_HPP
