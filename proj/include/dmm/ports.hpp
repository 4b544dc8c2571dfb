// SPDX-License-Identifier: Apache-2.0

#ifndef DMM_PORTS_HPP
#define DMM_PORTS_HPP

#include <compare>
#include <cstdint>
#include <string>

namespace dmm {

/// The single output X_j of neuron copy `copy` of type `type_name`. Since
/// every neuron has exactly one output this also names the neuron itself.
struct OutputPortId {
    std::string type_name;
    std::uint64_t copy = 0;

    friend auto operator<=>(const OutputPortId&, const OutputPortId&) = default;
    friend bool operator==(const OutputPortId&, const OutputPortId&) = default;

    std::string str() const { return type_name + "." + std::to_string(copy); }
};

using NeuronId = OutputPortId;

/// Input slot Y_i of a neuron copy.
struct InputPortId {
    std::string type_name;
    std::uint64_t copy = 0;
    std::uint32_t slot = 0;

    friend auto operator<=>(const InputPortId&, const InputPortId&) = default;
    friend bool operator==(const InputPortId&, const InputPortId&) = default;

    NeuronId neuron() const { return {type_name, copy}; }
    std::string str() const { return neuron().str() + "." + std::to_string(slot); }
};

} // namespace dmm

#endif // DMM_PORTS_HPP
