// SPDX-License-Identifier: Apache-2.0

#ifndef DMM_ENGINE_HPP
#define DMM_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "combine.hpp"
#include "error.hpp"
#include "network.hpp"
#include "random.hpp"
#include "stream.hpp"
#include "transforms.hpp"

namespace dmm {

/// A running machine. `matrix` is the current point of the program's
/// trajectory; `outputs` holds X_j for every running neuron.
struct MachineState {
    std::shared_ptr<const Signature> signature;
    PortMatrix matrix;
    std::map<OutputPortId, StreamValue> outputs;
    std::uint64_t tick = 0;
    Rng rng;
    std::optional<OutputPortId> updater;
    /// Copies that run regardless of the matrix (declared neurons).
    std::set<NeuronId> pinned;

    friend bool operator==(const MachineState& a, const MachineState& b) {
        return *a.signature == *b.signature && a.matrix == b.matrix && a.outputs == b.outputs &&
               a.tick == b.tick && a.rng == b.rng && a.updater == b.updater && a.pinned == b.pinned;
    }
};

/// Neurons executed each tick: those named by the matrix, the pinned copies
/// and the updater.
inline std::set<NeuronId> running_neurons(const PortMatrix& matrix, const std::set<NeuronId>& pinned,
                                          const std::optional<OutputPortId>& updater) {
    auto active = active_neurons(matrix);
    active.insert(pinned.begin(), pinned.end());
    if (updater)
        active.insert(*updater);
    return active;
}

inline std::set<NeuronId> running_neurons(const MachineState& state) {
    return running_neurons(state.matrix, state.pinned, state.updater);
}

inline MachineState init_state(std::shared_ptr<const Signature> signature, PortMatrix matrix,
                               std::map<OutputPortId, StreamValue> initial_outputs,
                               std::optional<OutputPortId> updater, std::uint64_t seed,
                               std::set<NeuronId> pinned = {}) {
    Program check{*signature, std::move(matrix), std::move(pinned), std::move(initial_outputs),
                  std::move(updater), {}};
    if (auto violations = validate(check); !violations.empty())
        throw ValidationError(describe(violations));

    MachineState state{std::move(signature), std::move(check.matrix), std::move(check.initial_outputs),
                       0, Rng(seed), std::move(check.updater), std::move(check.neurons)};
    // Deterministic sources start at their constant; everything else at neutral.
    for (const auto& n : running_neurons(state)) {
        if (state.outputs.count(n))
            continue;
        const NeuronType& type = state.signature->at(n.type_name);
        if (type.arity() == 0 && !type.transform.stochastic)
            state.outputs.emplace(n, apply_transform(type.transform, {}, state.rng));
        else
            state.outputs.emplace(n, neutral(type.output_kind));
    }
    return state;
}

inline MachineState init_state(const Program& program, std::uint64_t seed) {
    return init_state(std::make_shared<const Signature>(program.signature), program.matrix,
                      program.initial_outputs, program.updater, seed, program.neurons);
}

namespace detail {

inline const StreamValue& output_or_neutral(const MachineState& state, const OutputPortId& port,
                                            std::optional<StreamValue>& scratch) {
    if (auto it = state.outputs.find(port); it != state.outputs.end())
        return it->second;
    scratch = neutral(state.signature->at(port.type_name).output_kind);
    return *scratch;
}

} // namespace detail

/// Y_i = sum_j a_ij X_j for every input slot of every running neuron, in
/// canonical input-port order. Slots with no entries get the neutral value.
inline std::map<InputPortId, StreamValue> linear_phase(MachineState& state) {
    std::map<InputPortId, StreamValue> inputs;
    std::vector<Term<StreamValue>> terms;
    for (const auto& n : running_neurons(state)) {
        const NeuronType& type = state.signature->at(n.type_name);
        for (std::uint32_t slot = 0; slot < type.arity(); ++slot) {
            InputPortId in{n.type_name, n.copy, slot};
            terms.clear();
            auto [first, last] = state.matrix.row(in);
            for (auto it = first; it != last; ++it) {
                std::optional<StreamValue> scratch;
                terms.push_back({it->second, detail::output_or_neutral(state, it->first.output, scratch)});
            }
            inputs.emplace(std::move(in), combine(type.input_kinds[slot], terms, state.rng));
        }
    }
    return inputs;
}

/// New output of every running neuron, all computed from the same `inputs`.
inline std::map<OutputPortId, StreamValue> transform_phase(MachineState& state,
                                                           const std::map<InputPortId, StreamValue>& inputs) {
    std::map<OutputPortId, StreamValue> produced;
    std::vector<StreamValue> slots;
    for (const auto& n : running_neurons(state)) {
        const NeuronType& type = state.signature->at(n.type_name);
        slots.clear();
        for (std::uint32_t slot = 0; slot < type.arity(); ++slot) {
            auto it = inputs.find(InputPortId{n.type_name, n.copy, slot});
            slots.push_back(it != inputs.end() ? it->second : neutral(type.input_kinds[slot]));
        }
        produced.emplace(n, apply_transform(type.transform, slots, state.rng));
    }
    return produced;
}

/// One synchronous tick. A matrix emitted by the updater replaces the
/// program at the end of the tick, after validation.
inline MachineState step(MachineState state) {
    const std::uint64_t tick = state.tick + 1;
    std::map<OutputPortId, StreamValue> produced;
    try {
        auto inputs = linear_phase(state);
        produced = transform_phase(state, inputs);
    } catch (const Error& e) {
        throw RuntimeHalt(tick, e.what());
    }

    if (state.updater) {
        if (auto it = produced.find(*state.updater); it != produced.end()) {
            const MatrixValue& next = it->second.matrix();
            if (auto violations = validate(*state.signature, next); !violations.empty())
                throw RuntimeHalt(tick, "self-update from " + state.updater->str() +
                                            " produced an invalid matrix: " + describe(violations));
            state.matrix = next;
        }
    }

    state.outputs.clear();
    for (const auto& n : running_neurons(state)) {
        if (auto it = produced.find(n); it != produced.end())
            state.outputs.emplace(n, std::move(it->second));
        else
            state.outputs.emplace(n, neutral(state.signature->at(n.type_name).output_kind));
    }
    state.tick = tick;
    return state;
}

struct TickRecord {
    std::uint64_t tick = 0;
    std::vector<std::pair<OutputPortId, StreamValue>> values;
    std::size_t support_size = 0;

    friend bool operator==(const TickRecord&, const TickRecord&) = default;
};

using Trace = std::vector<TickRecord>;

struct RunResult {
    MachineState state;
    Trace trace;
};

/// Current value of `port`, neutral if the neuron is not running.
inline StreamValue watched_value(const MachineState& state, const OutputPortId& port) {
    std::optional<StreamValue> scratch;
    return detail::output_or_neutral(state, port, scratch);
}

/// Applies step `ticks` times. `observer`, when set, sees each record as soon
/// as its tick completes.
inline RunResult run(MachineState state, std::uint64_t ticks, const std::vector<OutputPortId>& watch,
                     const std::function<void(const TickRecord&)>& observer = {}) {
    for (const auto& port : watch)
        state.signature->at(port.type_name);
    Trace trace;
    trace.reserve(ticks);
    for (std::uint64_t t = 0; t < ticks; ++t) {
        state = step(std::move(state));
        TickRecord record{state.tick, {}, state.matrix.size()};
        for (const auto& port : watch)
            record.values.emplace_back(port, watched_value(state, port));
        if (observer)
            observer(record);
        trace.push_back(std::move(record));
    }
    return {std::move(state), std::move(trace)};
}

} // namespace dmm

#endif // DMM_ENGINE_HPP
