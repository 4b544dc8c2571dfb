// SPDX-License-Identifier: Apache-2.0

#ifndef DMM_COMBINE_HPP
#define DMM_COMBINE_HPP

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "random.hpp"
#include "stream.hpp"

namespace dmm {

template <class V>
struct Term {
    double coefficient = 0.0;
    V value{};
};

inline ScalarValue combine_scalar(std::span<const Term<ScalarValue>> terms) {
    double sum = 0.0;
    for (const auto& t : terms)
        sum += t.coefficient * t.value;
    return sum;
}

inline VectorValue combine_vector(std::size_t dimension, std::span<const Term<VectorValue>> terms) {
    VectorValue out{std::vector<double>(dimension, 0.0)};
    for (const auto& t : terms) {
        if (t.value.components.size() != dimension)
            throw MalformedNetwork("vector dimension mismatch: expected " +
                                   std::to_string(dimension) + ", got " +
                                   std::to_string(t.value.components.size()));
        for (std::size_t k = 0; k < dimension; ++k)
            out.components[k] += t.coefficient * t.value.components[k];
    }
    return out;
}

/// Stochastic remix. Term i is selected with probability |c_i| w_i / W where
/// W = sum |c_i| w_i; the result carries weight W and sign sign(c_i) s_i.
/// Exactly one draw is taken from `rng` when W > 0 and none otherwise.
inline SampleValue combine_samples(const std::string& space, std::span<const Term<SampleValue>> terms,
                                   Rng& rng) {
    double total = 0.0;
    for (const auto& t : terms) {
        if (t.value.space != space)
            throw MalformedNetwork("cannot remix samples from space '" + t.value.space +
                                   "' into space '" + space + "'");
        total += std::abs(t.coefficient) * t.value.weight;
    }
    if (!(total > 0.0))
        return SampleValue{space, "", 0.0, +1};

    const double target = uniform01(rng) * total;
    const Term<SampleValue>* chosen = nullptr;
    double running = 0.0;
    for (const auto& t : terms) {
        double w = std::abs(t.coefficient) * t.value.weight;
        if (w <= 0.0)
            continue;
        chosen = &t;
        running += w;
        if (target < running)
            break;
    }
    // chosen is the last positive-weight term if rounding left target >= running
    int sign = (chosen->coefficient < 0 ? -1 : +1) * chosen->value.sign;
    return SampleValue{space, chosen->value.payload, total, sign};
}

/// Entry-wise linear combination; entries cancelling to exactly 0 are dropped.
inline MatrixValue combine_matrices(std::span<const Term<MatrixValue>> terms) {
    std::map<MatrixKey, double> acc;
    for (const auto& t : terms)
        for (const auto& [key, a] : t.value)
            acc[key] += t.coefficient * a;
    MatrixValue out;
    for (auto& [key, a] : acc)
        out.set(key, a);
    return out;
}

/// Dispatches on `kind`. Only the Sample branch touches `rng`.
inline StreamValue combine(const StreamKind& kind, std::span<const Term<StreamValue>> terms, Rng& rng) {
    for (const auto& t : terms)
        if (!(t.value.kind() == kind))
            throw MalformedNetwork("cannot combine a " + t.value.kind().str() + " value into a " +
                                   kind.str() + " stream");

    auto unwrap = [&]<class V>(auto&& get) {
        std::vector<Term<V>> typed;
        typed.reserve(terms.size());
        for (const auto& t : terms)
            typed.push_back({t.coefficient, get(t.value)});
        return typed;
    };

    switch (kind.tag) {
    case StreamKind::Tag::Scalar: {
        auto typed = unwrap.template operator()<ScalarValue>([](const StreamValue& v) { return v.scalar(); });
        return combine_scalar(typed);
    }
    case StreamKind::Tag::Vector: {
        auto typed = unwrap.template operator()<VectorValue>([](const StreamValue& v) { return v.vector(); });
        return combine_vector(kind.dimension, typed);
    }
    case StreamKind::Tag::Sample: {
        auto typed = unwrap.template operator()<SampleValue>([](const StreamValue& v) { return v.sample(); });
        return combine_samples(kind.space, typed, rng);
    }
    case StreamKind::Tag::Matrix: {
        auto typed = unwrap.template operator()<MatrixValue>([](const StreamValue& v) { return v.matrix(); });
        return combine_matrices(typed);
    }
    }
    return neutral(kind);
}

} // namespace dmm

#endif // DMM_COMBINE_HPP
