// SPDX-License-Identifier: Apache-2.0

#ifndef DMM_RANDOM_HPP
#define DMM_RANDOM_HPP

#include <cstdint>
#include <random>

namespace dmm {

/// The single random source a machine owns. mt19937_64 output is fully
/// specified by the standard, so seeded traces are portable.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from exactly one engine draw.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace dmm

#endif // DMM_RANDOM_HPP
