// SPDX-License-Identifier: Apache-2.0

#ifndef DMM_TESTS_SUPPORT_HPP
#define DMM_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <dmm/dmm.hpp>

namespace dmm::testing {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline std::string network_path(const std::string& name) {
    return std::string(DMM_NETWORKS_DIR) + "/" + name;
}

inline std::vector<std::string> shipped_networks() {
    return {"accumulator.dmm", "fib.dmm", "flipflop.dmm", "remix.dmm",
            "rnn.dmm", "self_update.dmm", "vectors.dmm"};
}

/// Independent integer Fibonacci: value of x after each tick of the
/// x <- x + y, y <- x machine started at x = 1, y = 0.
inline std::vector<std::uint64_t> fibonacci_oracle(std::size_t ticks) {
    std::vector<std::uint64_t> out;
    std::uint64_t x = 1, y = 0;
    for (std::size_t t = 0; t < ticks; ++t) {
        std::uint64_t nx = x + y;
        y = x;
        x = nx;
        out.push_back(x);
    }
    return out;
}

/// Direct dense recurrence h <- tanh(W h + U x), row-major W (n x n) and
/// U (n x m). Returns h after each tick.
inline std::vector<std::vector<double>> rnn_oracle(const std::vector<double>& W, const std::vector<double>& U,
                                                   const std::vector<double>& x, std::vector<double> h,
                                                   std::size_t ticks) {
    const std::size_t n = h.size(), m = x.size();
    std::vector<std::vector<double>> out;
    for (std::size_t t = 0; t < ticks; ++t) {
        std::vector<double> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                acc += W[i * n + j] * h[j];
            for (std::size_t k = 0; k < m; ++k)
                acc += U[i * m + k] * x[k];
            next[i] = std::tanh(acc);
        }
        h = next;
        out.push_back(h);
    }
    return out;
}

struct RnnInstance {
    std::vector<double> W, U, x, h0;
    Program program;
};

/// Random tanh network: `units` copies of type h and `inputs` const_scalar
/// source types x0, x1, ...; all weights uniform in [-1, 1].
inline RnnInstance random_rnn(std::mt19937_64& gen, std::size_t units, std::size_t inputs) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    RnnInstance r;
    const auto registry = builtin_registry();
    r.program.signature.add(make_neuron_type("h", {StreamKind::scalar()}, StreamKind::scalar(),
                                             "tanh_scalar", {}, registry));
    for (std::size_t k = 0; k < inputs; ++k) {
        double c = uni(gen);
        r.x.push_back(c);
        r.program.signature.add(make_neuron_type("x" + std::to_string(k), {}, StreamKind::scalar(),
                                                 "const_scalar", {format_real(c)}, registry));
    }
    for (std::size_t i = 0; i < units; ++i) {
        double h = uni(gen);
        r.h0.push_back(h);
        r.program.initial_outputs[{"h", i}] = h;
        r.program.watch.push_back({"h", i});
    }
    for (std::size_t i = 0; i < units; ++i)
        for (std::size_t j = 0; j < units; ++j) {
            r.W.push_back(uni(gen));
            r.program.matrix.set(InputPortId{"h", i, 0}, OutputPortId{"h", j}, r.W.back());
        }
    for (std::size_t i = 0; i < units; ++i)
        for (std::size_t k = 0; k < inputs; ++k) {
            r.U.push_back(uni(gen));
            r.program.matrix.set(InputPortId{"h", i, 0}, OutputPortId{"x" + std::to_string(k), 0}, r.U.back());
        }
    return r;
}

inline bool has_stored_zero(const PortMatrix& m) {
    for (const auto& [key, a] : m)
        if (a == 0.0)
            return true;
    return false;
}

inline std::string trace_text(const Trace& trace) {
    std::string out;
    for (const auto& rec : trace)
        for (const auto& [port, value] : rec.values)
            out += std::to_string(rec.tick) + "\t" + port.str() + "\t" + render(value) + "\n";
    return out;
}

} // namespace dmm::testing

#endif // DMM_TESTS_SUPPORT_HPP
