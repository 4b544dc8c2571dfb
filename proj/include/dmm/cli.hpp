// SPDX-License-Identifier: Apache-2.0

#ifndef DMM_CLI_HPP
#define DMM_CLI_HPP

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsl.hpp"
#include "engine.hpp"
#include "error.hpp"
#include "port_text.hpp"

namespace dmm {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_invalid = 2,
    exit_halt = 3,
};

/// `dmm run --net <path> --ticks <n> [--seed <int>] [--watch <port>]... [--dump-canonical]`
///
/// Prints one `tick<TAB>port<TAB>value` line per watched port per tick.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dataflow matrix machine runner", "dmm"};
    app.require_subcommand(1);
    CLI::App* run_cmd = app.add_subcommand("run", "Execute a network file and print its trace");

    std::string net_path;
    std::optional<std::uint64_t> ticks;
    std::uint64_t seed = 0;
    std::vector<std::string> watch_args;
    bool dump_canonical = false;
    run_cmd->add_option("--net", net_path, "Network file")->required();
    run_cmd->add_option("--ticks", ticks, "Number of ticks to execute");
    run_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    run_cmd->add_option("--watch", watch_args, "Port type.copy to trace (repeatable, overrides the file)");
    run_cmd->add_flag("--dump-canonical", dump_canonical, "Print the canonical form and exit");

    std::vector<const char*> argv{"dmm"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }
    if (!ticks && !dump_canonical) {
        err << "dmm: --ticks is required\n";
        return exit_usage;
    }

    std::vector<OutputPortId> watch_override;
    for (const auto& w : watch_args) {
        auto port = parse_output_port(w);
        if (!port) {
            err << "dmm: malformed --watch port '" << w << "', expected type.copy\n";
            return exit_usage;
        }
        watch_override.push_back(*port);
    }

    std::ifstream file(net_path, std::ios::binary);
    if (!file) {
        err << "dmm: cannot open network file '" << net_path << "'\n";
        return exit_usage;
    }
    std::ostringstream text;
    text << file.rdbuf();

    Program program;
    MachineState state;
    try {
        program = parse_program(text.str());
        if (dump_canonical) {
            out << serialize(program) << std::flush;
            return exit_ok;
        }
        if (!watch_args.empty())
            program.watch = watch_override;
        for (const auto& w : program.watch)
            program.signature.at(w.type_name);
        state = init_state(program, seed);
    } catch (const ParseError& e) {
        err << net_path << ":" << e.what() << "\n";
        return exit_invalid;
    } catch (const Error& e) {
        err << net_path << ": " << e.what() << "\n";
        return exit_invalid;
    }

    try {
        run(std::move(state), *ticks, program.watch, [&](const TickRecord& record) {
            for (const auto& [port, value] : record.values)
                out << record.tick << '\t' << port.str() << '\t' << render(value) << '\n';
            out.flush();
        });
    } catch (const Error& e) {
        err << "dmm: halted at " << e.what() << "\n";
        return exit_halt;
    }
    return exit_ok;
}

} // namespace dmm

#endif // DMM_CLI_HPP
