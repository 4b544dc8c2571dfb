// SPDX-License-Identifier: Apache-2.0

#ifndef DMM_DSL_HPP
#define DMM_DSL_HPP

// Line-oriented network description format. '#' starts a comment.
//
//   type <name> arity <k> in <kind>*k out <kind> transform <tname>[(<params>)]
//   neuron <type>.<copy>
//   weight <type>.<copy>.<slot> <- <type>.<copy> <coefficient>
//   init <type>.<copy> <value>
//   updater <type>.<copy>
//   watch <type>.<copy>
//
// kinds:  scalar | vector<d> | sample<space> | matrix
// values: 1.5 | [1, 2, 3] | token/weight/sign | {t.0.0 <- u.1 : 0.5, ...}

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"
#include "network.hpp"
#include "numfmt.hpp"
#include "port_text.hpp"
#include "stream.hpp"
#include "transforms.hpp"

namespace dmm {

namespace detail {

inline constexpr std::size_t max_declared_arity = 4096;

inline bool is_word_char(char c) {
    if (std::isspace(static_cast<unsigned char>(c)))
        return false;
    switch (c) {
    case '(': case ')': case '<': case '>': case ',': case '{': case '}': case '[': case ']':
        return false;
    default:
        return true;
    }
}

struct Located {
    std::string_view text;
    std::size_t column = 0;
};

class LineCursor {
public:
    LineCursor(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

    [[noreturn]] void fail(std::size_t column, const std::string& message) const {
        throw ParseError(line_no_, column, message);
    }

    bool at_end() {
        skip_ws();
        return pos_ >= line_.size();
    }

    std::size_t column() {
        skip_ws();
        return pos_ + 1;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < line_.size() && line_[pos_] == c;
    }

    Located word(const char* what) {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < line_.size() && is_word_char(line_[pos_]))
            ++pos_;
        if (pos_ == start)
            fail(start + 1, std::string("expected ") + what + describe_here(start));
        return {line_.substr(start, pos_ - start), start + 1};
    }

    void keyword(std::string_view kw) {
        auto w = word(std::string("'" + std::string(kw) + "'").c_str());
        if (w.text != kw)
            fail(w.column, "expected '" + std::string(kw) + "', found '" + std::string(w.text) + "'");
    }

    void expect(std::string_view token) {
        skip_ws();
        if (line_.substr(pos_, token.size()) != token)
            fail(pos_ + 1, "expected '" + std::string(token) + "'" + describe_here(pos_));
        pos_ += token.size();
    }

    /// Consumes `open ... close` and returns the comma-separated items
    /// between them, trimmed. Blank contents yield no items.
    std::vector<Located> bracketed(char open, char close) {
        skip_ws();
        std::size_t open_col = pos_ + 1;
        expect(std::string_view(&open, 1));
        std::size_t end = line_.find(close, pos_);
        if (end == std::string_view::npos)
            fail(open_col, std::string("unterminated '") + open + "'");
        std::string_view body = line_.substr(pos_, end - pos_);
        std::size_t body_start = pos_;
        pos_ = end + 1;

        std::vector<Located> items;
        if (trim(body).empty())
            return items;
        std::size_t start = 0;
        for (;;) {
            std::size_t comma = body.find(',', start);
            std::string_view raw = body.substr(start, comma == std::string_view::npos ? comma : comma - start);
            std::size_t lead = 0;
            while (lead < raw.size() && std::isspace(static_cast<unsigned char>(raw[lead])))
                ++lead;
            items.push_back({trim(raw), body_start + start + lead + 1});
            if (comma == std::string_view::npos)
                return items;
            start = comma + 1;
        }
    }

    void expect_end() {
        skip_ws();
        if (pos_ < line_.size())
            fail(pos_ + 1, "unexpected '" + std::string(line_.substr(pos_)) + "'");
    }

private:
    void skip_ws() {
        while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_])))
            ++pos_;
    }

    std::string describe_here(std::size_t at) const {
        if (at >= line_.size())
            return " at end of line";
        return ", found '" + std::string(1, line_[at]) + "'";
    }

    std::string_view line_;
    std::size_t line_no_;
    std::size_t pos_ = 0;
};

class ProgramParser {
public:
    explicit ProgramParser(const TransformRegistry& registry) : registry_(registry) {}

    Program parse(std::string_view text) {
        std::size_t line_no = 0;
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t nl = text.find('\n', start);
            std::string_view line = text.substr(start, nl == std::string_view::npos ? nl : nl - start);
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string_view::npos)
                line = line.substr(0, hash);
            parse_line(LineCursor(line, line_no));
            if (nl == std::string_view::npos)
                break;
            start = nl + 1;
        }
        if (program_.signature.empty())
            throw ParseError(1, 1, "empty signature: no neuron types declared");
        return std::move(program_);
    }

private:
    void parse_line(LineCursor cur) {
        if (cur.at_end())
            return;
        auto kw = cur.word("a declaration");
        if (kw.text == "type")
            parse_type(cur);
        else if (kw.text == "neuron")
            parse_neuron(cur);
        else if (kw.text == "weight")
            parse_weight(cur);
        else if (kw.text == "init")
            parse_init(cur);
        else if (kw.text == "updater")
            parse_updater(cur);
        else if (kw.text == "watch")
            parse_watch(cur);
        else
            cur.fail(kw.column, "unknown declaration '" + std::string(kw.text) + "'");
        cur.expect_end();
    }

    StreamKind parse_kind(LineCursor& cur) {
        auto w = cur.word("a stream kind");
        if (w.text == "scalar")
            return StreamKind::scalar();
        if (w.text == "matrix")
            return StreamKind::matrix();
        if (w.text == "vector" || w.text == "sample") {
            cur.expect("<");
            auto arg = cur.word(w.text == "vector" ? "a dimension" : "a sample space");
            cur.expect(">");
            try {
                if (w.text == "sample")
                    return StreamKind::sample(std::string(arg.text));
                auto d = parse_uint<std::size_t>(arg.text);
                if (!d)
                    cur.fail(arg.column, "vector dimension must be a positive integer");
                return StreamKind::vector(*d);
            } catch (const ValidationError& e) {
                cur.fail(arg.column, e.what());
            }
        }
        cur.fail(w.column, "unknown stream kind '" + std::string(w.text) + "'");
    }

    void parse_type(LineCursor& cur) {
        auto name = cur.word("a type name");
        if (!is_identifier(name.text))
            cur.fail(name.column, "type name must be an identifier");
        if (program_.signature.find(std::string(name.text)))
            cur.fail(name.column, "duplicate neuron type '" + std::string(name.text) + "'");
        cur.keyword("arity");
        auto arity_word = cur.word("an arity");
        auto arity = parse_uint<std::size_t>(arity_word.text);
        if (!arity || *arity > max_declared_arity)
            cur.fail(arity_word.column, "arity must be an integer in [0, " +
                                            std::to_string(max_declared_arity) + "]");
        cur.keyword("in");
        std::vector<StreamKind> inputs;
        for (std::size_t i = 0; i < *arity; ++i) {
            std::size_t col = cur.column();
            if (!cur.at_end() && cur.peek('o')) {
                auto probe = cur;
                if (probe.word("").text == "out")
                    cur.fail(col, "type '" + std::string(name.text) + "' has arity " +
                                      std::to_string(*arity) + " but lists " + std::to_string(i) +
                                      " input kinds");
            }
            inputs.push_back(parse_kind(cur));
        }
        cur.keyword("out");
        StreamKind output = parse_kind(cur);
        cur.keyword("transform");
        auto tname = cur.word("a transform name");
        std::vector<Located> items;
        if (cur.peek('('))
            items = cur.bracketed('(', ')');
        std::string transform_name(tname.text);
        if (!registry_.contains(transform_name))
            cur.fail(tname.column, "unknown transform '" + transform_name + "'");

        std::vector<std::string> params;
        for (const auto& it : items)
            params.emplace_back(it.text);
        try {
            program_.signature.add(make_neuron_type(std::string(name.text), std::move(inputs), output,
                                                    transform_name, std::move(params), registry_));
        } catch (const ParamError& e) {
            cur.fail(e.item() < items.size() ? items[e.item()].column : tname.column, e.what());
        } catch (const ValidationError& e) {
            cur.fail(tname.column, e.what());
        }
    }

    const NeuronType& known_type(LineCursor& cur, const std::string& type_name, std::size_t column) {
        const NeuronType* t = program_.signature.find(type_name);
        if (!t)
            cur.fail(column, "unknown neuron type '" + type_name + "'");
        return *t;
    }

    OutputPortId output_port(LineCursor& cur) {
        auto w = cur.word("a port 'type.copy'");
        auto port = parse_output_port(w.text);
        if (!port)
            cur.fail(w.column, "malformed port '" + std::string(w.text) + "', expected type.copy");
        known_type(cur, port->type_name, w.column);
        return *port;
    }

    void parse_neuron(LineCursor& cur) {
        std::size_t col = cur.column();
        auto port = output_port(cur);
        if (!program_.neurons.insert(port).second)
            cur.fail(col, "neuron " + port.str() + " is declared twice");
    }

    void parse_weight(LineCursor& cur) {
        auto w = cur.word("an input port 'type.copy.slot'");
        auto in = parse_input_port(w.text);
        if (!in)
            cur.fail(w.column, "malformed input port '" + std::string(w.text) + "', expected type.copy.slot");
        const NeuronType& dst = known_type(cur, in->type_name, w.column);
        if (in->slot >= dst.arity())
            cur.fail(w.column, "slot " + std::to_string(in->slot) + " of " + in->str() +
                                   " is out of range for arity " + std::to_string(dst.arity()));
        cur.expect("<-");
        std::size_t out_col = cur.column();
        auto out = output_port(cur);
        const StreamKind& src_kind = program_.signature.at(out.type_name).output_kind;
        if (!(src_kind == dst.input_kinds[in->slot]))
            cur.fail(out_col, "kind mismatch: " + out.str() + " emits " + src_kind.str() + " but " +
                                  in->str() + " takes " + dst.input_kinds[in->slot].str());
        auto c = cur.word("a coefficient");
        auto coef = parse_real(c.text);
        if (!coef)
            cur.fail(c.column, "malformed coefficient '" + std::string(c.text) + "'");
        MatrixKey key{*in, out};
        if (!seen_weights_.insert(key).second)
            cur.fail(w.column, "duplicate weight for " + in->str() + " <- " + out.str());
        program_.matrix.set(std::move(key), *coef);
    }

    StreamValue parse_value(LineCursor& cur, const StreamKind& kind) {
        switch (kind.tag) {
        case StreamKind::Tag::Scalar: {
            auto w = cur.word("a scalar value");
            auto v = parse_real(w.text);
            if (!v)
                cur.fail(w.column, "malformed scalar '" + std::string(w.text) + "'");
            return *v;
        }
        case StreamKind::Tag::Vector: {
            std::size_t col = cur.column();
            if (!cur.peek('['))
                cur.fail(col, "expected a vector literal '[...]'");
            auto items = cur.bracketed('[', ']');
            if (items.size() != kind.dimension)
                cur.fail(col, "expected " + std::to_string(kind.dimension) + " components, got " +
                                  std::to_string(items.size()));
            VectorValue v;
            for (const auto& it : items) {
                auto x = parse_real(it.text);
                if (!x)
                    cur.fail(it.column, "malformed component '" + std::string(it.text) + "'");
                v.components.push_back(*x);
            }
            return v;
        }
        case StreamKind::Tag::Sample: {
            auto w = cur.word("a sample 'token/weight/sign'");
            auto parts = split(w.text, '/');
            if (parts.size() != 3)
                cur.fail(w.column, "expected a sample 'token/weight/sign'");
            if (!parts[0].empty() && !is_identifier(parts[0]))
                cur.fail(w.column, "sample token must be an identifier");
            auto weight = parse_real(parts[1]);
            if (!weight || *weight < 0.0)
                cur.fail(w.column, "sample weight must be a non-negative number");
            if (parts[2] != "+" && parts[2] != "-")
                cur.fail(w.column, "sample sign must be '+' or '-'");
            return SampleValue{kind.space, std::string(parts[0]), *weight, parts[2] == "-" ? -1 : +1};
        }
        case StreamKind::Tag::Matrix: {
            std::size_t col = cur.column();
            if (!cur.peek('{'))
                cur.fail(col, "expected a matrix literal '{...}'");
            MatrixValue m;
            std::set<MatrixKey> seen;
            for (const auto& it : cur.bracketed('{', '}')) {
                auto entry = parse_matrix_entry(it.text);
                if (!entry)
                    cur.fail(it.column, "expected 'type.copy.slot <- type.copy : coefficient'");
                if (!seen.insert(entry->first).second)
                    cur.fail(it.column, "duplicate matrix entry");
                m.set(entry->first, entry->second);
            }
            return m;
        }
        }
        cur.fail(1, "unreachable");
    }

    void parse_init(LineCursor& cur) {
        std::size_t col = cur.column();
        auto port = output_port(cur);
        if (program_.initial_outputs.count(port))
            cur.fail(col, "duplicate init for " + port.str());
        auto value = parse_value(cur, program_.signature.at(port.type_name).output_kind);
        program_.initial_outputs.emplace(std::move(port), std::move(value));
    }

    void parse_updater(LineCursor& cur) {
        std::size_t col = cur.column();
        auto port = output_port(cur);
        if (program_.updater)
            cur.fail(col, "only one updater is allowed");
        const auto& kind = program_.signature.at(port.type_name).output_kind;
        if (kind.tag != StreamKind::Tag::Matrix)
            cur.fail(col, "updater " + port.str() + " must emit matrix, not " + kind.str());
        program_.updater = std::move(port);
    }

    void parse_watch(LineCursor& cur) {
        std::size_t col = cur.column();
        auto port = output_port(cur);
        for (const auto& w : program_.watch)
            if (w == port)
                cur.fail(col, port.str() + " is already watched");
        program_.watch.push_back(std::move(port));
    }

    const TransformRegistry& registry_;
    Program program_;
    std::set<MatrixKey> seen_weights_;
};

inline std::string format_value(const StreamValue& value) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ScalarValue>) {
                return format_real(v);
            } else if constexpr (std::is_same_v<T, VectorValue>) {
                std::string out = "[";
                for (std::size_t i = 0; i < v.components.size(); ++i)
                    out += (i ? ", " : "") + format_real(v.components[i]);
                return out + "]";
            } else if constexpr (std::is_same_v<T, SampleValue>) {
                return v.payload + "/" + format_real(v.weight) + "/" + (v.sign < 0 ? "-" : "+");
            } else {
                std::string out = "{";
                bool first = true;
                for (const auto& [key, a] : v) {
                    out += (first ? "" : ", ") + format_matrix_entry(key, a);
                    first = false;
                }
                return out + "}";
            }
        },
        value.variant());
}

} // namespace detail

/// Parses a network file. Every failure is a ParseError carrying a 1-based
/// line and column; a successful result passes validate().
inline Program parse_program(std::string_view text,
                             const TransformRegistry& registry = builtin_registry()) {
    return detail::ProgramParser(registry).parse(text);
}

inline Program deserialize(std::string_view text, const TransformRegistry& registry = builtin_registry()) {
    return parse_program(text, registry);
}

/// Canonical text: types, neurons, weights and inits in port order, then the
/// updater and the watch list in declaration order.
inline std::string serialize(const Program& program) {
    std::string out;
    for (const auto& [name, type] : program.signature) {
        out += "type " + name + " arity " + std::to_string(type.arity()) + " in";
        for (const auto& k : type.input_kinds)
            out += " " + k.str();
        out += " out " + type.output_kind.str() + " transform " + type.transform.str() + "\n";
    }
    for (const auto& n : program.neurons)
        out += "neuron " + n.str() + "\n";
    for (const auto& [key, a] : program.matrix)
        out += "weight " + key.input.str() + " <- " + key.output.str() + " " + format_real(a) + "\n";
    for (const auto& [port, value] : program.initial_outputs)
        out += "init " + port.str() + " " + detail::format_value(value) + "\n";
    if (program.updater)
        out += "updater " + program.updater->str() + "\n";
    for (const auto& w : program.watch)
        out += "watch " + w.str() + "\n";
    return out;
}

} // namespace dmm

#endif // DMM_DSL_HPP
