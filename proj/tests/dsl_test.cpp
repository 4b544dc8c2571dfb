// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <string>

#include <gtest/gtest.h>

#include <dmm/dsl.hpp>

#include "support.hpp"

using namespace dmm;

namespace {

const std::string two_ids =
    "type x arity 1 in scalar out scalar transform identity_scalar\n"
    "type y arity 1 in scalar out scalar transform identity_scalar\n";

/// Parses `text`, expecting failure; returns the diagnostic.
ParseError parse_failure(const std::string& text) {
    try {
        parse_program(text);
    } catch (const ParseError& e) {
        return e;
    }
    ADD_FAILURE() << "parsed without error:\n" << text;
    return ParseError(0, 0, "");
}

std::size_t column_of(const std::string& line, const std::string& needle) {
    return line.find(needle) + 1;
}

} // namespace

TEST(ParseProgram, Fibonacci) {
    Program p = parse_program(dmm::testing::read_file(dmm::testing::network_path("fib.dmm")));
    EXPECT_EQ(active_neurons(p.matrix).size(), 2u);
    EXPECT_EQ(p.matrix.size(), 3u);
    EXPECT_EQ(p.watch, (std::vector<OutputPortId>{{"x", 0}}));
    EXPECT_EQ(p.initial_outputs.at({"x", 0}).scalar(), 1.0);
    EXPECT_TRUE(validate(p).empty());
}

TEST(ParseProgram, ScalarIntoSampleSlotNamesBothPorts) {
    const std::string line = "weight t.0.0 <- x.0 1";
    auto e = parse_failure(two_ids +
                           "type t arity 1 in sample<tok> out sample<tok> transform sample_identity\n" + line);
    EXPECT_EQ(e.line(), 4u);
    EXPECT_EQ(e.column(), column_of(line, "x.0"));
    EXPECT_NE(e.message().find("x.0"), std::string::npos);
    EXPECT_NE(e.message().find("t.0.0"), std::string::npos);
}

TEST(ParseProgram, EmptyFileIsAnEmptySignature) {
    for (const char* text : {"", "\n\n", "# only a comment\n   \n"}) {
        auto e = parse_failure(text);
        EXPECT_EQ(e.line(), 1u);
        EXPECT_EQ(e.column(), 1u);
        EXPECT_NE(e.message().find("empty signature"), std::string::npos);
    }
}

TEST(ParseProgram, MalformedCoefficientLocation) {
    auto e = parse_failure(two_ids + "weight x.0.0 <- y.0 abc\n");
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 21u);
}

TEST(ParseProgram, DuplicateWeightIsAnError) {
    auto e = parse_failure(two_ids + "weight x.0.0 <- y.0 1\nweight x.0.0 <- y.0 2\n");
    EXPECT_EQ(e.line(), 4u);
    EXPECT_NE(e.message().find("duplicate"), std::string::npos);
    // a zero weight still counts as a declaration
    EXPECT_THROW(parse_program(two_ids + "weight x.0.0 <- y.0 0\nweight x.0.0 <- y.0 2\n"), ParseError);
}

TEST(ParseProgram, ZeroWeightStoresNothing) {
    Program p = parse_program(two_ids + "weight x.0.0 <- y.0 0\nweight y.0.0 <- x.0 -0\n");
    EXPECT_TRUE(p.matrix.empty());
}

TEST(ParseProgram, DiagnosticsPointAtTheOffendingToken) {
    struct Case {
        std::string line;
        std::string at;
    };
    const std::vector<Case> cases{
        {"type x arity 1 in scalar out scalar transform identity_scalar", "x arity"},
        {"type z arity 1 in scalar out scalar transform nope", "nope"},
        {"type z arity 2 in scalar out scalar transform multiply_scalars", "out"},
        {"type z arity 1 in blob out scalar transform identity_scalar", "blob"},
        {"type z arity 1 in vector<0> out vector<0> transform identity_vector", "0>"},
        {"type z arity 0 in out sample<t> transform sample_source(a:1, b:-1)", "b:-1"},
        {"type z arity 0 in out sample<t> transform sample_source(a:1", "("},
        {"type z arity 1 in scalar out matrix transform tanh_scalar", "tanh_scalar"},
        {"wieght x.0.0 <- y.0 1", "wieght"},
        {"weight x.0.1 <- y.0 1", "x.0.1"},
        {"weight x.0 <- y.0 1", "x.0"},
        {"weight x.0.0 <- q.0 1", "q.0"},
        {"weight x.0.0 y.0 1", "y.0"},
        {"weight x.0.0 <- y.0 1 extra", "extra"},
        {"weight x.0.0 <- y.0 nan", "nan"},
        {"weight x.0.0 <- y.0 1e999", "1e999"},
        {"init x.0 1 2", "2"},
        {"init x.0", ""},
        {"updater x.0", "x.0"},
        {"watch x.-1", "x.-1"},
    };
    for (const auto& c : cases) {
        auto e = parse_failure(two_ids + c.line + "\n");
        EXPECT_EQ(e.line(), 3u) << c.line;
        std::size_t expected = c.at.empty() ? c.line.size() + 1 : column_of(c.line, c.at);
        EXPECT_EQ(e.column(), expected) << c.line << " -> " << e.what();
    }
}

TEST(ParseProgram, DuplicateDeclarations) {
    EXPECT_THROW(parse_program(two_ids + "watch x.0\nwatch x.0\n"), ParseError);
    EXPECT_THROW(parse_program(two_ids + "init x.0 1\ninit x.0 2\n"), ParseError);
    EXPECT_THROW(parse_program(two_ids + "neuron x.3\nneuron x.3\n"), ParseError);
    EXPECT_THROW(parse_program(
                     "type m arity 0 in out matrix transform const_matrix()\nupdater m.0\nupdater m.1\n"),
                 ParseError);
}

TEST(ParseProgram, ValueLiteralsForEveryKind) {
    Program p = parse_program(R"(
type v arity 1 in vector<3> out vector<3> transform identity_vector(3)   # trailing comment
type t arity 1 in sample<tok> out sample<tok> transform sample_identity
type m arity 1 in matrix out matrix transform identity_matrix_stream
init v.0 [1, -2.5, 3e2]
init t.0 hello/0.5/-
init t.1 /0/+
init m.0 {v.0.0 <- v.0 : 1, t.0.0 <- t.1 : -2}
)");
    EXPECT_EQ(p.initial_outputs.at({"v", 0}).vector().components, (std::vector<double>{1, -2.5, 300}));
    EXPECT_EQ(p.initial_outputs.at({"t", 0}).sample(), (SampleValue{"tok", "hello", 0.5, -1}));
    EXPECT_EQ(p.initial_outputs.at({"t", 1}).sample(), neutral(StreamKind::sample("tok")).sample());
    EXPECT_EQ(p.initial_outputs.at({"m", 0}).matrix().size(), 2u);

    EXPECT_THROW(parse_program("type v arity 0 in out vector<2> transform const_matrix()\n"), ParseError);
    const std::string vec = "type v arity 1 in vector<2> out vector<2> transform identity_vector\n";
    EXPECT_THROW(parse_program(vec + "init v.0 [1]\n"), ParseError);
    EXPECT_THROW(parse_program(vec + "init v.0 1\n"), ParseError);
    const std::string smp = "type t arity 1 in sample<s> out sample<s> transform sample_identity\n";
    EXPECT_THROW(parse_program(smp + "init t.0 a/1\n"), ParseError);
    EXPECT_THROW(parse_program(smp + "init t.0 a/-1/+\n"), ParseError);
    EXPECT_THROW(parse_program(smp + "init t.0 a/1/*\n"), ParseError);
}

TEST(ParseProgram, CrlfAndCommentsAreTolerated) {
    Program p = parse_program("# header\r\n" + std::string("type x arity 1 in scalar out scalar transform identity_scalar  # c\r\n") +
                              "weight x.0.0<-x.0 1\r\n");
    EXPECT_EQ(p.matrix.size(), 1u);
}

TEST(Serialize, RoundTripsShippedNetworks) {
    for (const auto& name : dmm::testing::shipped_networks()) {
        Program p = parse_program(dmm::testing::read_file(dmm::testing::network_path(name)));
        const std::string canonical = serialize(p);
        Program back = deserialize(canonical);
        EXPECT_EQ(back, p) << name;
        EXPECT_EQ(back.matrix.size(), p.matrix.size()) << name;
        EXPECT_EQ(serialize(back), canonical) << name;
    }
}

TEST(Serialize, CanonicalFormIsStable) {
    const std::string text =
        "type y arity 1 in scalar out scalar transform identity_scalar\n"
        "type x arity 1 in scalar out scalar transform identity_scalar\n"
        "watch y.0\nwatch x.0\n"
        "weight y.0.0 <- x.0 +0.10\n"
        "weight x.0.0 <- y.0 1E2\n";
    const std::string canonical = serialize(parse_program(text));
    EXPECT_EQ(canonical,
              "type x arity 1 in scalar out scalar transform identity_scalar\n"
              "type y arity 1 in scalar out scalar transform identity_scalar\n"
              "weight x.0.0 <- y.0 100\n"
              "weight y.0.0 <- x.0 0.1\n"
              "watch y.0\n"
              "watch x.0\n");
}

TEST(Serialize, RandomProgramsRoundTripExactly) {
    std::mt19937_64 gen(12);
    for (int trial = 0; trial < 25; ++trial) {
        auto rnn = dmm::testing::random_rnn(gen, 1 + trial % 6, trial % 3);
        std::string text = serialize(rnn.program);
        Program back = parse_program(text);
        ASSERT_EQ(back, rnn.program) << text;
        for (const auto& [key, a] : back.matrix)
            ASSERT_EQ(a, rnn.program.matrix.get(key.input, key.output));
    }
}
