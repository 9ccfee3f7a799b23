#include "amcs/runtime/match.hpp"

#include "build.hpp"

#include <gtest/gtest.h>

using namespace amcs::runtime;
using amcs::asp::parse_term;
using namespace amcs::testing;

namespace {

TEST(Match, BindsAndChecksConsistency) {
    Bindings b;
    EXPECT_TRUE(match(parse_term("f(X,Y,X)"), parse_term("f(1,a,1)"), b));
    EXPECT_EQ(b.at("X"), parse_term("1"));
    EXPECT_EQ(b.at("Y"), parse_term("a"));
    Bindings c;
    EXPECT_FALSE(match(parse_term("f(X,X)"), parse_term("f(1,2)"), c));
    Bindings d;
    EXPECT_FALSE(match(parse_term("g(X)"), parse_term("f(1)"), d));
}

TEST(Match, AnonymousMatchesAnything) {
    Bindings b;
    EXPECT_TRUE(match(parse_term("f(_,_)"), parse_term("f(1,2)"), b));
    EXPECT_TRUE(b.empty());
}

TEST(Match, Substitute) {
    Bindings b{{"X", parse_term("a")}};
    EXPECT_EQ(substitute(parse_term("g(X,Y)"), b), parse_term("g(a,Y)"));
}

TEST(Match, AllCombinations) {
    auto facts = term_set({"p(1)", "p(2)", "q(2)", "q(3)"});
    std::vector<std::string> found;
    match_all(terms({"p(X)", "q(Y)"}), facts, {}, [&](const Bindings& b) {
        found.push_back(amcs::asp::to_string(b.at("X")) + amcs::asp::to_string(b.at("Y")));
        return true;
    });
    EXPECT_EQ(found.size(), 4u);
    int calls = 0;
    match_all(terms({"p(X)", "q(X)"}), facts, {}, [&](const Bindings& b) {
        ++calls;
        EXPECT_EQ(b.at("X"), parse_term("2"));
        return false;
    });
    EXPECT_EQ(calls, 1);
}

TEST(Match, NamedVariables) {
    EXPECT_EQ(named_variables(parse_term("f(X,Y,X,_)")), (std::vector<std::string>{"X", "Y"}));
}

} // namespace
