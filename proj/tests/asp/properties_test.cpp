#include "amcs/asp/parser.hpp"
#include "amcs/asp/solve.hpp"

#include "../support/gen.hpp"
#include "../support/helpers.hpp"
#include "../support/paths.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace amcs::asp;
using namespace amcs::testing;

namespace {

std::string serialize(const std::vector<AnswerSet>& models) {
    std::string out;
    for (const auto& m : models) out += render_answer_set(m) + "--\n";
    return out;
}

TEST(Properties, SolveAgreesWithOracle) {
    Rng rng(2024);
    int nonempty = 0;
    for (int i = 0; i < 400; ++i) {
        std::string text = random_ground_program(rng);
        auto gp = ground_text(text);
        auto models = solve(gp, std::nullopt);
        ASSERT_EQ(models, oracle_answer_sets(gp)) << text;
        for (const auto& m : models) ASSERT_TRUE(check_stable(gp, m.atoms)) << text;
        nonempty += !models.empty();
    }
    EXPECT_GT(nonempty, 100);
}

TEST(Properties, StratifiedHasOneModel) {
    Rng rng(7);
    for (int i = 0; i < 300; ++i) {
        auto s = random_stratified(rng);
        auto models = solve(ground_text(s.text), std::nullopt);
        ASSERT_EQ(models.size(), 1u) << s.text;
        std::vector<std::string> got;
        for (const auto& a : models[0].atoms) got.push_back(to_string(a));
        std::sort(got.begin(), got.end());
        ASSERT_EQ(got, s.model) << s.text;
    }
}

TEST(Properties, GroundingIsIdempotent) {
    Rng rng(99);
    for (int i = 0; i < 200; ++i) {
        std::string text = random_ground_program(rng);
        auto gp = ground_text(text);
        Program reparsed;
        ASSERT_NO_THROW(reparsed = parse(to_string(gp))) << text << "\n" << to_string(gp);
        auto again = ground(reparsed, {});
        ASSERT_EQ(visible(solve(gp, std::nullopt)), visible(solve(again, std::nullopt))) << text;
    }
    const char* nonground[] = {
        "{p(1); p(2); p(3)}. m(M) :- M = #max{X : p(X)}.",
        "q(a). q(b). {r(X)} :- q(X). c(N) :- N = #count{X : r(X)}.",
        "n(X) :- X = 0..4. e(X) :- n(X), X\\2 = 0. o(X) :- n(X), not e(X).",
    };
    for (const char* text : nonground) {
        auto gp = ground_text(text);
        auto again = ground(parse(to_string(gp)), {});
        EXPECT_EQ(visible(solve(gp, std::nullopt)), visible(solve(again, std::nullopt))) << text;
    }
}

TEST(Properties, OptimumDominatesOracle) {
    Rng rng(5);
    ProgramShape shape;
    shape.weights = true;
    int checked = 0;
    for (int i = 0; i < 250; ++i) {
        std::string text = random_ground_program(rng, shape);
        auto gp = ground_text(text);
        auto all = oracle_answer_sets(gp);
        auto best = solve_optimal(gp);
        ASSERT_EQ(best.has_value(), !all.empty()) << text;
        if (!best) continue;
        ++checked;
        std::int64_t top = 0;
        for (const auto& m : all) top = std::max(top, *m.objective_value);
        ASSERT_EQ(best->objective_value, top) << text;
        auto first = std::find_if(all.begin(), all.end(), [&](const AnswerSet& m) { return m.objective_value == top; });
        ASSERT_EQ(*best, *first) << text;
    }
    EXPECT_GT(checked, 50);
}

TEST(Properties, Deterministic) {
    Rng rng(31);
    for (int i = 0; i < 50; ++i) {
        std::string text = random_ground_program(rng);
        EXPECT_EQ(serialize(solve(ground_text(text), std::nullopt)), serialize(solve(ground_text(text), std::nullopt)));
    }
    for (int e = 1; e <= 5; ++e) {
        std::string dir = "ex" + std::to_string(e) + "/";
        std::string p = slurp(golden(dir + "program.lp")), f = slurp(golden(dir + "facts.lp"));
        EXPECT_EQ(serialize(solve(ground_text(p, f), std::nullopt)), serialize(solve(ground_text(p, f), std::nullopt)));
        EXPECT_EQ(to_string(ground_text(p, f)), to_string(ground_text(p, f)));
    }
}

} // namespace
