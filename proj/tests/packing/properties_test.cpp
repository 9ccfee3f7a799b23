#include "../support/algebra.hpp"

#include <gtest/gtest.h>

using namespace amcs::packing;
using namespace amcs::testing;

namespace {

TEST(BufferAlgebra, RandomSequencesKeepInvariants) {
    auto rep = run_buffer_algebra(17, 1000);
    EXPECT_EQ(rep.sequences, 1000u);
    EXPECT_GT(rep.applies, 3000u);
    for (const auto& v : rep.violations) ADD_FAILURE() << v;
}

TEST(DecodeRoundTrip, RandomDirectiveSets) {
    Rng rng(23);
    for (int i = 0; i < 2000; ++i) {
        IdAllocator ids;
        auto b = random_buffer(rng, ids);
        bool single = false;
        auto d = random_directives(rng, b, single);
        amcs::asp::AnswerSet as;
        as.atoms = render_directives(d, single);
        auto decoded = decode(as, b);
        ASSERT_EQ(decoded.directives, d) << i;
        ASSERT_TRUE(decoded.warnings.empty()) << i;
    }
}

} // namespace
