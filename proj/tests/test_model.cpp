#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "fqt/model.hpp"
#include "oracles/oracles.hpp"

using namespace fqt;

namespace {

SystemParams params_of(const oracle::Couplings& c) {
    SystemParams p;
    p.omega_e = c.we;
    p.omega_0 = c.w0;
    p.omega_c = c.wc;
    p.omega_eb = c.web;
    p.omega_bc = c.wbc;
    p.omega_ce = c.wce;
    return p;
}

std::set<std::size_t> labels(const DegeneracyClass& c) {
    std::set<std::size_t> out;
    for (std::size_t i : c.levels) out.insert(i + 1);
    return out;
}

} // namespace

TEST(LevelTable, CanonicalEnergies) {
    const LevelTable t = build_level_table(SystemParams::canonical());
    const double expected[8] = {1, 0, -1, 0, 0, -1, 0, 1};
    for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(t.energy(i), expected[i]) << "level " << i + 1;
}

TEST(LevelTable, NullHamiltonian) {
    SystemParams p;
    p.omega_eb = p.omega_bc = 0.0;
    const LevelTable t = build_level_table(p);
    for (const Level& l : t.levels) EXPECT_EQ(l.energy, 0.0);
    for (const Transition& tr : t.transitions) EXPECT_EQ(tr.gap, 0.0);
}

TEST(LevelTable, MatchesBruteForceEnumeration) {
    const oracle::Couplings c{0.3, 0.1, 0.2, 1.0, 1.0, 0.5};
    const auto e = oracle::brute_energies(c);
    const LevelTable t = build_level_table(params_of(c));
    for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(t.energy(i), e[i], 1e-15);
}

TEST(LevelTable, TransitionPairsPerBath) {
    const LevelTable t = build_level_table(SystemParams::canonical());
    std::map<Bath, std::set<std::set<std::size_t>>> got;
    for (const Transition& tr : t.transitions) got[tr.bath].insert({tr.upper + 1, tr.lower + 1});
    using S = std::set<std::set<std::size_t>>;
    EXPECT_EQ(got[Bath::base], (S{{1, 3}, {2, 4}, {5, 7}, {6, 8}}));
    EXPECT_EQ(got[Bath::emitter], (S{{1, 5}, {2, 6}, {3, 7}, {4, 8}}));
    EXPECT_EQ(got[Bath::collector], (S{{1, 2}, {3, 4}, {5, 6}, {7, 8}}));
}

TEST(LevelTable, GapsNonNegativeAndExact) {
    for (const oracle::Couplings& c :
         {oracle::Couplings{0, 0, 0, 1, 1, 0}, oracle::Couplings{0.3, 0.1, 0.2, 1, 1, 0.5},
          oracle::Couplings{-0.7, 0.4, -0.1, 0.2, 1.3, -0.8}}) {
        const LevelTable t = build_level_table(params_of(c));
        for (const Transition& tr : t.transitions) {
            EXPECT_GE(tr.gap, 0.0);
            EXPECT_EQ(tr.gap, t.energy(tr.upper) - t.energy(tr.lower));
        }
    }
}

TEST(LevelTable, DegeneratePairsKeepLowerIndexAsUpper) {
    const LevelTable t = build_level_table(SystemParams::canonical());
    int degenerate = 0;
    for (const Transition& tr : t.transitions) {
        if (!tr.degenerate()) continue;
        ++degenerate;
        EXPECT_LT(tr.upper, tr.lower);
    }
    EXPECT_EQ(degenerate, 2);  // base II <-> IV: {2,4} and {5,7}
}

TEST(LevelTable, EveryTransitionFlipsExactlyOneSpin) {
    const LevelTable t = build_level_table(params_of({0.3, 0.1, 0.2, 1, 1, 0.5}));
    int per_bath[3] = {0, 0, 0};
    for (const Transition& tr : t.transitions) {
        EXPECT_EQ(std::popcount(tr.upper ^ tr.lower), 1);
        EXPECT_EQ(tr.upper ^ tr.lower, flip_mask(tr.bath));
        ++per_bath[static_cast<int>(tr.bath)];
    }
    for (int n : per_bath) EXPECT_EQ(n, 4);
}

TEST(LevelTable, GlobalSpinFlipSymmetry) {
    for (const oracle::Couplings& c :
         {oracle::Couplings{0, 0, 0, 1, 1, 0}, oracle::Couplings{0, 0, 0, 0.3, -1.7, 0.9}}) {
        const LevelTable t = build_level_table(params_of(c));
        for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(t.energy(i), t.energy(7 - i));
    }
}

TEST(Degeneracy, CanonicalClasses) {
    const auto cls = degeneracy_classes(build_level_table(SystemParams::canonical()));
    ASSERT_EQ(cls.size(), 4u);
    EXPECT_EQ(labels(cls[0]), (std::set<std::size_t>{1, 8}));
    EXPECT_EQ(labels(cls[1]), (std::set<std::size_t>{2, 7}));
    EXPECT_EQ(labels(cls[2]), (std::set<std::size_t>{3, 6}));
    EXPECT_EQ(labels(cls[3]), (std::set<std::size_t>{4, 5}));
}

TEST(Degeneracy, GenericParamsAreSingletons) {
    const auto cls = degeneracy_classes(build_level_table(params_of({0.31, 0.17, 0.23, 1.0, 0.87, 0.41})));
    EXPECT_EQ(cls.size(), 8u);
}

TEST(Degeneracy, MatchesGroupByOfBruteForce) {
    const oracle::Couplings c{0.5, 0.0, 0.5, 1.0, 1.0, 0.0};
    const auto e = oracle::brute_energies(c);
    std::map<long long, std::set<std::size_t>> expected;
    for (std::size_t i = 0; i < 8; ++i) expected[std::llround(e[i] * 1e9)].insert(i + 1);
    std::set<std::set<std::size_t>> want;
    for (auto& [k, v] : expected) want.insert(v);

    std::set<std::set<std::size_t>> got;
    for (const auto& cl : degeneracy_classes(build_level_table(params_of(c)))) got.insert(labels(cl));
    EXPECT_EQ(got, want);
}

TEST(Validation, RejectsBadParameters) {
    SystemParams p = SystemParams::canonical();
    p.omega_ce = std::nan("");
    EXPECT_THROW(validate(p), ModelError);
    EXPECT_THROW(validate(SystemParams::canonical(1.0, Sinusoidal{1.5, 1.0})), ModelError);
    EXPECT_THROW(validate(SystemParams::canonical(1.0, PiFlip{0.0})), ModelError);
    EXPECT_THROW(validate(SystemParams::canonical(1.0, Tabulated{{0.1, 0.3}, 1.0})), ModelError);
    EXPECT_NO_THROW(validate(SystemParams::canonical(1.0, Tabulated{{0.1, -0.1}, 1.0})));

    EXPECT_THROW(validate(BathSpec{0.0, 0.1, 0.1, 1.0}), ModelError);
    EXPECT_THROW(validate(BathSpec{0.1, -0.1, 0.1, 1.0}), ModelError);
    EXPECT_THROW(validate(BathSpec{0.1, 0.1, 0.1, 0.0}), ModelError);
    EXPECT_NO_THROW(validate(BathSpec{0.1, 0.0, 0.1, 1.0}));
}

TEST(Validation, LambdaMessageNamesTheBound) {
    try {
        validate(SystemParams::canonical(1.0, Sinusoidal{1.5, 1.0}));
        FAIL();
    } catch (const ModelError& e) {
        EXPECT_NE(std::string(e.what()).find("0 <= lambda <= 1"), std::string::npos);
    }
}
