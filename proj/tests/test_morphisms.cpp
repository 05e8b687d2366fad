#include <gtest/gtest.h>

#include "nck/nck.hpp"
#include "support/gen.hpp"
#include "support/morphism_pool.hpp"
#include "support/oracle.hpp"

using namespace nck;

TEST(Morphism, IdentityPasses) {
    gen::Rng rng(31);
    for (int k = 0; k < 50; ++k) {
        const Model m = gen::model(rng, 1 + gen::pick(rng, 5), {"p", "q"});
        const auto r = check_model_morphism(m, m, identity_map(m.size()));
        EXPECT_TRUE(r.ok());
        EXPECT_TRUE(r.violations.empty());
    }
}

TEST(Morphism, VarViolationHasWitness) {
    const Model m = parse_model("worlds: a b\nR1:\nR2:\nv: p = a\n");
    const auto r = check_model_morphism(m, m, WorldMap{{1, 1}}, {"p"});
    EXPECT_FALSE(r.var_ok);
    EXPECT_TRUE(r.forth_ok);
    EXPECT_TRUE(r.back_ok);
    EXPECT_FALSE(r.surjective);
    ASSERT_FALSE(r.violations.empty());
    EXPECT_EQ(r.violations[0].condition, "Var");
    EXPECT_EQ(r.violations[0].witness.at(0), "a");
    // Var is checked only over the supplied variables.
    EXPECT_TRUE(check_model_morphism(m, m, WorldMap{{1, 1}}, {}).morphism());
}

TEST(Morphism, ForthAndBackViolations) {
    const Model src = parse_model("worlds: x y z\nR1: x->y\nR2: x->z\nv: p = y\n");
    const Model tgt = parse_model("worlds: a b c\nR1: a->b\nR2:\nv: p = b\n");
    const auto r = check_model_morphism(src, tgt, WorldMap{{0, 1, 2}});
    EXPECT_TRUE(r.var_ok);
    EXPECT_FALSE(r.forth_ok);
    EXPECT_TRUE(r.back_ok);
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_EQ(r.violations[0].witness, (std::vector<std::string>{"x", "y", "z"}));

    // a R2 d has no preimage under x's R2-successors.
    const Model tgt2 = parse_model("worlds: a b c d\nR1: a->b\nR2: a->c a->d\nv: p = b\n");
    const auto r2 = check_model_morphism(src, tgt2, WorldMap{{0, 1, 2}});
    EXPECT_TRUE(r2.forth_ok);
    EXPECT_FALSE(r2.back_ok);
    EXPECT_EQ(r2.violations.at(0).condition, "Back");
    EXPECT_EQ(r2.violations.at(0).witness, (std::vector<std::string>{"x", "b", "d"}));

    // Distinct successor images b, c are both matched, so Back holds.
    const Model tgt3 = parse_model("worlds: a b c\nR1: a->b\nR2: a->c a->b\nv: p = b\n");
    EXPECT_TRUE(check_model_morphism(src, tgt3, WorldMap{{0, 1, 2}}).back_ok);
    EXPECT_FALSE(describe(r2.violations.at(0)).empty());
}

TEST(Morphism, NonTotalMapRejected) {
    const Model m = parse_model(fixtures::kuhn);
    EXPECT_THROW(check_model_morphism(m, m, WorldMap{{0, 1}}), std::invalid_argument);
    EXPECT_THROW(check_frame_morphism(m, m, WorldMap{{0, 1, 9}}), std::invalid_argument);
}

TEST(FrameMorphism, ConstantMapOntoReflexivePoint) {
    const Model f = parse_model(fixtures::chain_frame), g = parse_model(fixtures::point_frame);
    const auto r = check_frame_morphism(f, g, parse_map(fixtures::chain_to_point_map, f, g));
    EXPECT_TRUE(r.ok());
    for (auto t : {PropertyTag::serial, PropertyTag::reflexive, PropertyTag::transitive, PropertyTag::symmetric,
                   PropertyTag::euclidean}) {
        EXPECT_TRUE(check_property(g, t).holds);
        EXPECT_FALSE(check_property(f, t).holds);
    }
}

TEST(FrameMorphism, ConstantMapOntoLooplessPointIsVacuous) {
    const Model f = parse_model(fixtures::chain_frame);
    const Model g = parse_model("worlds: a b\nR1:\nR2:\n");
    const auto r = check_frame_morphism(f, g, WorldMap{{0, 0, 0}});
    EXPECT_TRUE(r.forth_ok);
    EXPECT_TRUE(r.back_ok);
    EXPECT_TRUE(r.morphism());
    EXPECT_FALSE(r.surjective);
}

TEST(FrameMorphism, IdentityPasses) {
    const Model f = parse_model(fixtures::chain_frame);
    EXPECT_TRUE(check_frame_morphism(f, f, identity_map(3)).ok());
}

// On the chain and the reflexive point, frame validity agrees in both directions.
TEST(FrameMorphism, ValidityAgreesOnChainAndPoint) {
    const Model f = parse_model(fixtures::chain_frame), g = parse_model(fixtures::point_frame);
    // Up to equivalence, depth-1 formulas over p are Boolean functions of p and [.]p,
    // since [.]true, [.]false are valid and [.]~p is equivalent to [.]p.
    const Formula atoms[] = {parse("p"), parse("[.]p")};
    int checked = 0;
    for (unsigned table = 0; table < 16; ++table) {
        std::optional<Formula> dnf;
        for (unsigned row = 0; row < 4; ++row) {
            if (!((table >> row) & 1U)) continue;
            Formula lit0 = (row & 1U) ? atoms[0] : Formula::neg(atoms[0]);
            Formula lit1 = (row & 2U) ? atoms[1] : Formula::neg(atoms[1]);
            const Formula term = Formula::conj(lit0, lit1);
            dnf = dnf ? Formula::disj(*dnf, term) : term;
        }
        const Formula phi = dnf ? *dnf : Formula::bot();
        EXPECT_EQ(valid_on_frame(f, phi).valid, valid_on_frame(g, phi).valid) << print(phi);
        ++checked;
    }
    EXPECT_EQ(checked, 16);
    gen::Rng rng(32);
    for (int k = 0; k < 300; ++k) {
        const Formula phi = gen::formula(rng, Language::Dot, {"p"}, 2);
        EXPECT_EQ(valid_on_frame(f, phi).valid, valid_on_frame(g, phi).valid) << print(phi);
    }
}

// Pulling a valuation back along f always yields a model morphism, so source
// validity reaches the image. Pushing one forward does not when f merges worlds.
TEST(FrameMorphism, ImageValidityDoesNotReachTheSource) {
    const Model src = parse_model("worlds: a b\nR1: a->a\nR2: a->b\n");
    const Model tgt = parse_model("worlds: c\nR1:\nR2:\n");
    const WorldMap f{{0, 0}};
    ASSERT_TRUE(check_frame_morphism(src, tgt, f).ok());
    const Formula phi = parse("[.]p");
    EXPECT_TRUE(valid_on_frame(tgt, phi).valid);
    const auto r = valid_on_frame(src, phi);
    ASSERT_FALSE(r.valid);
    EXPECT_FALSE(oracle::sat(*r.counter, 0, phi));
    EXPECT_TRUE(r.counter->holds("p", 0));
    EXPECT_FALSE(r.counter->holds("p", 1));
    // The pushed-forward valuation breaks Var, so the map is no model morphism.
    Model pushed = tgt;
    pushed.set_true("p", 0);
    EXPECT_FALSE(check_model_morphism(*r.counter, pushed, f, {"p"}).var_ok);
}

TEST(FrameMorphism, ValidityTransfersOnSmallFrames) {
    gen::Rng rng(33);
    const auto small = enumerate_frames(2, PropertyTag::all);
    const auto large = enumerate_frames(3, PropertyTag::all);
    int found = 0, transferred = 0;
    for (int k = 0; k < 2000 && found < 40; ++k) {
        const Model a(to_frame(large[gen::pick(rng, large.size())]));
        const Model b(to_frame(small[gen::pick(rng, small.size())]));
        const auto f = find_morphism(a, b, {}, true);
        if (!f) continue;
        ASSERT_TRUE(check_frame_morphism(a, b, *f).ok());
        ++found;
        for (int j = 0; j < 20; ++j) {
            const Formula phi = gen::formula(rng, Language::Dot, {"p"}, 1 + j % 2);
            const bool src_valid = valid_on_frame(a, phi).valid;
            if (src_valid) ASSERT_TRUE(valid_on_frame(b, phi).valid) << print(phi);
            transferred += src_valid;
        }
    }
    EXPECT_GE(found, 10);
    EXPECT_GT(transferred, 0);
}

TEST(FindMorphism, RecoversSerializationProjection) {
    const Model in = parse_model(fixtures::serialize_input);
    const TransformResult r = serialize(in);
    const auto f = find_morphism(r.output, in, {}, true);
    ASSERT_TRUE(f);
    EXPECT_TRUE(check_model_morphism(r.output, in, *f, {}).ok());
    EXPECT_TRUE(check_model_morphism(r.output, in, r.map, {}).ok());
    EXPECT_LE(f->image, r.map.image);
}

TEST(FindMorphism, NoneWhenVariableUnmatched) {
    const Model src = parse_model("worlds: a\nR1:\nR2:\nv: p =\n");
    const Model tgt = parse_model("worlds: b\nR1:\nR2:\nv: p = b\n");
    EXPECT_FALSE(find_morphism(src, tgt, {"p"}, false));
}

TEST(FindMorphism, OneWorldIdentity) {
    const Model m = parse_model("worlds: w\nR1: w->w\nR2:\n");
    const auto f = find_morphism(m, m, {}, true);
    ASSERT_TRUE(f);
    EXPECT_EQ(*f, identity_map(1));
}

TEST(FindMorphism, BudgetEnforced) {
    gen::Rng rng(34);
    const Model big = gen::model(rng, 12, {});
    EXPECT_THROW(find_morphism(big, big, {}, false), std::length_error);
    EXPECT_THROW(find_morphism(big, big, {}, false, 100), std::length_error);
}

TEST(FindMorphism, LeastAmongAllPassingMaps) {
    gen::Rng rng(35);
    for (int k = 0; k < 30; ++k) {
        const Model a = gen::model(rng, 3, {"p"}), b = gen::model(rng, 2, {"p"});
        std::optional<WorldMap> least;
        for (unsigned code = 0; code < 8 && !least; ++code) {
            // Source world 0 is the most significant digit.
            WorldMap m{{(code >> 2) & 1U, (code >> 1) & 1U, code & 1U}};
            if (check_model_morphism(a, b, m, {"p"}).morphism()) least = m;
        }
        EXPECT_EQ(find_morphism(a, b, {"p"}, false), least);
    }
}

TEST(MapFormat, ParseAndPrint) {
    const Model a = parse_model(fixtures::chain_frame), b = parse_model(fixtures::point_frame);
    const WorldMap f = parse_map(fixtures::chain_to_point_map, a, b);
    EXPECT_EQ(f, (WorldMap{{0, 0, 0}}));
    EXPECT_EQ(print_map(f, a, b), fixtures::chain_to_point_map);
    EXPECT_THROW(parse_map("s => s'\nt => s'\n", a, b), ModelError);
    EXPECT_THROW(parse_map("s => s'\nt => s'\nu => zz\n", a, b), ModelError);
    EXPECT_THROW(parse_map("s => s'\nt => s'\nu => s'\nu => s'\n", a, b), ModelError);
    EXPECT_THROW(parse_map("s -> s'\n", a, b), ModelError);
}

TEST(Invariance, PooledMorphismsPreserveTruth) {
    gen::Rng rng(36);
    const auto pool = morphism_pool(rng, 200);
    ASSERT_EQ(pool.size(), 200u);
    for (const auto& c : pool) {
        ASSERT_TRUE(check_model_morphism(c.src, c.tgt, c.map, {"p", "q"}).morphism());
        for (int j = 0; j < 10; ++j) {
            const Formula phi = gen::formula(rng, j % 2 ? Language::Dot : Language::Plus, {"p", "q"}, 2);
            for (std::size_t x = 0; x < c.src.size(); ++x)
                ASSERT_EQ(satisfies(c.src, x, phi), satisfies(c.tgt, c.map(x), phi)) << print(phi) << " via " << c.origin;
        }
    }
}

TEST(Invariance, MorphicImagesAreEquivalent) {
    gen::Rng rng(37);
    for (const auto& c : morphism_pool(rng, 60))
        for (std::size_t x = 0; x < c.src.size(); ++x)
            for (auto lang : {Language::Dot, Language::Plus}) {
                const auto r = equivalent({c.src, x}, {c.tgt, c.map(x)}, lang, {"p", "q"});
                ASSERT_TRUE(r.equivalent) << c.origin;
            }
}
