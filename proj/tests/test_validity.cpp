#include <cstdlib>

#include <gtest/gtest.h>

#include "nck/nck.hpp"
#include "support/gen.hpp"
#include "support/oracle.hpp"

using namespace nck;

namespace {

SearchBudget budget(unsigned worlds, unsigned vars = 3) {
    SearchBudget b;
    b.max_worlds = worlds;
    b.max_vars = vars;
    return b;
}

/// Reference search: enumerate filtered frames, then valuations, then worlds.
std::optional<Model> naive_search(const Formula& phi, PropertyTag tag, unsigned max_worlds) {
    const auto vs = vars(phi);
    const std::vector<std::string> vl(vs.begin(), vs.end());
    for (unsigned n = 1; n <= max_worlds; ++n)
        for (const auto& f : enumerate_frames(n, PropertyTag::all)) {
            if (!oracle::property(f, tag)) continue;
            for (std::uint64_t v = 0; v < (std::uint64_t{1} << (vl.size() * n)); ++v) {
                Model m(to_frame(f));
                for (std::size_t k = 0; k < vl.size(); ++k) {
                    m.declare(vl[k]);
                    for (std::size_t x = 0; x < n; ++x)
                        if ((v >> (k * n + x)) & 1U) m.set_true(vl[k], x);
                }
                for (std::size_t w = 0; w < n; ++w)
                    if (!oracle::sat(m, w, phi)) {
                        m.point = w;
                        return m;
                    }
            }
        }
    return std::nullopt;
}

}  // namespace

TEST(FrameValidity, ReflexivePoint) {
    const Model g = parse_model(fixtures::point_frame);
    EXPECT_TRUE(valid_on_frame(g, parse("[.]p")).valid);
    EXPECT_TRUE(valid_on_frame(g, parse("[.]true")).valid);
    EXPECT_FALSE(valid_on_frame(g, parse("p")).valid);
}

TEST(FrameValidity, ChainVacuity) {
    const Model f = parse_model(fixtures::chain_frame);
    EXPECT_TRUE(valid_on_frame(f, parse("[.]p")).valid);
    EXPECT_TRUE(valid_on_frame(f, parse("[.]true")).valid);
}

TEST(FrameValidity, LeastCountervaluation) {
    const Model f = parse_model("worlds: a b\nR1: a->a a->b\nR2: a->a\n");
    const auto r = valid_on_frame(f, parse("[.]p"));
    ASSERT_FALSE(r.valid);
    ASSERT_TRUE(r.counter);
    // Valuation 1 (p at a only) is the first to break [.]p at a.
    EXPECT_EQ(r.counter->valuation("p").count(), 1u);
    EXPECT_TRUE(r.counter->holds("p", 0));
    EXPECT_EQ(r.counter->point, std::optional<std::size_t>(0));
    EXPECT_EQ(r.counter->names(), f.names());
}

TEST(FrameValidity, AgreesWithOracleOnRandomFrames) {
    gen::Rng rng(51);
    for (int k = 0; k < 200; ++k) {
        const Model f = gen::model(rng, 1 + gen::pick(rng, 4), {});
        const Formula phi = gen::formula(rng, Language::Full, {"p", "q"}, 2);
        const auto vs = vars(phi);
        const std::vector<std::string> vl(vs.begin(), vs.end());
        bool valid = true;
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << (vl.size() * f.size())) && valid; ++v) {
            Model m = f;
            for (std::size_t i = 0; i < vl.size(); ++i)
                for (std::size_t x = 0; x < f.size(); ++x)
                    if ((v >> (i * f.size() + x)) & 1U) m.set_true(vl[i], x);
            for (std::size_t w = 0; w < f.size(); ++w) valid = valid && oracle::sat(m, w, phi);
        }
        ASSERT_EQ(valid_on_frame(f, phi).valid, valid) << print(phi);
    }
}

TEST(Search, KuhnInstance) {
    const auto r = countermodel_search(parse("[+]p -> [+](p | q) | [+](~p | q)"), PropertyTag::all);
    ASSERT_EQ(r.outcome, SearchOutcome::Refuted);
    EXPECT_LE(r.countermodel->size(), 3u);
    EXPECT_FALSE(satisfies(*r.countermodel, *r.countermodel->point, parse("[+]p -> [+](p | q) | [+](~p | q)")));
}

TEST(Search, WDot4OverTransitive) {
    const Formula f = parse("[.]p -> [.][.]p");
    const auto r = countermodel_search(f, PropertyTag::transitive, budget(4));
    ASSERT_EQ(r.outcome, SearchOutcome::Refuted);
    EXPECT_LE(r.countermodel->size(), 4u);
    EXPECT_TRUE(check_property(*r.countermodel, PropertyTag::transitive).holds);
    EXPECT_FALSE(satisfies(*r.countermodel, *r.countermodel->point, f));
}

TEST(Search, WDot5OverEuclidean) {
    const Formula f = parse("~[.]p -> [.]~[.]p");
    const auto r = countermodel_search(f, PropertyTag::euclidean, budget(2));
    ASSERT_EQ(r.outcome, SearchOutcome::Refuted);
    EXPECT_LE(r.countermodel->size(), 2u);
    EXPECT_TRUE(check_property(*r.countermodel, PropertyTag::euclidean).holds);
    EXPECT_FALSE(satisfies(*r.countermodel, *r.countermodel->point, f));
}

TEST(Search, ReferenceCountermodelsVerify) {
    const auto four = fixtures::pointed(fixtures::wdot4_cex);
    EXPECT_FALSE(satisfies(four.model, four.point, parse("[.]p -> [.][.]p")));
    EXPECT_TRUE(check_property(four.model, PropertyTag::transitive).holds);
    const auto five = fixtures::pointed(fixtures::wdot5_cex);
    EXPECT_FALSE(satisfies(five.model, five.point, parse("~[.]p -> [.]~[.]p")));
    EXPECT_TRUE(check_property(five.model, PropertyTag::euclidean).holds);
}

TEST(Search, ValidWithinBudgetIsExhaustive) {
    const auto r = countermodel_search(parse("[.]true"), PropertyTag::all, budget(3));
    EXPECT_EQ(r.outcome, SearchOutcome::ValidWithinBudget);
    EXPECT_EQ(r.worlds_exhausted, 3u);
    EXPECT_EQ(r.frames_examined, 4u + 256u + 262144u);
    EXPECT_STREQ(to_string(r.outcome), "valid within budget");
}

TEST(Search, InconclusiveOnBudget) {
    SearchBudget b = budget(3);
    b.frame_cap = 10;
    const auto capped = countermodel_search(parse("[.]p | ~[.]p"), PropertyTag::all, b);
    EXPECT_EQ(capped.outcome, SearchOutcome::Inconclusive);
    EXPECT_FALSE(capped.note.empty());
    const auto vars_over = countermodel_search(parse("p | q | r"), PropertyTag::all, budget(2, 2));
    EXPECT_EQ(vars_over.outcome, SearchOutcome::Inconclusive);
    const auto worlds_over = countermodel_search(parse("p | ~p"), PropertyTag::all, budget(6));
    EXPECT_EQ(worlds_over.outcome, SearchOutcome::Inconclusive);
}

TEST(Search, FirstCountermodelMatchesNaiveOrder) {
    gen::Rng rng(52);
    const PropertyTag tags[] = {PropertyTag::all, PropertyTag::serial, PropertyTag::transitive, PropertyTag::qe};
    for (int k = 0; k < 60; ++k) {
        const Formula phi = gen::formula(rng, Language::Full, {"p", "q"}, 2);
        const PropertyTag tag = tags[k % 4];
        const auto r = countermodel_search(phi, tag, budget(2));
        const auto naive = naive_search(phi, tag, 2);
        ASSERT_EQ(r.outcome == SearchOutcome::Refuted, naive.has_value()) << print(phi);
        if (naive) {
            ASSERT_TRUE(r.countermodel->same_frame(*naive)) << print(phi);
            ASSERT_EQ(r.countermodel->point, naive->point);
            for (const auto& v : vars(phi)) ASSERT_EQ(r.countermodel->valuation(v), naive->valuation(v));
        }
    }
}

TEST(Search, PtCountermodelsAreQtCountermodels) {
    gen::Rng rng(53);
    int refuted = 0;
    for (int k = 0; k < 40; ++k) {
        const Formula phi = gen::formula(rng, Language::Dot, {"p"}, 2);
        const auto pt = countermodel_search(phi, PropertyTag::pt, budget(3));
        if (pt.outcome != SearchOutcome::Refuted) continue;
        ++refuted;
        EXPECT_TRUE(check_property(*pt.countermodel, PropertyTag::qt).holds);
        EXPECT_EQ(countermodel_search(phi, PropertyTag::qt, budget(3)).outcome, SearchOutcome::Refuted);
    }
    EXPECT_GT(refuted, 5);
}

TEST(Soundness, AxiomsOverTheirClasses) {
    const std::pair<const char*, PropertyTag> cases[] = {
        {"CONplus", PropertyTag::all},      {"DISplus", PropertyTag::all},       {"AxTop", PropertyTag::all},
        {"EQUdot", PropertyTag::all},       {"CONdot", PropertyTag::all},        {"DISdot", PropertyTag::all},
        {"Tdot", PropertyTag::reflexive},   {"Tdot", PropertyTag::reflexive_any}, {"Bdot", PropertyTag::symmetric},
        {"A4dot", PropertyTag::qt},         {"A4dot", PropertyTag::pt},          {"A5dot", PropertyTag::qe},
        {"A5dot", PropertyTag::pe},
    };
    for (const auto& [name, tag] : cases) {
        const auto r = countermodel_search(distinct_atom_instance(axiom_schema(name)), tag, budget(3));
        EXPECT_EQ(r.outcome, SearchOutcome::ValidWithinBudget) << name << " over " << to_string(tag);
        EXPECT_EQ(r.worlds_exhausted, 3u);
    }
}

TEST(Soundness, ExtensionAxiomsFailOutsideTheirClasses) {
    for (const auto& [name, tag] : std::vector<std::pair<const char*, PropertyTag>>{
             {"Tdot", PropertyTag::all}, {"Bdot", PropertyTag::all}, {"A4dot", PropertyTag::all},
             {"A5dot", PropertyTag::all}}) {
        EXPECT_EQ(countermodel_search(distinct_atom_instance(axiom_schema(name)), tag, budget(3)).outcome,
                  SearchOutcome::Refuted)
            << name;
    }
}

TEST(Consequence, Examples) {
    const auto k = consequence_check({parse("[.]p"), parse("[.](p -> q)")}, parse("[.]q"), PropertyTag::reflexive,
                                     budget(3));
    ASSERT_EQ(k.outcome, SearchOutcome::Refuted);
    const std::size_t at = *k.countermodel->point;
    EXPECT_TRUE(satisfies(*k.countermodel, at, parse("[.]p & [.](p -> q)")));
    EXPECT_FALSE(satisfies(*k.countermodel, at, parse("[.]q")));
    EXPECT_TRUE(check_property(*k.countermodel, PropertyTag::reflexive).holds);
    EXPECT_EQ(consequence_check({parse("p"), parse("[.]p"), parse("[.](p -> q)")}, parse("[.]q"),
                                PropertyTag::reflexive, budget(3))
                  .outcome,
              SearchOutcome::ValidWithinBudget);
    EXPECT_EQ(consequence_check({parse("p")}, parse("p"), PropertyTag::all).outcome, SearchOutcome::ValidWithinBudget);
    const auto r = consequence_check({}, parse("[+]p <-> [+]~p"), PropertyTag::all);
    ASSERT_EQ(r.outcome, SearchOutcome::Refuted);
    EXPECT_FALSE(satisfies(*r.countermodel, *r.countermodel->point, parse("[+]p <-> [+]~p")));
}

TEST(Budget, ParseAndEnvironment) {
    const SearchBudget b = parse_budget("max_worlds=4, max_vars=3,frame_cap=99");
    EXPECT_EQ(b.max_worlds, 4u);
    EXPECT_EQ(b.max_vars, 3u);
    EXPECT_EQ(b.frame_cap, 99u);
    EXPECT_THROW(parse_budget("max_worlds"), std::invalid_argument);
    EXPECT_THROW(parse_budget("max_worlds=x"), std::invalid_argument);
    EXPECT_THROW(parse_budget("depth=2"), std::invalid_argument);
    EXPECT_THROW(parse_budget("max_vars=0"), std::invalid_argument);
    ::setenv("CK_BUDGET", "max_worlds=2", 1);
    EXPECT_EQ(budget_from_env().max_worlds, 2u);
    ::unsetenv("CK_BUDGET");
    EXPECT_EQ(budget_from_env().max_worlds, 3u);
}
