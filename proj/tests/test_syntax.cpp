#include <gtest/gtest.h>

#include "nck/nck.hpp"
#include "support/gen.hpp"
#include "support/oracle.hpp"

using namespace nck;

namespace {

Formula p() { return Formula::atom("p"); }
Formula q() { return Formula::atom("q"); }
Formula r() { return Formula::atom("r"); }

}  // namespace

TEST(Parse, GrammarShapes) {
    EXPECT_EQ(parse("[.](p -> q)"), Formula::boxdot(Formula::imp(p(), q())));
    EXPECT_EQ(parse("[+]p & [+]~p"), Formula::conj(Formula::boxplus(p()), Formula::boxplus(Formula::neg(p()))));
    EXPECT_EQ(parse("p -> q -> r"), Formula::imp(p(), Formula::imp(q(), r())));
}

TEST(Parse, Precedence) {
    EXPECT_EQ(parse("~p & q | r"), Formula::disj(Formula::conj(Formula::neg(p()), q()), r()));
    EXPECT_EQ(parse("p | q -> r <-> p"), Formula::iff(Formula::imp(Formula::disj(p(), q()), r()), p()));
    EXPECT_EQ(parse("p <-> q <-> r"), Formula::iff(Formula::iff(p(), q()), r()));
    EXPECT_EQ(parse("p & q & r"), Formula::conj(Formula::conj(p(), q()), r()));
    EXPECT_EQ(parse("[.]p & q"), Formula::conj(Formula::boxdot(p()), q()));
    EXPECT_EQ(parse("~[+]p"), Formula::neg(Formula::boxplus(p())));
}

TEST(Parse, ExtendedOperators) {
    EXPECT_EQ(parse("[1]p"), Formula::box(1, p()));
    EXPECT_EQ(parse("[2]p"), Formula::box(2, p()));
    EXPECT_EQ(parse("<1>p"), Formula::dia(1, p()));
    EXPECT_EQ(parse("<2>p"), Formula::dia(2, p()));
    EXPECT_EQ(parse("D1 p"), Formula::delta(1, p()));
    EXPECT_EQ(parse("D2~p"), Formula::delta(2, Formula::neg(p())));
    EXPECT_EQ(parse("true"), Formula::top());
    EXPECT_EQ(parse("false"), Formula::bot());
}

TEST(Parse, WhitespaceAndComments) {
    EXPECT_EQ(parse("  [.] ( p\n ->\tq ) # trailing"), parse("[.](p->q)"));
    EXPECT_EQ(parse("p_1 & aB9"), Formula::conj(Formula::atom("p_1"), Formula::atom("aB9")));
}

TEST(Parse, ErrorsCarryPosition) {
    try {
        parse("[.](p");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1);
        EXPECT_EQ(e.column(), 6);
        EXPECT_FALSE(e.expected().empty());
        EXPECT_NE(std::find(e.expected().begin(), e.expected().end(), "')'"), e.expected().end());
    }
    try {
        parse("p &\n  & q");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_EQ(e.column(), 3);
    }
    EXPECT_THROW(parse(""), ParseError);
    EXPECT_THROW(parse("p q"), ParseError);
    EXPECT_THROW(parse("P"), ParseError);
    EXPECT_THROW(parse("[3]p"), ParseError);
    EXPECT_THROW(parse("p $ q"), ParseError);
}

TEST(Parse, PatternModeAcceptsMetavariables) {
    const Formula f = parse_pattern("[.]A <-> [.]~A");
    EXPECT_EQ(metavars(f), (std::set<std::string>{"A"}));
    EXPECT_THROW(parse("[.]A"), ParseError);
}

TEST(Print, Canonical) {
    EXPECT_EQ(print(Formula::boxdot(p())), "[.]p");
    EXPECT_EQ(print(Formula::iff(Formula::boxdot(p()), Formula::boxdot(Formula::neg(p())))), "[.]p <-> [.]~p");
    EXPECT_EQ(print(Formula::neg(Formula::boxplus(p()))), "~[+]p");
    EXPECT_EQ(print(parse("(p -> q) -> r")), "(p -> q) -> r");
    EXPECT_EQ(print(parse("p -> (q -> r)")), "p -> q -> r");
    EXPECT_EQ(print(parse("p & (q & r)")), "p & (q & r)");
    EXPECT_EQ(print(parse("D1 p & <2>~q")), "D1 p & <2>~q");
}

TEST(Print, RoundTripRandom) {
    gen::Rng rng(20240601);
    const std::vector<std::string> vars{"p", "q", "r_1"};
    for (int k = 0; k < 2000; ++k) {
        const Formula f = gen::formula(rng, Language::Full, vars, 3, 10);
        const std::string text = print(f);
        ASSERT_EQ(parse(text), f) << text;
        ASSERT_EQ(print(parse(text)), text);
    }
}

TEST(Language, Classification) {
    EXPECT_EQ(language_of(parse("[.]p")), Language::Dot);
    EXPECT_EQ(language_of(parse("p & ~q")), Language::Prop);
    EXPECT_EQ(language_of(parse("[+]([.]p)")), Language::Full);
    EXPECT_EQ(language_of(parse("[+]p -> q")), Language::Plus);
    EXPECT_EQ(language_of(parse("[1]p")), Language::Full);
    EXPECT_EQ(language_of(parse("D2 p")), Language::Full);
    EXPECT_TRUE(fits(parse("p"), Language::Dot));
    EXPECT_TRUE(fits(parse("[.]p"), Language::Full));
    EXPECT_FALSE(fits(parse("[+]p"), Language::Dot));
    EXPECT_EQ(std::string(to_string(Language::Plus)), "Lplus");
}

TEST(Language, VarsAndDepth) {
    EXPECT_EQ(vars(parse("[.](p | q)")), (std::set<std::string>{"p", "q"}));
    EXPECT_EQ(modal_depth(parse("[.](p | q)")), 1);
    EXPECT_EQ(vars(parse("p")), (std::set<std::string>{"p"}));
    EXPECT_EQ(modal_depth(parse("p")), 0);
    EXPECT_EQ(modal_depth(parse("[+][.]p")), 2);
    EXPECT_EQ(modal_depth(parse("[.]p & <1>[2]D1 q")), 3);
    EXPECT_TRUE(vars(parse("true -> false")).empty());
}

TEST(Translate, Examples) {
    EXPECT_EQ(print(translate_dot_to_plus(parse("[.]p"))), "[+]p & [+]~p");
    EXPECT_EQ(print(translate_dot_to_plus(parse("q"))), "q");
    EXPECT_EQ(print(translate_dot_to_plus(parse("[.][.]p"))), "[+]([+]p & [+]~p) & [+]~([+]p & [+]~p)");
    EXPECT_THROW(translate_dot_to_plus(parse("[+]p")), std::invalid_argument);
    EXPECT_THROW(translate_dot_to_plus(parse("[1]p")), std::invalid_argument);
}

TEST(Translate, OutputIsPlusAndEquivalent) {
    gen::Rng rng(7);
    const std::vector<std::string> vars{"p", "q"};
    for (int k = 0; k < 300; ++k) {
        const Formula f = gen::formula(rng, Language::Dot, vars, 3);
        const Formula t = translate_dot_to_plus(f);
        const Language l = language_of(t);
        ASSERT_TRUE(l == Language::Plus || l == Language::Prop) << print(t);
        const Model m = gen::model(rng, 1 + gen::pick(rng, 4), vars);
        for (std::size_t s = 0; s < m.size(); ++s) ASSERT_EQ(satisfies(m, s, f), satisfies(m, s, t)) << print(f);
    }
}
