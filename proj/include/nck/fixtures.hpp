#pragma once

// Built-in reference models and the replay logic behind `repro`.
// Each fixture checks its expected outcome and renders a one-line report.

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "equivalence.hpp"
#include "formula.hpp"
#include "kripke.hpp"
#include "morphisms.hpp"
#include "semantics.hpp"
#include "transforms.hpp"
#include "validity.hpp"

namespace nck::fixtures {

// Pairs of pointed models told apart by [+] but not by [.].

inline constexpr const char* loops_left = R"(worlds: s t u
R1: s->t t->t u->u
R2: s->u t->t u->u
v: p = s t
point: s
)";
inline constexpr const char* loops_right = R"(worlds: s' t' u'
R1: s'->t' t'->t' u'->u'
R2: s'->u' t'->t' u'->u'
v: p = s' u'
point: s'
)";

inline constexpr const char* symmetric_left = R"(worlds: s t u
R1: s->t t->s
R2: s->u u->s
v: p = s t
point: s
)";
inline constexpr const char* symmetric_right = R"(worlds: s' t' u'
R1: s'->t' t'->s'
R2: s'->u' u'->s'
v: p = s' u'
point: s'
)";

inline constexpr const char* reflexive_left = R"(worlds: s t u
R1: s->s s->t t->t u->u
R2: s->s s->u t->t u->u
v: p = s t
point: s
)";
inline constexpr const char* reflexive_right = R"(worlds: s' t' u'
R1: s'->s' s'->t' t'->t' u'->u'
R2: s'->s' s'->u' t'->t' u'->u'
v: p = s' u'
point: s'
)";

/// [+]p holds at s while [+]~p fails.
inline constexpr const char* asymmetry = R"(worlds: s t u
R1: s->t
R2: s->u
v: p = t
point: s
)";

/// Refutes [+]p -> [+](p | q) | [+](~p | q) at s.
inline constexpr const char* kuhn = R"(worlds: s t u
R1: s->s s->u
R2: s->t
v: p = u
v: q = t
point: s
)";

/// Three-world chain under both relations, and a single reflexive world.
inline constexpr const char* chain_frame = R"(worlds: s t u
R1: s->t t->u
R2: s->t t->u
)";
inline constexpr const char* point_frame = R"(worlds: s'
R1: s'->s'
R2: s'->s'
)";
inline constexpr const char* chain_to_point_map = "s => s'\nt => s'\nu => s'\n";

/// Input and expected output of the serialization construction.
inline constexpr const char* serialize_input = R"(worlds: s t u v w
R1: s->t s->u v->w
R2: s->t s->v u->v
)";
inline constexpr const char* serialize_expected = R"(worlds: s t u@v@2 v@w@1 w
R1: s->t s->u@v@2 t->t u@v@2->v@w@1 v@w@1->w w->w
R2: s->t s->v@w@1 t->t u@v@2->v@w@1 v@w@1->w w->w
)";

/// Reflexive closure flips [.]p at w.
inline constexpr const char* closure_cex = R"(worlds: w v
R1: w->v
R2:
v: p = w
point: w
)";

/// Transitive model refuting [.]p -> [.][.]p at s.
inline constexpr const char* wdot4_cex = R"(worlds: s t u w
R1: s->u u->u
R2: s->t u->w
v: p = s t u
point: s
)";

/// Euclidean model refuting ~[.]p -> [.]~[.]p at s.
inline constexpr const char* wdot5_cex = R"(worlds: s t
R1: s->s
R2: s->t t->t
v: p = s
point: s
)";

struct Outcome {
    bool pass = false;
    std::string report;
};

struct Fixture {
    std::string name;
    std::string summary;
    std::function<Outcome()> run;
};

/// Named model files shipped under fixtures/ (file stem -> text).
inline std::vector<std::pair<std::string, std::string>> model_files() {
    return {
        {"loops-left", loops_left},           {"loops-right", loops_right},
        {"symmetric-left", symmetric_left},   {"symmetric-right", symmetric_right},
        {"reflexive-left", reflexive_left},   {"reflexive-right", reflexive_right},
        {"asymmetry", asymmetry},             {"kuhn", kuhn},
        {"chain", chain_frame},               {"point", point_frame},
        {"serialize-input", serialize_input}, {"serialize-expected", serialize_expected},
        {"closure-cex", closure_cex},         {"wdot4-cex", wdot4_cex},
        {"wdot5-cex", wdot5_cex},
    };
}

inline PointedModel pointed(const char* text) {
    Model m = parse_model(text);
    const std::size_t p = m.point.value_or(0);
    return {std::move(m), p};
}

namespace detail {

inline std::string mark(bool v) { return v ? "⊨" : "⊭"; }

/// [+] separates at depth 1 with a verified formula, [.] never separates,
/// and the bounded oracle agrees on both at depths 0..2.
inline Outcome expressivity_pair(const char* left, const char* right) {
    const PointedModel a = pointed(left), b = pointed(right);
    const std::set<std::string> vs{"p"};
    const auto plus = equivalent(a, b, Language::Plus, vs);
    const auto dot = equivalent(a, b, Language::Dot, vs);
    const auto f = distinguishing_formula(a, b, Language::Plus, vs);
    bool oracle_ok = true;
    for (std::size_t d = 0; d <= 2; ++d) {
        const bool plus_eq_d = !plus.separation_depth || *plus.separation_depth > d;
        oracle_ok = oracle_ok && brute_force_equivalent(a, b, Language::Plus, vs, d) == plus_eq_d;
        oracle_ok = oracle_ok && brute_force_equivalent(a, b, Language::Dot, vs, d);
    }
    Outcome o;
    o.pass = !plus.equivalent && plus.separation_depth == 1 && f && dot.equivalent && dot.steps <= 6 && oracle_ok;
    std::ostringstream os;
    if (!plus.equivalent && f)
        os << "L(⊞) distinguishes at depth " << *plus.separation_depth << " via " << print(*f);
    else
        os << "L(⊞) does not distinguish";
    os << "; " << (dot.equivalent ? "L(⊡)-equivalent at fixpoint" : "L(⊡) distinguishes");
    if (!oracle_ok) os << " (bounded oracle disagrees)";
    o.report = os.str();
    return o;
}

inline Outcome asymmetry_fixture() {
    const Model m = parse_model(asymmetry);
    const bool a = satisfies(m, "s", parse("[+]p"));
    const bool b = satisfies(m, "s", parse("[+]~p"));
    return {a && !b, "s " + mark(a) + " [+]p and s " + mark(b) + " [+]~p"};
}

inline Outcome kuhn_fixture() {
    const Model m = parse_model(kuhn);
    const bool a = satisfies(m, "s", parse("[+]p"));
    const bool b = satisfies(m, "s", parse("[+](p | q)"));
    const bool c = satisfies(m, "s", parse("[+](~p | q)"));
    const auto search = countermodel_search(parse("[+]p -> [+](p | q) | [+](~p | q)"), PropertyTag::all);
    const bool found = search.outcome == SearchOutcome::Refuted && search.countermodel->size() <= 3;
    std::ostringstream os;
    os << "s " << mark(a) << " [+]p, s " << mark(b) << " [+](p | q), s " << mark(c) << " [+](~p | q); ";
    if (found)
        os << "search refutes the instance on " << search.countermodel->size() << " worlds";
    else
        os << "search found no countermodel";
    return {a && !b && !c && found, os.str()};
}

inline Outcome undefinability_fixture() {
    const Model f = parse_model(chain_frame), g = parse_model(point_frame);
    const WorldMap map = parse_map(chain_to_point_map, f, g);
    const MorphismReport r = check_frame_morphism(f, g, map);
    const PropertyTag basic[] = {PropertyTag::serial, PropertyTag::reflexive, PropertyTag::transitive,
                                 PropertyTag::symmetric, PropertyTag::euclidean};
    bool target_all = true, source_none = true;
    for (auto t : basic) {
        target_all = target_all && check_property(g, t).holds;
        source_none = source_none && !check_property(f, t).holds;
    }
    std::ostringstream os;
    os << "constant map " << (r.ok() ? "is" : "is not") << " a surjective frame ⊡-morphism; target has "
       << (target_all ? "all" : "not all") << " five basic properties, source has "
       << (source_none ? "none" : "some");
    return {r.ok() && target_all && source_none, os.str()};
}

inline Outcome serialize_fixture() {
    const Model in = parse_model(serialize_input);
    const TransformResult r = serialize(in);
    const Model expected = parse_model(serialize_expected);
    const bool same = r.output.same_frame(expected);
    const bool serial = check_property(r.output, PropertyTag::serial).holds;
    std::ostringstream os;
    os << "output " << (same ? "matches" : "differs from") << " the reference figure edge-for-edge; g "
       << (r.report.ok() ? "is" : "is not") << " a surjective ⊡-morphism; output " << (serial ? "is" : "is not")
       << " serial";
    return {same && r.report.ok() && serial, os.str()};
}

inline Outcome closure_fixture() {
    const Model m = parse_model(closure_cex);
    const Formula f = parse("[.]p");
    const bool before = satisfies(m, "w", f);
    const bool after = satisfies(reflexive_closure(m).output, "w", f);
    return {before && !after, "w " + mark(before) + " [.]p before reflexive closure, w " + mark(after) + " [.]p after"};
}

inline Outcome invalidity_fixture(const char* text, const char* formula, PropertyTag tag, std::size_t max_worlds) {
    const PointedModel pm = pointed(text);
    const Formula f = parse(formula);
    const bool in_class = check_property(pm.model, tag).holds;
    const bool refuted = !satisfies(pm.model, pm.point, f);
    SearchBudget budget;
    budget.max_worlds = static_cast<unsigned>(max_worlds);
    const auto search = countermodel_search(f, tag, budget);
    const bool found = search.outcome == SearchOutcome::Refuted;
    std::ostringstream os;
    os << formula << " fails at " << pm.model.name(pm.point) << " on a " << (in_class ? "" : "non-") << to_string(tag)
       << " model; search " << (found ? "finds a countermodel on " + std::to_string(search.countermodel->size()) +
                                            " worlds"
                                      : std::string("finds none"));
    return {in_class && refuted && found, os.str()};
}

}  // namespace detail

inline const std::vector<Fixture>& all() {
    static const std::vector<Fixture> list{
        {"prop3.2", "looped pair: [+] separates, [.] does not",
         [] { return detail::expressivity_pair(loops_left, loops_right); }},
        {"prop3.3", "symmetric pair: [+] separates, [.] does not",
         [] { return detail::expressivity_pair(symmetric_left, symmetric_right); }},
        {"prop3.4", "reflexive pair: [+] separates, [.] does not",
         [] { return detail::expressivity_pair(reflexive_left, reflexive_right); }},
        {"sec2-asym", "[+]p true and [+]~p false at one world", detail::asymmetry_fixture},
        {"kuhn", "Kuhn-style [+] axiom refuted", detail::kuhn_fixture},
        {"prop5.3", "frame properties not preserved by surjective ⊡-morphisms", detail::undefinability_fixture},
        {"serialize-example", "serialization of the reference five-world model", detail::serialize_fixture},
        {"refl-closure-cex", "reflexive closure changes the truth of [.]p", detail::closure_fixture},
        {"wdot4-cex", "[.]p -> [.][.]p refuted on a transitive model",
         [] { return detail::invalidity_fixture(wdot4_cex, "[.]p -> [.][.]p", PropertyTag::transitive, 4); }},
        {"wdot5-cex", "~[.]p -> [.]~[.]p refuted on a Euclidean model",
         [] { return detail::invalidity_fixture(wdot5_cex, "~[.]p -> [.]~[.]p", PropertyTag::euclidean, 2); }},
    };
    return list;
}

inline const Fixture* find(const std::string& name) {
    for (const auto& f : all())
        if (f.name == name) return &f;
    return nullptr;
}

}  // namespace nck::fixtures
