#pragma once

// Depth-bounded logical equivalence of pointed models by partition
// refinement, with characteristic formulas for every class and synthesis of
// distinguishing formulas. A naive closure-based oracle is provided for
// cross-checking at small depth.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "formula.hpp"
#include "kripke.hpp"
#include "semantics.hpp"

namespace nck {

class ClassCapExceeded : public std::runtime_error {
public:
    ClassCapExceeded(std::size_t depth, std::size_t classes, std::size_t cap)
        : std::runtime_error("class-count cap exceeded at depth " + std::to_string(depth) + ": " +
                             std::to_string(classes) + " classes, cap " + std::to_string(cap)),
          depth_(depth) {}
    [[nodiscard]] std::size_t depth() const { return depth_; }

private:
    std::size_t depth_;
};

inline constexpr std::size_t default_class_cap = 16;

struct TypeAssignment {
    Language language = Language::Dot;
    std::set<std::string> varset;
    /// partitions[d][w] = class of world w at depth d; classes numbered by first occurrence.
    std::vector<std::vector<std::size_t>> partitions;
    /// class_formulas[d][c] holds exactly at the worlds of class c at depth d.
    std::vector<std::vector<Formula>> class_formulas;
    /// True when the last partition is stable under one more refinement step.
    bool fixpoint = false;

    [[nodiscard]] std::size_t depth() const { return partitions.size() - 1; }
    [[nodiscard]] std::size_t classes(std::size_t d) const { return class_formulas.at(d).size(); }
};

namespace detail {

using ClassMask = std::uint32_t;

/// Everything needed to compare worlds one refinement step above depth d.
struct StepView {
    const Model& m;
    Language lang;
    const std::vector<std::size_t>& cls;
    const std::vector<Formula>& forms;

    [[nodiscard]] std::size_t k() const { return forms.size(); }

    [[nodiscard]] ClassMask succ_classes(int rel, std::size_t s) const {
        ClassMask mask = 0;
        const WorldSet& r = m.succ(rel, s);
        for (auto t = r.find_first(); t != WorldSet::npos; t = r.find_next(t)) mask |= ClassMask{1} << cls[t];
        return mask;
    }

    /// Whether the modal test on the union P of classes holds, given successor class sets A and B.
    [[nodiscard]] bool test(ClassMask a, ClassMask b, ClassMask p) const {
        if (lang == Language::Dot) {
            const ClassMask ab = a | b;
            return a == 0 || b == 0 || (ab & ~p) == 0 || (ab & p) == 0;
        }
        return (a & ~p) == 0 || (b & p) == 0;
    }

    [[nodiscard]] Formula union_formula(ClassMask p) const {
        std::optional<Formula> out;
        std::vector<Formula> seen;
        for (std::size_t c = 0; c < k(); ++c) {
            if (!((p >> c) & 1U)) continue;
            bool dup = false;
            for (const auto& s : seen) dup = dup || s == forms[c];
            if (dup) continue;
            seen.push_back(forms[c]);
            out = out ? Formula::disj(*out, forms[c]) : forms[c];
        }
        return out ? *out : Formula::bot();
    }

    [[nodiscard]] Formula wrap(const Formula& body) const {
        return lang == Language::Dot ? Formula::boxdot(body) : Formula::boxplus(body);
    }

    /// Least test true at s1 and false at s2, or its negation when the
    /// polarity is reversed; nullopt when no test at this step separates them.
    [[nodiscard]] std::optional<Formula> separating_test(std::size_t s1, std::size_t s2) const {
        const ClassMask a1 = succ_classes(1, s1), b1 = succ_classes(2, s1);
        const ClassMask a2 = succ_classes(1, s2), b2 = succ_classes(2, s2);
        if (lang == Language::Full) {
            for (int rel : {1, 2}) {
                const ClassMask x = rel == 1 ? a1 : b1;
                const ClassMask y = rel == 1 ? a2 : b2;
                const ClassMask diff = x ^ y;
                if (diff == 0) continue;
                std::size_t c = 0;
                while (!((diff >> c) & 1U)) ++c;
                Formula t = Formula::dia(rel, forms[c]);
                return ((x >> c) & 1U) ? t : Formula::neg(t);
            }
            return std::nullopt;
        }
        const ClassMask limit = ClassMask{1} << k();
        for (ClassMask p = 0; p < limit; ++p) {
            const bool v1 = test(a1, b1, p), v2 = test(a2, b2, p);
            if (v1 == v2) continue;
            Formula t = wrap(union_formula(p));
            return v1 ? t : Formula::neg(t);
        }
        return std::nullopt;
    }

    /// Grouping key for a world: equal keys iff no test at this step separates the worlds.
    [[nodiscard]] std::vector<std::uint64_t> signature(std::size_t s) const {
        const ClassMask a = succ_classes(1, s), b = succ_classes(2, s);
        if (lang == Language::Full) return {a, b};
        const std::size_t bits = std::size_t{1} << k();
        std::vector<std::uint64_t> sig((bits + 63) / 64, 0);
        for (std::size_t p = 0; p < bits; ++p)
            if (test(a, b, static_cast<ClassMask>(p))) sig[p / 64] |= std::uint64_t{1} << (p % 64);
        return sig;
    }
};

inline Formula conj_all(const std::vector<Formula>& parts) {
    if (parts.empty()) return Formula::top();
    Formula out = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) out = Formula::conj(out, parts[i]);
    return out;
}

inline void initial_partition(const Model& m, const std::set<std::string>& varset, TypeAssignment& ta) {
    std::vector<std::size_t> cls(m.size());
    std::vector<std::vector<bool>> keys;
    std::vector<Formula> forms;
    for (std::size_t w = 0; w < m.size(); ++w) {
        std::vector<bool> key;
        for (const auto& v : varset) key.push_back(m.holds(v, w));
        std::size_t c = 0;
        while (c < keys.size() && keys[c] != key) ++c;
        if (c == keys.size()) {
            keys.push_back(key);
            std::vector<Formula> lits;
            std::size_t i = 0;
            for (const auto& v : varset) {
                lits.push_back(key[i++] ? Formula::atom(v) : Formula::neg(Formula::atom(v)));
            }
            forms.push_back(conj_all(lits));
        }
        cls[w] = c;
    }
    ta.partitions.push_back(std::move(cls));
    ta.class_formulas.push_back(std::move(forms));
}

}  // namespace detail

/// Refines the depth-0 valuation partition until it is stable or max_depth is reached.
inline TypeAssignment refine_types(const Model& m, Language language, const std::set<std::string>& varset,
                                   std::optional<std::size_t> max_depth = std::nullopt,
                                   std::size_t cap = default_class_cap) {
    if (language == Language::Prop) throw std::invalid_argument("refine_types needs a modal language");
    if (cap > 24) throw std::invalid_argument("class cap above 24 is not supported");
    TypeAssignment ta;
    ta.language = language;
    ta.varset = varset;
    detail::initial_partition(m, varset, ta);

    for (;;) {
        const std::size_t d = ta.depth();
        const auto& cls = ta.partitions[d];
        const auto& forms = ta.class_formulas[d];
        if (forms.size() > cap) throw ClassCapExceeded(d, forms.size(), cap);
        if (max_depth && d >= *max_depth) break;

        const detail::StepView view{m, language, cls, forms};
        std::map<std::pair<std::size_t, std::vector<std::uint64_t>>, std::size_t> ids;
        std::vector<std::size_t> next(m.size());
        std::vector<std::size_t> rep;  // first world of each new class
        for (std::size_t w = 0; w < m.size(); ++w) {
            auto [it, fresh] = ids.try_emplace({cls[w], view.signature(w)}, rep.size());
            if (fresh) rep.push_back(w);
            next[w] = it->second;
        }
        if (rep.size() == forms.size()) {
            ta.fixpoint = true;
            break;
        }

        std::vector<Formula> next_forms;
        for (std::size_t c = 0; c < rep.size(); ++c) {
            const std::size_t parent = cls[rep[c]];
            std::vector<Formula> parts{forms[parent]};
            for (std::size_t o = 0; o < rep.size(); ++o) {
                if (o == c || cls[rep[o]] != parent) continue;
                auto t = view.separating_test(rep[c], rep[o]);
                if (!t) throw std::logic_error("refinement split without a separating test");
                bool dup = false;
                for (const auto& p : parts) dup = dup || p == *t;
                if (!dup) parts.push_back(*t);
            }
            next_forms.push_back(detail::conj_all(parts));
        }
        ta.partitions.push_back(std::move(next));
        ta.class_formulas.push_back(std::move(next_forms));
    }
    return ta;
}

struct EquivalenceResult {
    bool equivalent = false;
    std::optional<std::size_t> separation_depth;
    /// Refinement steps taken until the fixpoint (or until separation was final).
    std::size_t steps = 0;
};

namespace detail {

struct UnionView {
    Model u;
    std::size_t a = 0;
    std::size_t b = 0;
};

inline UnionView union_of(const PointedModel& a, const PointedModel& b) {
    if (a.point >= a.model.size() || b.point >= b.model.size()) throw ModelError("point outside model");
    return {disjoint_union(a.model, b.model), a.point, a.model.size() + b.point};
}

}  // namespace detail

inline EquivalenceResult equivalent(const PointedModel& a, const PointedModel& b, Language language,
                                    const std::set<std::string>& varset, std::size_t cap = default_class_cap) {
    const auto uv = detail::union_of(a, b);
    const TypeAssignment ta = refine_types(uv.u, language, varset, std::nullopt, cap);
    EquivalenceResult r;
    r.steps = ta.depth();
    for (std::size_t d = 0; d < ta.partitions.size(); ++d) {
        if (ta.partitions[d][uv.a] != ta.partitions[d][uv.b]) {
            r.separation_depth = d;
            return r;
        }
    }
    r.equivalent = true;
    return r;
}

/// A formula of `language` of modal depth equal to the separation depth,
/// true at `a` and false at `b`; nullopt if the points are equivalent.
/// Every returned formula has been model-checked at both points.
inline std::optional<Formula> distinguishing_formula(const PointedModel& a, const PointedModel& b,
                                                     Language language, const std::set<std::string>& varset,
                                                     std::size_t cap = default_class_cap) {
    const auto uv = detail::union_of(a, b);
    const TypeAssignment ta = refine_types(uv.u, language, varset, std::nullopt, cap);
    std::optional<std::size_t> sep;
    for (std::size_t d = 0; d < ta.partitions.size() && !sep; ++d)
        if (ta.partitions[d][uv.a] != ta.partitions[d][uv.b]) sep = d;
    if (!sep) return std::nullopt;

    std::optional<Formula> out;
    if (*sep == 0) {
        for (const auto& v : varset) {
            if (uv.u.holds(v, uv.a) == uv.u.holds(v, uv.b)) continue;
            out = uv.u.holds(v, uv.a) ? Formula::atom(v) : Formula::neg(Formula::atom(v));
            break;
        }
    } else {
        const detail::StepView view{uv.u, language, ta.partitions[*sep - 1], ta.class_formulas[*sep - 1]};
        out = view.separating_test(uv.a, uv.b);
    }
    if (!out) throw std::logic_error("separated points without a separating formula");
    const WorldSet ts = truth_set(uv.u, *out);
    if (!ts[uv.a] || ts[uv.b])
        throw std::logic_error("synthesized formula does not distinguish the points: " + print(*out));
    if (static_cast<std::size_t>(modal_depth(*out)) != *sep)
        throw std::logic_error("synthesized formula has the wrong modal depth: " + print(*out));
    return out;
}

// ---------------------------------------------------------------------------
// Independent oracle

namespace detail {

/// Closes a family of world sets under complement, intersection and union.
inline std::set<WorldSet> boolean_closure(std::set<WorldSet> sets, std::size_t n) {
    sets.insert(WorldSet(n));
    sets.insert(~WorldSet(n));
    for (bool grew = true; grew;) {
        grew = false;
        const std::vector<WorldSet> cur(sets.begin(), sets.end());
        for (const auto& x : cur) {
            grew |= sets.insert(~x).second;
            for (const auto& y : cur) {
                grew |= sets.insert(x & y).second;
                grew |= sets.insert(x | y).second;
            }
        }
    }
    return sets;
}

inline std::vector<Formula> operators_for(Language lang, const Formula& x) {
    switch (lang) {
        case Language::Dot: return {Formula::boxdot(x)};
        case Language::Plus: return {Formula::boxplus(x)};
        case Language::Full:
            return {Formula::boxdot(x), Formula::boxplus(x), Formula::box(1, x),  Formula::box(2, x),
                    Formula::dia(1, x), Formula::dia(2, x),  Formula::delta(1, x), Formula::delta(2, x)};
        default: return {};
    }
}

}  // namespace detail

inline constexpr std::size_t oracle_max_depth = 2;
inline constexpr std::size_t oracle_max_vars = 2;
inline constexpr std::size_t oracle_max_worlds = 12;

/// Enumerates the truth sets of every formula of `language` over `varset`
/// up to `depth` (modulo logical equivalence on the union model, which is
/// the normal form used) and compares the two points on each of them.
inline bool brute_force_equivalent(const PointedModel& a, const PointedModel& b, Language language,
                                   const std::set<std::string>& varset, std::size_t depth) {
    if (depth > oracle_max_depth || varset.size() > oracle_max_vars)
        throw std::length_error("brute-force oracle budget exceeded (depth <= 2, at most 2 variables)");
    auto uv = detail::union_of(a, b);
    const std::size_t n = uv.u.size();
    if (n > oracle_max_worlds) throw std::length_error("brute-force oracle budget exceeded (at most 12 worlds)");

    std::set<WorldSet> atoms;
    for (const auto& v : varset) atoms.insert(uv.u.valuation(v));
    std::set<WorldSet> level = detail::boolean_closure(atoms, n);

    const std::string fresh = "oracle_x";
    const Formula x = Formula::atom(fresh);
    for (std::size_t d = 1; d <= depth; ++d) {
        std::set<WorldSet> gens = atoms;
        for (const auto& s : level) {
            uv.u.set_valuation(fresh, s);
            for (const auto& f : detail::operators_for(language, x)) gens.insert(truth_set(uv.u, f));
        }
        level = detail::boolean_closure(gens, n);
    }
    for (const auto& s : level)
        if (s[uv.a] != s[uv.b]) return false;
    return true;
}

}  // namespace nck
