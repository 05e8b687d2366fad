#pragma once

// Model checking for the full language. Truth sets are computed bottom-up,
// one pass per distinct subformula node.

#include <stdexcept>
#include <string>
#include <unordered_map>

#include "formula.hpp"
#include "kripke.hpp"

namespace nck {

namespace detail {

/// True iff every world in `succ` lies in `set` (vacuous when succ is empty).
inline bool all_in(const WorldSet& succ, const WorldSet& set) { return succ.is_subset_of(set); }

/// True iff no world in `succ` lies in `set`.
inline bool none_in(const WorldSet& succ, const WorldSet& set) { return !succ.intersects(set); }

class Evaluator {
public:
    explicit Evaluator(const Model& m) : m_(m) {}

    const WorldSet& eval(const Formula& f) {
        if (auto it = memo_.find(f.node()); it != memo_.end()) return it->second;
        WorldSet out = compute(f);
        return memo_.emplace(f.node(), std::move(out)).first->second;
    }

private:
    WorldSet compute(const Formula& f) {
        const std::size_t n = m_.size();
        switch (f.op()) {
            case Op::Atom: return m_.valuation(f.name());
            case Op::Top: return ~WorldSet(n);
            case Op::Bot: return WorldSet(n);
            case Op::Meta:
                throw std::invalid_argument("cannot evaluate schema metavariable '" + f.name() + "'");
            case Op::Not: return ~eval(f.arg());
            case Op::And: return eval(f.lhs()) & eval(f.rhs());
            case Op::Or: return eval(f.lhs()) | eval(f.rhs());
            case Op::Imp: return ~eval(f.lhs()) | eval(f.rhs());
            case Op::Iff: return ~(eval(f.lhs()) ^ eval(f.rhs()));
            default: break;
        }
        const WorldSet body = eval(f.arg());
        WorldSet out(n);
        for (std::size_t s = 0; s < n; ++s) {
            const WorldSet& r1 = m_.succ(1, s);
            const WorldSet& r2 = m_.succ(2, s);
            bool v = false;
            switch (f.op()) {
                case Op::BoxDot:
                    v = (all_in(r1, body) || none_in(r2, body)) && (none_in(r1, body) || all_in(r2, body));
                    break;
                case Op::BoxPlus: v = all_in(r1, body) || none_in(r2, body); break;
                case Op::Box: v = all_in(m_.succ(f.index(), s), body); break;
                case Op::Dia: v = !none_in(m_.succ(f.index(), s), body); break;
                case Op::Delta: {
                    const WorldSet& r = m_.succ(f.index(), s);
                    v = all_in(r, body) || none_in(r, body);
                    break;
                }
                default: break;
            }
            out[s] = v;
        }
        return out;
    }

    const Model& m_;
    std::unordered_map<const Node*, WorldSet> memo_;
};

}  // namespace detail

inline WorldSet truth_set(const Model& m, const Formula& f) {
    detail::Evaluator ev(m);
    return ev.eval(f);
}

inline bool satisfies(const Model& m, std::size_t s, const Formula& f) {
    if (s >= m.size()) throw ModelError("unknown world index " + std::to_string(s));
    return truth_set(m, f)[s];
}

inline bool satisfies(const Model& m, const std::string& world, const Formula& f) {
    return satisfies(m, m.index(world), f);
}

/// Truth at every world.
inline bool globally_true(const Model& m, const Formula& f) { return truth_set(m, f).all(); }

}  // namespace nck
