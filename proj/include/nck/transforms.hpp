#pragma once

// Model constructions with their canonical maps back to the input:
// endpoint reflexivization, serialization with copy worlds, reflexive
// closure, and symmetric completion of quasi-symmetric models.

#include <stdexcept>
#include <string>
#include <vector>

#include "kripke.hpp"
#include "morphisms.hpp"

namespace nck {

struct TransformResult {
    Model output;
    WorldMap map;  // output world -> input world
    MorphismReport report;
};

class NotQuasiSymmetric : public std::invalid_argument {
public:
    NotQuasiSymmetric(std::vector<std::string> witness, int rel)
        : std::invalid_argument(compose(witness, rel)), witness_(std::move(witness)), rel_(rel) {}
    [[nodiscard]] const std::vector<std::string>& witness() const { return witness_; }
    [[nodiscard]] int relation() const { return rel_; }

private:
    static std::string compose(const std::vector<std::string>& w, int rel) {
        return "model is not quasi-symmetric: " + w[0] + " R" + std::to_string(rel) + " " + w[1] + " but not " +
               w[1] + " R" + std::to_string(rel) + " " + w[0];
    }
    std::vector<std::string> witness_;
    int rel_;
};

inline std::string copy_world_name(const std::string& s, const std::string& t, int i) {
    return s + "@" + t + "@" + std::to_string(i);
}

namespace detail {

/// Valuation of output world w copied from input world map(w), for every declared variable.
inline void pull_back(const Model& in, Model& out, const WorldMap& map) {
    for (const auto& var : in.declared()) {
        out.declare(var);
        for (std::size_t w = 0; w < out.size(); ++w)
            if (in.holds(var, map(w))) out.set_true(var, w);
    }
}

inline Model copy_of(const Model& m) {
    Model out = m;
    out.point.reset();
    return out;
}

}  // namespace detail

/// Adds both loops at every world that has no successor under either relation.
inline TransformResult reflexivize_endpoints(const Model& m) {
    TransformResult r{detail::copy_of(m), identity_map(m.size()), {}};
    for (std::size_t s = 0; s < m.size(); ++s)
        if (m.is_endpoint(s)) {
            r.output.add_edge(1, s, s);
            r.output.add_edge(2, s, s);
        }
    r.report = check_model_morphism(r.output, m, r.map);
    return r;
}

/// Adds both loops at every world.
inline TransformResult reflexive_closure(const Model& m) {
    TransformResult r{detail::copy_of(m), identity_map(m.size()), {}};
    for (std::size_t s = 0; s < m.size(); ++s) {
        r.output.add_edge(1, s, s);
        r.output.add_edge(2, s, s);
    }
    r.report = check_model_morphism(r.output, m, r.map);
    return r;
}

/// Serial model with a surjective ⊡-morphism g back to the input. Worlds
/// with successors under both relations, or under neither, are kept; a world
/// with successors under exactly one relation i is replaced by copies
/// (s, t, i), one per Ri-successor t.
inline TransformResult serialize(const Model& m) {
    const std::size_t n = m.size();
    auto e = [&](int i, std::size_t s) { return m.has_succ(i, s); };
    auto kept = [&](std::size_t s) { return e(1, s) == e(2, s); };

    struct Origin {
        std::size_t s;
        std::size_t t;  // meaningful for copies only
        int i;          // 0 for kept worlds
    };
    std::vector<Origin> origin;
    Model out;
    for (std::size_t s = 0; s < n; ++s) {
        if (kept(s)) {
            out.add_world(m.name(s));
            origin.push_back({s, 0, 0});
            continue;
        }
        const int i = e(1, s) ? 1 : 2;
        for (std::size_t t = 0; t < n; ++t)
            if (m.has(i, s, t)) {
                out.add_world(copy_world_name(m.name(s), m.name(t), i));
                origin.push_back({s, t, i});
            }
    }

    const std::size_t n2 = out.size();
    for (int rel : {1, 2})
        for (std::size_t a = 0; a < n2; ++a)
            for (std::size_t b = 0; b < n2; ++b) {
                const Origin& x = origin[a];
                const Origin& y = origin[b];
                // y.s is the kept world itself or the first coordinate of a copy.
                bool edge = false;
                if (x.i == 0 && !e(1, x.s))
                    edge = a == b;  // dead world: loop only
                else if (x.i == 0)
                    edge = m.has(rel, x.s, y.s);  // live world: successors or their copies
                else
                    edge = y.s == x.t;  // copy (s,t,i): t itself or the copies of t
                if (edge) out.add_edge(rel, a, b);
            }

    WorldMap g;
    for (const auto& o : origin) g.image.push_back(o.s);
    detail::pull_back(m, out, g);
    TransformResult r{std::move(out), std::move(g), {}};
    r.report = check_model_morphism(r.output, m, r.map);
    return r;
}

/// Symmetric model with a surjective ⊡-morphism h back to a quasi-symmetric
/// input. Ti collects dead worlds with an Ri-predecessor; each such t is
/// represented by copies (s, t, i), one per Ri-predecessor s.
inline TransformResult symmetrize(const Model& m) {
    if (auto q = check_property(m, PropertyTag::quasi_symmetric); !q.holds)
        throw NotQuasiSymmetric({m.name(q.witness[0]), m.name(q.witness[1])}, q.i);

    const std::size_t n = m.size();
    auto has_pred = [&](int i, std::size_t t) {
        for (std::size_t s = 0; s < n; ++s)
            if (m.has(i, s, t)) return true;
        return false;
    };
    auto in_T = [&](int i, std::size_t t) { return has_pred(i, t) && m.is_endpoint(t); };

    struct Origin {
        std::size_t s;  // first coordinate of a copy
        std::size_t t;  // the input world this output world stands for
        int i;          // 0 for plain worlds
    };
    std::vector<Origin> origin;
    Model out;
    for (std::size_t t = 0; t < n; ++t)
        if (!in_T(1, t) || !in_T(2, t)) {
            out.add_world(m.name(t));
            origin.push_back({t, t, 0});
        }
    for (int i : {1, 2})
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t t = 0; t < n; ++t)
                if (in_T(i, t) && m.has(i, s, t)) {
                    out.add_world(copy_world_name(m.name(s), m.name(t), i));
                    origin.push_back({s, t, i});
                }

    const std::size_t n2 = out.size();
    for (int rel : {1, 2})
        for (std::size_t a = 0; a < n2; ++a)
            for (std::size_t b = 0; b < n2; ++b) {
                const Origin& x = origin[a];
                const Origin& y = origin[b];
                const bool c1 = x.i == 0 && y.i == 0 && !in_T(rel, y.t) && m.has(rel, x.t, y.t);
                const bool c2 = x.i == 0 && y.i == rel && y.s == x.t;
                const bool c3 = x.i == rel && y.i == 0 && x.s == y.t;
                if (c1 || c2 || c3) out.add_edge(rel, a, b);
            }

    WorldMap h;
    for (const auto& o : origin) h.image.push_back(o.t);
    detail::pull_back(m, out, h);
    TransformResult r{std::move(out), std::move(h), {}};
    r.report = check_model_morphism(r.output, m, r.map);
    return r;
}

}  // namespace nck
