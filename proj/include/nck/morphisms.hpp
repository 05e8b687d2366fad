#pragma once

// Verification and exhaustive search of ⊡-morphisms between finite models
// and frames, plus the map file format.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kripke.hpp"

namespace nck {

/// Total function from source worlds to target worlds, by index.
struct WorldMap {
    std::vector<std::size_t> image;

    [[nodiscard]] std::size_t operator()(std::size_t x) const { return image.at(x); }
    [[nodiscard]] std::size_t size() const { return image.size(); }
    friend bool operator==(const WorldMap&, const WorldMap&) = default;
};

struct Violation {
    std::string condition;  // "Var", "Forth", "Back", or a strengthened variant
    std::vector<std::string> witness;
    std::string detail;
};

struct MorphismReport {
    bool var_ok = true;
    bool forth_ok = true;
    bool back_ok = true;
    bool surjective = true;
    std::vector<Violation> violations;

    /// Var, Forth and Back all hold.
    [[nodiscard]] bool morphism() const { return var_ok && forth_ok && back_ok; }
    [[nodiscard]] bool ok() const { return morphism() && surjective; }
};

inline WorldMap identity_map(std::size_t n) {
    WorldMap m;
    for (std::size_t i = 0; i < n; ++i) m.image.push_back(i);
    return m;
}

namespace detail {

inline void require_total(const Frame& src, const Frame& tgt, const WorldMap& f) {
    if (f.size() != src.size())
        throw std::invalid_argument("map is not total: " + std::to_string(f.size()) + " of " +
                                    std::to_string(src.size()) + " source worlds mapped");
    for (std::size_t x = 0; x < f.size(); ++x)
        if (f.image[x] >= tgt.size()) throw std::invalid_argument("map image outside target for " + src.name(x));
}

inline std::optional<Violation> forth_violation(const Frame& src, const Frame& tgt, const WorldMap& f) {
    const std::size_t n = src.size();
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            if (!src.has(1, x, y)) continue;
            for (std::size_t z = 0; z < n; ++z) {
                if (!src.has(2, x, z) || f(y) == f(z)) continue;
                if (tgt.has(1, f(x), f(y)) && tgt.has(2, f(x), f(z))) continue;
                return Violation{"Forth", {src.name(x), src.name(y), src.name(z)},
                                 "image of " + src.name(x) + " lacks R1->" + tgt.name(f(y)) + " or R2->" +
                                     tgt.name(f(z))};
            }
        }
    return std::nullopt;
}

inline std::optional<Violation> back_violation(const Frame& src, const Frame& tgt, const WorldMap& f) {
    for (std::size_t x = 0; x < src.size(); ++x) {
        const std::size_t fx = f(x);
        for (std::size_t y2 = 0; y2 < tgt.size(); ++y2) {
            if (!tgt.has(1, fx, y2)) continue;
            for (std::size_t z2 = 0; z2 < tgt.size(); ++z2) {
                if (!tgt.has(2, fx, z2) || y2 == z2) continue;
                bool found_y = false, found_z = false;
                for (std::size_t y = 0; y < src.size(); ++y) {
                    found_y = found_y || (src.has(1, x, y) && f(y) == y2);
                    found_z = found_z || (src.has(2, x, y) && f(y) == z2);
                }
                if (found_y && found_z) continue;
                return Violation{"Back", {src.name(x), tgt.name(y2), tgt.name(z2)},
                                 "no R1/R2 successors of " + src.name(x) + " map onto " + tgt.name(y2) + ", " +
                                     tgt.name(z2)};
            }
        }
    }
    return std::nullopt;
}

inline bool is_surjective(const Frame& tgt, const WorldMap& f) {
    WorldSet hit(tgt.size());
    for (auto y : f.image) hit.set(y);
    return hit.all();
}

inline std::optional<Violation> var_violation(const Model& src, const Model& tgt, const WorldMap& f,
                                              const std::set<std::string>& varset) {
    for (std::size_t x = 0; x < src.size(); ++x)
        for (const auto& p : varset)
            if (src.holds(p, x) != tgt.holds(p, f(x)))
                return Violation{"Var", {src.name(x)}, p + " differs at " + src.name(x) + " and " + tgt.name(f(x))};
    return std::nullopt;
}

inline MorphismReport frame_report(const Frame& src, const Frame& tgt, const WorldMap& f) {
    require_total(src, tgt, f);
    MorphismReport r;
    if (auto v = forth_violation(src, tgt, f)) {
        r.forth_ok = false;
        r.violations.push_back(*v);
    }
    if (auto v = back_violation(src, tgt, f)) {
        r.back_ok = false;
        r.violations.push_back(*v);
    }
    r.surjective = is_surjective(tgt, f);
    return r;
}

}  // namespace detail

inline MorphismReport check_frame_morphism(const Frame& src, const Frame& tgt, const WorldMap& f) {
    return detail::frame_report(src, tgt, f);
}

/// Checks (Var) over `varset` in addition to (Forth) and (Back).
inline MorphismReport check_model_morphism(const Model& src, const Model& tgt, const WorldMap& f,
                                           const std::set<std::string>& varset) {
    detail::require_total(src, tgt, f);
    MorphismReport r;
    if (auto v = detail::var_violation(src, tgt, f, varset)) {
        r.var_ok = false;
        r.violations.push_back(*v);
    }
    MorphismReport fr = detail::frame_report(src, tgt, f);
    r.forth_ok = fr.forth_ok;
    r.back_ok = fr.back_ok;
    r.surjective = fr.surjective;
    r.violations.insert(r.violations.end(), fr.violations.begin(), fr.violations.end());
    return r;
}

/// (Var) over every variable declared in either model.
inline MorphismReport check_model_morphism(const Model& src, const Model& tgt, const WorldMap& f) {
    std::set<std::string> vs = src.declared();
    for (const auto& v : tgt.declared()) vs.insert(v);
    return check_model_morphism(src, tgt, f, vs);
}

/// Forth with the premise t != u instead of f(t) != f(u).
inline std::optional<Violation> check_strong_forth(const Frame& src, const Frame& tgt, const WorldMap& f) {
    detail::require_total(src, tgt, f);
    const std::size_t n = src.size();
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t) {
            if (!src.has(1, s, t)) continue;
            for (std::size_t u = 0; u < n; ++u) {
                if (!src.has(2, s, u) || t == u) continue;
                if (tgt.has(1, f(s), f(t)) && tgt.has(2, f(s), f(u))) continue;
                return Violation{"StrongForth", {src.name(s), src.name(t), src.name(u)}, ""};
            }
        }
    return std::nullopt;
}

/// Back for each relation separately: f(s) Ri t' implies s Ri t for some t with f(t) = t'.
inline std::optional<Violation> check_strong_back(const Frame& src, const Frame& tgt, const WorldMap& f) {
    detail::require_total(src, tgt, f);
    for (std::size_t s = 0; s < src.size(); ++s)
        for (int i : {1, 2})
            for (std::size_t t2 = 0; t2 < tgt.size(); ++t2) {
                if (!tgt.has(i, f(s), t2)) continue;
                bool found = false;
                for (std::size_t t = 0; t < src.size() && !found; ++t) found = src.has(i, s, t) && f(t) == t2;
                if (!found)
                    return Violation{"StrongBack", {src.name(s), tgt.name(t2)}, "relation " + std::to_string(i)};
            }
    return std::nullopt;
}

inline constexpr std::uint64_t default_search_budget = 1'000'000;

/// Lexicographically least map (source world 0 most significant, target
/// worlds in declared order) passing check_model_morphism over `varset`.
inline std::optional<WorldMap> find_morphism(const Model& src, const Model& tgt, const std::set<std::string>& varset,
                                             bool require_surjective,
                                             std::uint64_t budget = default_search_budget) {
    const std::size_t n = src.size(), m = tgt.size();
    std::uint64_t space = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (space > budget / std::max<std::size_t>(m, 1)) throw std::length_error("morphism search budget exceeded");
        space *= m;
    }
    if (space > budget) throw std::length_error("morphism search budget exceeded");
    if (m == 0) return std::nullopt;

    // Candidates per source world satisfying (Var), kept in target order.
    std::vector<std::vector<std::size_t>> cand(n);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < m; ++y) {
            bool ok = true;
            for (const auto& p : varset) ok = ok && src.holds(p, x) == tgt.holds(p, y);
            if (ok) cand[x].push_back(y);
        }
    for (const auto& c : cand)
        if (c.empty()) return std::nullopt;

    std::vector<std::size_t> digit(n, 0);
    WorldMap f;
    f.image.resize(n);
    for (;;) {
        for (std::size_t x = 0; x < n; ++x) f.image[x] = cand[x][digit[x]];
        const MorphismReport r = detail::frame_report(src, tgt, f);
        if (r.morphism() && (!require_surjective || r.surjective)) return f;
        std::size_t pos = n;
        while (pos > 0) {
            --pos;
            if (++digit[pos] < cand[pos].size()) break;
            digit[pos] = 0;
            if (pos == 0) return std::nullopt;
        }
        if (n == 0) return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// Map file format: one "x => y" line per source world.

inline WorldMap parse_map(std::string_view text, const Frame& src, const Frame& tgt) {
    WorldMap f;
    f.image.assign(src.size(), SIZE_MAX);
    std::istringstream in{std::string(text)};
    int lineno = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++lineno;
        if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
        const std::string line = detail::trim(raw);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        const auto arrow = line.find("=>");
        if (arrow == std::string::npos) throw ModelError(where + "expected 'x => y'");
        const std::string x = detail::trim(std::string_view(line).substr(0, arrow));
        const std::string y = detail::trim(std::string_view(line).substr(arrow + 2));
        auto xi = src.find(x);
        auto yi = tgt.find(y);
        if (!xi) throw ModelError(where + "unknown source world '" + x + "'");
        if (!yi) throw ModelError(where + "unknown target world '" + y + "'");
        if (f.image[*xi] != SIZE_MAX) throw ModelError(where + "world '" + x + "' mapped twice");
        f.image[*xi] = *yi;
    }
    for (std::size_t x = 0; x < src.size(); ++x)
        if (f.image[x] == SIZE_MAX) throw ModelError("map is not total: '" + src.name(x) + "' unmapped");
    return f;
}

inline std::string print_map(const WorldMap& f, const Frame& src, const Frame& tgt) {
    std::ostringstream os;
    for (std::size_t x = 0; x < f.size(); ++x) os << src.name(x) << " => " << tgt.name(f(x)) << '\n';
    return os.str();
}

inline std::string describe(const Violation& v) {
    std::string s = v.condition + " (";
    for (std::size_t i = 0; i < v.witness.size(); ++i) s += (i ? ", " : "") + v.witness[i];
    s += ")";
    if (!v.detail.empty()) s += ": " + v.detail;
    return s;
}

}  // namespace nck
