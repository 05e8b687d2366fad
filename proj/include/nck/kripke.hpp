#pragma once

// Finite bimodal frames and models, the line-oriented model file format,
// first-order frame-property checks, and deterministic frame enumeration.

#include <algorithm>
#include <array>
#include <cctype>
#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace nck {

using WorldSet = boost::dynamic_bitset<>;

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two accessibility relations over an ordered, named world set.
/// Relation indices are 1 and 2 throughout the public interface.
class Frame {
public:
    Frame() = default;

    explicit Frame(std::vector<std::string> names) {
        for (auto& n : names) add_world(std::move(n));
    }

    std::size_t add_world(std::string name) {
        if (index_.count(name)) throw ModelError("duplicate world '" + name + "'");
        const std::size_t id = names_.size();
        index_.emplace(name, id);
        names_.push_back(std::move(name));
        for (auto& rel : succ_) {
            for (auto& row : rel) row.resize(names_.size());
            rel.emplace_back(names_.size());
        }
        on_resize();
        return id;
    }

    [[nodiscard]] std::size_t size() const { return names_.size(); }
    [[nodiscard]] const std::string& name(std::size_t w) const { return names_.at(w); }
    [[nodiscard]] const std::vector<std::string>& names() const { return names_; }

    [[nodiscard]] std::optional<std::size_t> find(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    [[nodiscard]] std::size_t index(const std::string& name) const {
        auto w = find(name);
        if (!w) throw ModelError("unknown world '" + name + "'");
        return *w;
    }

    void add_edge(int rel, std::size_t x, std::size_t y) { succ_[slot(rel)].at(x).set(y); }
    void remove_edge(int rel, std::size_t x, std::size_t y) { succ_[slot(rel)].at(x).reset(y); }

    [[nodiscard]] bool has(int rel, std::size_t x, std::size_t y) const { return succ_[slot(rel)][x][y]; }
    [[nodiscard]] const WorldSet& succ(int rel, std::size_t x) const { return succ_[slot(rel)][x]; }
    [[nodiscard]] bool has_succ(int rel, std::size_t x) const { return succ_[slot(rel)][x].any(); }
    [[nodiscard]] bool is_endpoint(std::size_t x) const { return !has_succ(1, x) && !has_succ(2, x); }

    [[nodiscard]] std::size_t edge_count(int rel) const {
        std::size_t n = 0;
        for (const auto& row : succ_[slot(rel)]) n += row.count();
        return n;
    }

    /// Number of distinct pairs in R1 ∪ R2.
    [[nodiscard]] std::size_t edge_count() const {
        std::size_t n = 0;
        for (std::size_t x = 0; x < size(); ++x) n += (succ_[0][x] | succ_[1][x]).count();
        return n;
    }

    [[nodiscard]] WorldSet empty_set() const { return WorldSet(size()); }

    [[nodiscard]] bool same_frame(const Frame& o) const { return names_ == o.names_ && succ_ == o.succ_; }

protected:
    virtual void on_resize() {}

public:
    virtual ~Frame() = default;
    Frame(const Frame&) = default;
    Frame& operator=(const Frame&) = default;
    Frame(Frame&&) = default;
    Frame& operator=(Frame&&) = default;

private:
    static std::size_t slot(int rel) {
        if (rel != 1 && rel != 2) throw std::invalid_argument("relation index must be 1 or 2");
        return static_cast<std::size_t>(rel - 1);
    }

    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> index_;
    std::array<std::vector<WorldSet>, 2> succ_;
};

/// A frame plus a valuation over declared variables and an optional point.
class Model : public Frame {
public:
    Model() = default;
    explicit Model(std::vector<std::string> names) : Frame(std::move(names)) {}
    explicit Model(const Frame& f) : Frame(f) {}

    void declare(const std::string& var) {
        if (!val_.count(var)) val_.emplace(var, empty_set());
    }

    void set_true(const std::string& var, std::size_t w) {
        declare(var);
        val_.at(var).set(w);
    }

    void set_valuation(const std::string& var, WorldSet set) {
        if (set.size() != size()) throw ModelError("valuation size mismatch for '" + var + "'");
        val_[var] = std::move(set);
    }

    /// Truth set of a variable; undeclared variables are false everywhere.
    [[nodiscard]] WorldSet valuation(const std::string& var) const {
        auto it = val_.find(var);
        return it == val_.end() ? empty_set() : it->second;
    }

    [[nodiscard]] bool holds(const std::string& var, std::size_t w) const {
        auto it = val_.find(var);
        return it != val_.end() && it->second[w];
    }

    [[nodiscard]] std::set<std::string> declared() const {
        std::set<std::string> out;
        for (const auto& [k, _] : val_) out.insert(k);
        return out;
    }

    [[nodiscard]] const std::map<std::string, WorldSet>& valuations() const { return val_; }

    std::optional<std::size_t> point;

protected:
    void on_resize() override {
        for (auto& [_, s] : val_) s.resize(size());
    }

private:
    std::map<std::string, WorldSet> val_;
};

struct PointedModel {
    Model model;
    std::size_t point = 0;
};

// ---------------------------------------------------------------------------
// File format

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream is{std::string(s)};
    for (std::string w; is >> w;) out.push_back(w);
    return out;
}

inline bool valid_world_name(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '@' || c == '.' || c == '\'';
    });
}

inline bool valid_var_name(std::string_view s) {
    if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

inline std::vector<std::pair<std::string, std::string>> parse_edges(std::string_view body, int line) {
    std::string spaced;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body.substr(i, 2) == "->") {
            spaced += " -> ";
            ++i;
        } else {
            spaced += body[i];
        }
    }
    const auto toks = split_ws(spaced);
    if (toks.size() % 3 != 0) throw ModelError("line " + std::to_string(line) + ": malformed edge list");
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < toks.size(); i += 3) {
        if (toks[i + 1] != "->") throw ModelError("line " + std::to_string(line) + ": expected '->'");
        out.emplace_back(toks[i], toks[i + 2]);
    }
    return out;
}

}  // namespace detail

inline Model parse_model(std::string_view text) {
    Model m;
    bool have_worlds = false;
    int lineno = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string line = detail::trim(raw);
        if (line.empty()) continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos)
            throw ModelError("line " + std::to_string(lineno) + ": expected 'key:'");
        const std::string key = detail::trim(std::string_view(line).substr(0, colon));
        const std::string body = line.substr(colon + 1);
        const std::string where = "line " + std::to_string(lineno) + ": ";

        if (key == "worlds") {
            if (have_worlds) throw ModelError(where + "duplicate worlds line");
            have_worlds = true;
            for (auto& w : detail::split_ws(body)) {
                if (!detail::valid_world_name(w)) throw ModelError(where + "invalid world name '" + w + "'");
                try {
                    m.add_world(w);
                } catch (const ModelError& e) {
                    throw ModelError(where + e.what());
                }
            }
            if (m.size() == 0) throw ModelError(where + "worlds line declares no worlds");
            continue;
        }
        if (!have_worlds) throw ModelError(where + "missing worlds line");
        auto lookup = [&](const std::string& w) {
            auto id = m.find(w);
            if (!id) throw ModelError(where + "unknown world '" + w + "'");
            return *id;
        };
        if (key == "R1" || key == "R2") {
            const int rel = key == "R1" ? 1 : 2;
            for (const auto& [x, y] : detail::parse_edges(body, lineno)) m.add_edge(rel, lookup(x), lookup(y));
        } else if (key == "v") {
            const auto eq = body.find('=');
            if (eq == std::string::npos) throw ModelError(where + "expected 'v: var = worlds'");
            const std::string var = detail::trim(std::string_view(body).substr(0, eq));
            if (!detail::valid_var_name(var)) throw ModelError(where + "invalid variable name '" + var + "'");
            m.declare(var);
            for (auto& w : detail::split_ws(std::string_view(body).substr(eq + 1))) m.set_true(var, lookup(w));
        } else if (key == "point") {
            const auto toks = detail::split_ws(body);
            if (toks.size() != 1) throw ModelError(where + "expected exactly one point world");
            m.point = lookup(toks[0]);
        } else {
            throw ModelError(where + "unknown key '" + key + "'");
        }
    }
    if (!have_worlds) throw ModelError("missing worlds line");
    return m;
}

inline std::string print_model(const Model& m) {
    std::ostringstream os;
    os << "worlds:";
    for (const auto& n : m.names()) os << ' ' << n;
    os << '\n';
    for (int rel : {1, 2}) {
        os << 'R' << rel << ':';
        for (std::size_t x = 0; x < m.size(); ++x)
            for (std::size_t y = 0; y < m.size(); ++y)
                if (m.has(rel, x, y)) os << ' ' << m.name(x) << "->" << m.name(y);
        os << '\n';
    }
    for (const auto& [var, set] : m.valuations()) {
        os << "v: " << var << " =";
        for (std::size_t w = 0; w < m.size(); ++w)
            if (set[w]) os << ' ' << m.name(w);
        os << '\n';
    }
    if (m.point) os << "point: " << m.name(*m.point) << '\n';
    return os.str();
}

/// Disjoint union with worlds renamed "a.<w>" and "b.<w>"; `a`'s worlds come first.
inline Model disjoint_union(const Model& a, const Model& b) {
    Model u;
    for (const auto& n : a.names()) u.add_world("a." + n);
    for (const auto& n : b.names()) u.add_world("b." + n);
    const std::size_t off = a.size();
    for (int rel : {1, 2}) {
        for (std::size_t x = 0; x < a.size(); ++x)
            for (std::size_t y = 0; y < a.size(); ++y)
                if (a.has(rel, x, y)) u.add_edge(rel, x, y);
        for (std::size_t x = 0; x < b.size(); ++x)
            for (std::size_t y = 0; y < b.size(); ++y)
                if (b.has(rel, x, y)) u.add_edge(rel, off + x, off + y);
    }
    for (const auto& [var, set] : a.valuations()) {
        u.declare(var);
        for (std::size_t w = 0; w < a.size(); ++w)
            if (set[w]) u.set_true(var, w);
    }
    for (const auto& [var, set] : b.valuations()) {
        u.declare(var);
        for (std::size_t w = 0; w < b.size(); ++w)
            if (set[w]) u.set_true(var, off + w);
    }
    return u;
}

/// Graphviz rendering; world labels list the valuation over `vars`.
inline std::string to_dot(const Model& m, const std::set<std::string>& vars) {
    std::ostringstream os;
    os << "digraph model {\n";
    for (std::size_t w = 0; w < m.size(); ++w) {
        os << "  \"" << m.name(w) << "\" [label=\"" << m.name(w);
        const char* sep = ":";
        for (const auto& v : vars) {
            os << sep << (m.holds(v, w) ? "" : "~") << v;
            sep = ",";
        }
        os << "\"";
        if (m.point && *m.point == w) os << ", shape=doublecircle";
        os << "];\n";
    }
    for (std::size_t x = 0; x < m.size(); ++x)
        for (std::size_t y = 0; y < m.size(); ++y) {
            const bool r1 = m.has(1, x, y), r2 = m.has(2, x, y);
            if (!r1 && !r2) continue;
            os << "  \"" << m.name(x) << "\" -> \"" << m.name(y) << "\" [label=\""
               << (r1 && r2 ? "1,2" : r1 ? "1" : "2") << "\"];\n";
        }
    os << "}\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Frame properties

enum class PropertyTag : std::uint8_t {
    serial,
    reflexive,
    reflexive_any,
    transitive,
    symmetric,
    euclidean,
    quasi_symmetric,
    qt,
    pt,
    qe,
    pe,
    all,
};

inline constexpr std::array<PropertyTag, 12> all_property_tags{
    PropertyTag::serial, PropertyTag::reflexive, PropertyTag::reflexive_any, PropertyTag::transitive,
    PropertyTag::symmetric, PropertyTag::euclidean, PropertyTag::quasi_symmetric, PropertyTag::qt,
    PropertyTag::pt, PropertyTag::qe, PropertyTag::pe, PropertyTag::all,
};

inline const char* to_string(PropertyTag t) {
    switch (t) {
        case PropertyTag::serial: return "serial";
        case PropertyTag::reflexive: return "reflexive";
        case PropertyTag::reflexive_any: return "reflexive_any";
        case PropertyTag::transitive: return "transitive";
        case PropertyTag::symmetric: return "symmetric";
        case PropertyTag::euclidean: return "euclidean";
        case PropertyTag::quasi_symmetric: return "quasi_symmetric";
        case PropertyTag::qt: return "qt";
        case PropertyTag::pt: return "pt";
        case PropertyTag::qe: return "qe";
        case PropertyTag::pe: return "pe";
        case PropertyTag::all: return "all";
    }
    return "?";
}

inline PropertyTag parse_property_tag(std::string_view s) {
    for (auto t : all_property_tags)
        if (s == to_string(t)) return t;
    throw std::invalid_argument("unknown frame class '" + std::string(s) + "'");
}

/// Failing tuple of worlds plus the relation indices that were instantiated.
struct PropertyResult {
    bool holds = true;
    std::vector<std::size_t> witness;
    int i = 0;
    int j = 0;
};

/// Minimal frame interface: size() and has(rel, x, y).
template <class F>
concept FrameLike = requires(const F& f, std::size_t x) {
    { f.size() } -> std::convertible_to<std::size_t>;
    { f.has(1, x, x) } -> std::convertible_to<bool>;
};

namespace detail {

template <FrameLike F>
bool has_any_succ(const F& f, int rel, std::size_t x) {
    for (std::size_t y = 0; y < f.size(); ++y)
        if (f.has(rel, x, y)) return true;
    return false;
}

inline PropertyResult fail(std::vector<std::size_t> w, int i = 0, int j = 0) {
    return PropertyResult{false, std::move(w), i, j};
}

template <FrameLike F>
PropertyResult check_serial(const F& f) {
    for (std::size_t x = 0; x < f.size(); ++x)
        for (int i : {1, 2})
            if (!has_any_succ(f, i, x)) return fail({x}, i);
    return {};
}

template <FrameLike F>
PropertyResult check_reflexive_rel(const F& f, int i) {
    for (std::size_t x = 0; x < f.size(); ++x)
        if (!f.has(i, x, x)) return fail({x}, i);
    return {};
}

template <FrameLike F>
PropertyResult check_binary(const F& f, bool (*bad)(const F&, int, std::size_t, std::size_t)) {
    for (std::size_t x = 0; x < f.size(); ++x)
        for (std::size_t y = 0; y < f.size(); ++y)
            for (int i : {1, 2})
                if (bad(f, i, x, y)) return fail({x, y}, i);
    return {};
}

/// Iterates triples lexicographically, then (i, j); `bad` flags a violation.
template <FrameLike F, class Bad>
PropertyResult check_ternary(const F& f, bool mixed, Bad bad) {
    const std::size_t n = f.size();
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t z = 0; z < n; ++z)
                for (int i : {1, 2})
                    for (int j : {1, 2}) {
                        if (!mixed && i != j) continue;
                        if (bad(i, j, x, y, z)) return fail({x, y, z}, i, mixed ? j : 0);
                    }
    return {};
}

}  // namespace detail

/// Decides a first-order frame property; on failure the witness is the
/// lexicographically least violating tuple.
template <FrameLike F>
PropertyResult check_property(const F& f, PropertyTag tag) {
    using namespace detail;
    switch (tag) {
        case PropertyTag::all: return {};
        case PropertyTag::serial: return check_serial(f);
        case PropertyTag::reflexive:
            for (std::size_t x = 0; x < f.size(); ++x)
                for (int i : {1, 2})
                    if (!f.has(i, x, x)) return fail({x}, i);
            return {};
        case PropertyTag::reflexive_any: {
            auto r1 = check_reflexive_rel(f, 1);
            if (r1.holds) return r1;
            auto r2 = check_reflexive_rel(f, 2);
            if (r2.holds) return r2;
            return fail({r1.witness[0], r2.witness[0]}, 1, 2);
        }
        case PropertyTag::symmetric:
            return check_binary<F>(f, [](const F& g, int i, std::size_t x, std::size_t y) {
                return g.has(i, x, y) && !g.has(i, y, x);
            });
        case PropertyTag::quasi_symmetric:
            return check_binary<F>(f, [](const F& g, int i, std::size_t s, std::size_t t) {
                const bool t_live = has_any_succ(g, 1, t) || has_any_succ(g, 2, t);
                return t_live && g.has(i, s, t) && !g.has(i, t, s);
            });
        case PropertyTag::transitive:
            return check_ternary(f, false, [&](int i, int, std::size_t x, std::size_t y, std::size_t z) {
                return f.has(i, x, y) && f.has(i, y, z) && !f.has(i, x, z);
            });
        case PropertyTag::euclidean:
            return check_ternary(f, false, [&](int i, int, std::size_t x, std::size_t y, std::size_t z) {
                return f.has(i, x, y) && f.has(i, x, z) && !f.has(i, y, z);
            });
        case PropertyTag::qt:
            return check_ternary(f, true, [&](int i, int j, std::size_t x, std::size_t y, std::size_t z) {
                return f.has(i, x, y) && f.has(j, y, z) && !f.has(j, x, z);
            });
        case PropertyTag::pt:
            return check_ternary(f, true, [&](int i, int j, std::size_t x, std::size_t y, std::size_t z) {
                return f.has(i, x, y) && f.has(j, y, z) && !(f.has(1, x, z) && f.has(2, x, z));
            });
        case PropertyTag::qe:
            return check_ternary(f, true, [&](int i, int j, std::size_t x, std::size_t y, std::size_t z) {
                return f.has(i, x, y) && f.has(j, x, z) && !f.has(j, y, z);
            });
        case PropertyTag::pe:
            return check_ternary(f, true, [&](int i, int j, std::size_t x, std::size_t y, std::size_t z) {
                return f.has(i, x, y) && f.has(j, x, z) && !(f.has(1, y, z) && f.has(2, y, z));
            });
    }
    return {};
}

// ---------------------------------------------------------------------------
// Enumeration

/// Frame on worlds 0..n-1 packed as two n*n bitmasks; bit x*n+y encodes xRy.
struct MaskFrame {
    unsigned n = 0;
    std::uint64_t r1 = 0;
    std::uint64_t r2 = 0;

    [[nodiscard]] std::size_t size() const { return n; }
    [[nodiscard]] bool has(int rel, std::size_t x, std::size_t y) const {
        const std::uint64_t m = rel == 1 ? r1 : r2;
        return (m >> (x * n + y)) & 1U;
    }

    friend bool operator==(const MaskFrame&, const MaskFrame&) = default;
};

inline std::string enumerated_world_name(std::size_t w) { return "w" + std::to_string(w); }

inline Frame to_frame(const MaskFrame& m) {
    Frame f;
    for (std::size_t w = 0; w < m.n; ++w) f.add_world(enumerated_world_name(w));
    for (int rel : {1, 2})
        for (std::size_t x = 0; x < m.n; ++x)
            for (std::size_t y = 0; y < m.n; ++y)
                if (m.has(rel, x, y)) f.add_edge(rel, x, y);
    return f;
}

inline constexpr unsigned default_enumeration_cap = 4;
inline constexpr unsigned max_enumeration_cap = 5;

/// Yields every frame on n worlds satisfying a tag, ordered by (R1, R2)
/// bitmask. Each relation is first drawn from a prefiltered candidate list
/// (a necessary single-relation condition); the full check runs afterwards.
class FrameEnumerator {
public:
    FrameEnumerator(unsigned n, PropertyTag tag, unsigned cap = default_enumeration_cap) : n_(n), tag_(tag) {
        if (cap > max_enumeration_cap) throw std::invalid_argument("enumeration cap above 5 worlds");
        if (n < 1 || n > cap)
            throw std::out_of_range("frame enumeration on " + std::to_string(n) + " worlds exceeds cap " +
                                    std::to_string(cap));
        build_candidates();
    }

    /// Next frame in order, or nullopt when the stream is exhausted.
    std::optional<MaskFrame> next() {
        while (a_ < cands_.size()) {
            if (b_ >= cands_.size()) {
                ++a_;
                b_ = 0;
                continue;
            }
            MaskFrame f{n_, cands_[a_], cands_[b_++]};
            if (exact_ || check_property(f, tag_).holds) return f;
        }
        return std::nullopt;
    }

    /// Size of the candidate space (an upper bound on frames yielded).
    [[nodiscard]] std::uint64_t candidate_pairs() const {
        return static_cast<std::uint64_t>(cands_.size()) * cands_.size();
    }

private:
    struct Single {
        unsigned n;
        std::uint64_t m;
        [[nodiscard]] std::size_t size() const { return n; }
        [[nodiscard]] bool has(int, std::size_t x, std::size_t y) const { return (m >> (x * n + y)) & 1U; }
    };

    void build_candidates() {
        const unsigned bits = n_ * n_;
        const std::uint64_t limit = bits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
        // Tags that are exactly "both relations satisfy P" need no second check.
        std::optional<PropertyTag> single;
        switch (tag_) {
            case PropertyTag::serial:
            case PropertyTag::reflexive:
            case PropertyTag::transitive:
            case PropertyTag::symmetric:
            case PropertyTag::euclidean:
                single = tag_;
                exact_ = true;
                break;
            case PropertyTag::all: exact_ = true; break;
            case PropertyTag::qt:
            case PropertyTag::pt: single = PropertyTag::transitive; break;
            case PropertyTag::qe:
            case PropertyTag::pe: single = PropertyTag::euclidean; break;
            default: break;
        }
        for (std::uint64_t m = 0;; ++m) {
            if (!single || check_property(MaskFrame{n_, m, m}, *single).holds) cands_.push_back(m);
            if (m == limit) break;
        }
    }

    unsigned n_;
    PropertyTag tag_;
    bool exact_ = false;
    std::vector<std::uint64_t> cands_;
    std::size_t a_ = 0;
    std::size_t b_ = 0;
};

/// Materializes the full enumeration; intended for small n.
inline std::vector<MaskFrame> enumerate_frames(unsigned n, PropertyTag tag, unsigned cap = default_enumeration_cap) {
    FrameEnumerator e(n, tag, cap);
    std::vector<MaskFrame> out;
    while (auto f = e.next()) out.push_back(*f);
    return out;
}

}  // namespace nck
