#pragma once

// Hilbert-style proof checking for the ⊞ system and the ⊡ system with its
// extensions: schema matching, propositional tautology checks on modal
// skeletons, rule application and a theorem library.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "formula.hpp"
#include "kripke.hpp"

namespace nck {

struct AxiomSchema {
    std::string name;
    Formula pattern;  // metavariables A, B, C
};

inline const std::vector<AxiomSchema>& axiom_schemas() {
    static const std::vector<AxiomSchema> table = [] {
        const std::pair<const char*, const char*> src[] = {
            {"CONplus", "[+]A & [+]B -> [+](A & B) & [+](A | B)"},
            {"DISplus", "[+]A -> [+](A | B) | [+](A & C)"},
            {"AxTop", "[.]true"},
            {"EQUdot", "[.]A <-> [.]~A"},
            {"CONdot", "[.]A & [.]B -> [.](A & B)"},
            {"DISdot", "[.]A -> [.](A | B) | [.](~A | C)"},
            {"Tdot", "A -> ([.]A -> ([.](A -> B) -> [.]B))"},
            {"Bdot", "A -> [.]([.]A & [.](A -> B) & ~[.]B -> C)"},
            {"A4dot", "[.]A -> [.]([.]A | B)"},
            {"A5dot", "~[.]A -> [.](~[.]A | B)"},
        };
        std::vector<AxiomSchema> out;
        for (const auto& [n, p] : src) out.push_back({n, parse_pattern(p)});
        return out;
    }();
    return table;
}

inline const AxiomSchema& axiom_schema(std::string_view name) {
    for (const auto& a : axiom_schemas())
        if (a.name == name) return a;
    throw std::invalid_argument("unknown axiom schema '" + std::string(name) + "'");
}

using Substitution = std::map<std::string, Formula>;

namespace detail {
inline bool match_into(const Formula& pat, const Formula& f, Substitution& s) {
    if (pat.op() == Op::Meta) {
        auto [it, fresh] = s.try_emplace(pat.name(), f);
        return fresh || it->second == f;
    }
    if (pat.op() != f.op()) return false;
    switch (pat.op()) {
        case Op::Atom: return pat.name() == f.name();
        case Op::Top:
        case Op::Bot: return true;
        default: break;
    }
    if (pat.is_modal() && pat.index() != f.index()) return false;
    if (pat.is_unary()) return match_into(pat.arg(), f.arg(), s);
    return match_into(pat.lhs(), f.lhs(), s) && match_into(pat.rhs(), f.rhs(), s);
}
}  // namespace detail

/// Metavariables bind on first occurrence; later occurrences must match the binding.
inline std::optional<Substitution> match_schema(const AxiomSchema& schema, const Formula& f) {
    if (!metavars(f).empty()) return std::nullopt;
    Substitution s;
    if (!detail::match_into(schema.pattern, f, s)) return std::nullopt;
    return s;
}

inline Formula substitute(const Formula& pat, const Substitution& s) {
    switch (pat.op()) {
        case Op::Meta: {
            auto it = s.find(pat.name());
            if (it == s.end()) throw std::invalid_argument("unbound metavariable '" + pat.name() + "'");
            return it->second;
        }
        case Op::Atom:
        case Op::Top:
        case Op::Bot: return pat;
        case Op::Not: return Formula::neg(substitute(pat.arg(), s));
        case Op::BoxDot: return Formula::boxdot(substitute(pat.arg(), s));
        case Op::BoxPlus: return Formula::boxplus(substitute(pat.arg(), s));
        case Op::Box: return Formula::box(pat.index(), substitute(pat.arg(), s));
        case Op::Dia: return Formula::dia(pat.index(), substitute(pat.arg(), s));
        case Op::Delta: return Formula::delta(pat.index(), substitute(pat.arg(), s));
        case Op::And: return Formula::conj(substitute(pat.lhs(), s), substitute(pat.rhs(), s));
        case Op::Or: return Formula::disj(substitute(pat.lhs(), s), substitute(pat.rhs(), s));
        case Op::Imp: return Formula::imp(substitute(pat.lhs(), s), substitute(pat.rhs(), s));
        case Op::Iff: return Formula::iff(substitute(pat.lhs(), s), substitute(pat.rhs(), s));
    }
    return pat;
}

/// Instance of a schema with metavariables A, B, C replaced by p, q, r.
inline Formula distinct_atom_instance(const AxiomSchema& schema) {
    Substitution s{{"A", Formula::atom("p")}, {"B", Formula::atom("q")}, {"C", Formula::atom("r")}};
    return substitute(schema.pattern, s);
}

// ---------------------------------------------------------------------------
// Tautologies

inline constexpr std::size_t max_skeleton_atoms = 20;

class AtomBudgetExceeded : public std::length_error {
public:
    using std::length_error::length_error;
};

namespace detail {

/// Leaves of the propositional skeleton: atoms and maximal modal subformulas.
inline void skeleton_leaves(const Formula& f, std::map<std::string, std::size_t>& ids) {
    if (f.op() == Op::Meta) throw std::invalid_argument("tautology check on a schema pattern");
    if (f.op() == Op::Atom || f.is_modal()) {
        ids.try_emplace((f.op() == Op::Atom ? "a:" : "m:") + print(f), ids.size());
        return;
    }
    if (f.is_unary()) skeleton_leaves(f.arg(), ids);
    if (f.is_binary()) {
        skeleton_leaves(f.lhs(), ids);
        skeleton_leaves(f.rhs(), ids);
    }
}

inline std::uint64_t skeleton_eval(const Formula& f, const std::map<std::string, std::size_t>& ids,
                                   std::uint64_t word) {
    static constexpr std::uint64_t low[6] = {0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
                                             0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
    if (f.op() == Op::Atom || f.is_modal()) {
        const std::size_t k = ids.at((f.op() == Op::Atom ? "a:" : "m:") + print(f));
        if (k < 6) return low[k];
        return ((word >> (k - 6)) & 1U) ? ~std::uint64_t{0} : 0;
    }
    switch (f.op()) {
        case Op::Top: return ~std::uint64_t{0};
        case Op::Bot: return 0;
        case Op::Not: return ~skeleton_eval(f.arg(), ids, word);
        case Op::And: return skeleton_eval(f.lhs(), ids, word) & skeleton_eval(f.rhs(), ids, word);
        case Op::Or: return skeleton_eval(f.lhs(), ids, word) | skeleton_eval(f.rhs(), ids, word);
        case Op::Imp: return ~skeleton_eval(f.lhs(), ids, word) | skeleton_eval(f.rhs(), ids, word);
        case Op::Iff: return ~(skeleton_eval(f.lhs(), ids, word) ^ skeleton_eval(f.rhs(), ids, word));
        default: throw std::logic_error("unexpected operator in skeleton");
    }
}

}  // namespace detail

/// Truth-table check of the propositional skeleton; modal subformulas are
/// opaque atoms identified up to structural equality.
inline bool is_tautology(const Formula& f) {
    std::map<std::string, std::size_t> ids;
    detail::skeleton_leaves(f, ids);
    if (ids.size() > max_skeleton_atoms)
        throw AtomBudgetExceeded("propositional skeleton has " + std::to_string(ids.size()) + " atoms (limit " +
                                 std::to_string(max_skeleton_atoms) + ")");
    const std::size_t k = ids.size();
    const std::uint64_t words = k <= 6 ? 1 : std::uint64_t{1} << (k - 6);
    const std::uint64_t mask = k >= 6 ? ~std::uint64_t{0} : (std::uint64_t{1} << (std::uint64_t{1} << k)) - 1;
    for (std::uint64_t w = 0; w < words; ++w)
        if ((~detail::skeleton_eval(f, ids, w)) & mask) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Proofs

enum class SystemTag : std::uint8_t { Kplus, Kdot, Tdot, Bdot, K4dot, K5dot };

inline const char* to_string(SystemTag s) {
    switch (s) {
        case SystemTag::Kplus: return "Kplus";
        case SystemTag::Kdot: return "Kdot";
        case SystemTag::Tdot: return "Tdot";
        case SystemTag::Bdot: return "Bdot";
        case SystemTag::K4dot: return "K4dot";
        case SystemTag::K5dot: return "K5dot";
    }
    return "?";
}

inline SystemTag parse_system(std::string_view s) {
    for (auto t : {SystemTag::Kplus, SystemTag::Kdot, SystemTag::Tdot, SystemTag::Bdot, SystemTag::K4dot,
                   SystemTag::K5dot})
        if (s == to_string(t)) return t;
    throw std::invalid_argument("unknown proof system '" + std::string(s) + "'");
}

inline std::vector<std::string> system_axioms(SystemTag s) {
    if (s == SystemTag::Kplus) return {"CONplus", "DISplus"};
    std::vector<std::string> out{"AxTop", "EQUdot", "CONdot", "DISdot"};
    switch (s) {
        case SystemTag::Tdot: out.emplace_back("Tdot"); break;
        case SystemTag::Bdot: out.emplace_back("Bdot"); break;
        case SystemTag::K4dot: out.emplace_back("A4dot"); break;
        case SystemTag::K5dot: out.emplace_back("A5dot"); break;
        default: break;
    }
    return out;
}

/// Frame class each system is sound for.
inline PropertyTag soundness_class(SystemTag s) {
    switch (s) {
        case SystemTag::Tdot: return PropertyTag::reflexive;
        case SystemTag::Bdot: return PropertyTag::symmetric;
        case SystemTag::K4dot: return PropertyTag::qt;
        case SystemTag::K5dot: return PropertyTag::qe;
        default: return PropertyTag::all;
    }
}

inline Language system_language(SystemTag s) { return s == SystemTag::Kplus ? Language::Plus : Language::Dot; }

/// Theorems of `from` are theorems of `to`.
inline bool system_includes(SystemTag to, SystemTag from) {
    if (to == from) return true;
    return from == SystemTag::Kdot && to != SystemTag::Kplus;
}

struct ProofLine {
    int index = 0;
    std::string rule;  // PC, AX, MP, REdot, REplus, RNplus, HDISplus, THM
    std::string name;  // AX / THM argument
    std::vector<int> cites;
    Formula formula;
    int source_line = 0;
};

struct Proof {
    SystemTag system = SystemTag::Kdot;
    bool allow_hdis = false;
    std::vector<ProofLine> lines;
};

class ProofSyntaxError : public std::runtime_error {
public:
    ProofSyntaxError(int line, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    [[nodiscard]] int line() const { return line_; }

private:
    int line_;
};

inline Proof parse_proof(std::string_view text) {
    static const std::regex line_re(R"(^(\d+)\.\s*([A-Za-z]+)\s*([^:]*):(.*)$)");
    Proof p;
    bool have_system = false;
    int lineno = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++lineno;
        if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
        const std::string line = detail::trim(raw);
        if (line.empty()) continue;
        if (line.rfind("system:", 0) == 0) {
            if (have_system) throw ProofSyntaxError(lineno, "duplicate system header");
            try {
                p.system = parse_system(detail::trim(line.substr(7)));
            } catch (const std::invalid_argument& e) {
                throw ProofSyntaxError(lineno, e.what());
            }
            have_system = true;
            continue;
        }
        if (line.rfind("allow:", 0) == 0) {
            for (const auto& r : detail::split_ws(line.substr(6))) {
                if (r != "HDISplus") throw ProofSyntaxError(lineno, "only HDISplus can be enabled, got '" + r + "'");
                p.allow_hdis = true;
            }
            continue;
        }
        if (!have_system) throw ProofSyntaxError(lineno, "missing 'system:' header");
        std::smatch m;
        if (!std::regex_match(line, m, line_re))
            throw ProofSyntaxError(lineno, "expected '<n>. RULE args: formula'");
        ProofLine pl;
        pl.source_line = lineno;
        pl.index = std::stoi(m[1].str());
        pl.rule = m[2].str();
        const auto args = detail::split_ws(m[3].str());
        static const std::set<std::string> named{"AX", "THM"};
        static const std::map<std::string, std::size_t> arity{{"PC", 0},     {"MP", 2},     {"REdot", 1},
                                                               {"REplus", 1}, {"RNplus", 1}, {"HDISplus", 2}};
        if (named.count(pl.rule)) {
            if (args.size() != 1) throw ProofSyntaxError(lineno, pl.rule + " takes exactly one name");
            pl.name = args[0];
        } else if (auto it = arity.find(pl.rule); it != arity.end()) {
            if (args.size() != it->second)
                throw ProofSyntaxError(lineno, pl.rule + " cites exactly " + std::to_string(it->second) + " line(s)");
            for (const auto& a : args) {
                if (a.empty() || !std::all_of(a.begin(), a.end(), [](char c) { return std::isdigit(c); }))
                    throw ProofSyntaxError(lineno, "line citation '" + a + "' is not a number");
                pl.cites.push_back(std::stoi(a));
            }
        } else {
            throw ProofSyntaxError(lineno, "unknown rule '" + pl.rule + "'");
        }
        try {
            pl.formula = parse(m[4].str());
        } catch (const ParseError& e) {
            throw ProofSyntaxError(lineno, e.what());
        }
        p.lines.push_back(std::move(pl));
    }
    if (!have_system) throw ProofSyntaxError(lineno, "missing 'system:' header");
    if (p.lines.empty()) throw ProofSyntaxError(lineno, "proof has no lines");
    return p;
}

struct TheoremEntry {
    Formula formula;
    SystemTag system;
};

using Library = std::map<std::string, TheoremEntry>;

struct BadLine {
    int index;
    std::string reason;
};

struct ProofReport {
    bool ok = true;
    std::optional<BadLine> first_bad_line;
};

namespace detail {

inline std::optional<std::string> check_line(const Proof& p, std::size_t pos, const Library& lib) {
    const ProofLine& ln = p.lines[pos];
    if (pos > 0 && ln.index <= p.lines[pos - 1].index) return "line numbers must strictly increase";
    if (!fits(ln.formula, system_language(p.system)))
        return std::string("formula is outside ") + to_string(system_language(p.system));

    std::vector<const Formula*> prem;
    for (int c : ln.cites) {
        const Formula* found = nullptr;
        for (std::size_t k = 0; k < pos; ++k)
            if (p.lines[k].index == c) found = &p.lines[k].formula;
        if (!found) return "cites line " + std::to_string(c) + ", which is not an earlier line";
        prem.push_back(found);
    }
    const Formula& cur = ln.formula;
    const bool dot = p.system != SystemTag::Kplus;

    if (ln.rule == "PC") {
        if (!is_tautology(cur)) return "not a propositional tautology";
        return std::nullopt;
    }
    if (ln.rule == "AX") {
        const auto allowed = system_axioms(p.system);
        if (std::find(allowed.begin(), allowed.end(), ln.name) == allowed.end())
            return "axiom " + ln.name + " is not part of " + to_string(p.system);
        if (!match_schema(axiom_schema(ln.name), cur)) return "not an instance of " + ln.name;
        return std::nullopt;
    }
    if (ln.rule == "THM") {
        auto it = lib.find(ln.name);
        if (it == lib.end()) return "unknown theorem " + ln.name;
        if (!system_includes(p.system, it->second.system))
            return "theorem " + ln.name + " belongs to " + to_string(it->second.system);
        if (it->second.formula != cur) return "does not match theorem " + ln.name;
        return std::nullopt;
    }
    if (ln.rule == "MP") {
        const Formula& a = *prem[0];
        const Formula& b = *prem[1];
        if (b.op() != Op::Imp || b.lhs() != a || b.rhs() != cur)
            return "line " + std::to_string(ln.cites[1]) + " is not (line " + std::to_string(ln.cites[0]) +
                   " -> current)";
        return std::nullopt;
    }
    if (ln.rule == "REdot" || ln.rule == "REplus") {
        if ((ln.rule == "REdot") != dot) return ln.rule + " is not a rule of " + to_string(p.system);
        const Formula& a = *prem[0];
        if (a.op() != Op::Iff) return "premise is not a biconditional";
        auto wrap = [&](const Formula& x) { return dot ? Formula::boxdot(x) : Formula::boxplus(x); };
        if (cur != Formula::iff(wrap(a.lhs()), wrap(a.rhs()))) return "conclusion does not match " + ln.rule;
        return std::nullopt;
    }
    if (ln.rule == "RNplus") {
        if (dot) return "RNplus is not a rule of " + std::string(to_string(p.system));
        const Formula& a = *prem[0];
        if (cur != Formula::conj(Formula::boxplus(a), Formula::boxplus(Formula::neg(a))))
            return "conclusion does not match RNplus";
        return std::nullopt;
    }
    if (ln.rule == "HDISplus") {
        if (dot || !p.allow_hdis) return "HDISplus is not enabled";
        const Formula& a = *prem[0];
        const Formula& b = *prem[1];
        if (a.op() != Op::Imp || b.op() != Op::Imp || a.rhs() != b.lhs()) return "premises do not chain";
        const Formula want = Formula::imp(Formula::boxplus(a.rhs()),
                                          Formula::disj(Formula::boxplus(a.lhs()), Formula::boxplus(b.rhs())));
        if (cur != want) return "conclusion does not match HDISplus";
        return std::nullopt;
    }
    return "unknown rule " + ln.rule;
}

}  // namespace detail

inline ProofReport check_proof(const Proof& p, const Library& lib = {}) {
    for (std::size_t i = 0; i < p.lines.size(); ++i) {
        std::optional<std::string> err;
        try {
            err = detail::check_line(p, i, lib);
        } catch (const std::exception& e) {
            err = e.what();
        }
        if (err) return {false, BadLine{p.lines[i].index, *err}};
    }
    return {};
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct LibraryLoad {
    Library library;
    std::map<std::string, std::string> failures;  // stem -> reason
};

/// Checks every *.proof file in `dir`, admitting a proof once the theorems it
/// cites are available; the final line of each accepted proof is registered
/// under the file stem.
inline LibraryLoad load_library(const std::filesystem::path& dir) {
    LibraryLoad out;
    std::map<std::string, Proof> pending;
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".proof") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        try {
            pending.emplace(f.stem().string(), parse_proof(read_file(f)));
        } catch (const std::exception& e) {
            out.failures.emplace(f.stem().string(), e.what());
        }
    }
    for (bool progress = true; progress && !pending.empty();) {
        progress = false;
        for (auto it = pending.begin(); it != pending.end();) {
            bool ready = true;
            for (const auto& ln : it->second.lines)
                if (ln.rule == "THM" && !out.library.count(ln.name)) ready = false;
            if (!ready) {
                ++it;
                continue;
            }
            const ProofReport r = check_proof(it->second, out.library);
            if (r.ok)
                out.library.emplace(it->first, TheoremEntry{it->second.lines.back().formula, it->second.system});
            else
                out.failures.emplace(it->first, "line " + std::to_string(r.first_bad_line->index) + ": " +
                                                    r.first_bad_line->reason);
            it = pending.erase(it);
            progress = true;
        }
    }
    for (const auto& [stem, _] : pending) out.failures.emplace(stem, "cites unavailable or circular theorems");
    return out;
}

}  // namespace nck
