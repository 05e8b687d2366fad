#pragma once

// Formula AST for the bimodal noncontingency languages, with a
// recursive-descent parser and a canonical, re-parseable printer.
//
// Surface syntax (ASCII):
//   ~ & | -> <->          Boolean connectives (-> is right-associative)
//   [.]  [+]              generalized / pseudo noncontingency
//   [1] [2] <1> <2>       box / diamond over R1, R2
//   D1 D2                 noncontingency over R1 alone / R2 alone
//   true false            constants
// '#' starts a comment that runs to the end of the line.

#include <cctype>
#include <cstdint>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nck {

enum class Op : std::uint8_t {
    Atom,
    Top,
    Bot,
    Not,
    And,
    Or,
    Imp,
    Iff,
    BoxDot,
    BoxPlus,
    Box,
    Dia,
    Delta,
    Meta,  // schema metavariable; only produced by parse_pattern
};

enum class Language : std::uint8_t { Prop, Dot, Plus, Full };

inline const char* to_string(Language l) {
    switch (l) {
        case Language::Prop: return "Lprop";
        case Language::Dot: return "Ldot";
        case Language::Plus: return "Lplus";
        case Language::Full: return "Lfull";
    }
    return "?";
}

struct Node;

class Formula {
public:
    Formula() = default;

    static Formula atom(std::string name);
    static Formula meta(std::string name);
    static Formula top();
    static Formula bot();
    static Formula neg(Formula f);
    static Formula conj(Formula a, Formula b);
    static Formula disj(Formula a, Formula b);
    static Formula imp(Formula a, Formula b);
    static Formula iff(Formula a, Formula b);
    static Formula boxdot(Formula f);
    static Formula boxplus(Formula f);
    static Formula box(int index, Formula f);
    static Formula dia(int index, Formula f);
    static Formula delta(int index, Formula f);

    [[nodiscard]] bool empty() const { return node_ == nullptr; }
    [[nodiscard]] Op op() const;
    [[nodiscard]] const std::string& name() const;
    [[nodiscard]] int index() const;
    /// Single operand of a unary node, or left operand of a binary one.
    [[nodiscard]] const Formula& arg() const;
    [[nodiscard]] const Formula& lhs() const { return arg(); }
    [[nodiscard]] const Formula& rhs() const;
    [[nodiscard]] const Node* node() const { return node_.get(); }

    [[nodiscard]] bool is_unary() const;
    [[nodiscard]] bool is_binary() const;
    [[nodiscard]] bool is_modal() const;

    friend bool operator==(const Formula& a, const Formula& b);
    friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

private:
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Formula make(Op op, std::string name, int index, Formula a, Formula b);

    std::shared_ptr<const Node> node_;
};

struct Node {
    Op op;
    std::string name;  // Atom / Meta
    int index = 0;     // Box / Dia / Delta: 1 or 2
    Formula a;
    Formula b;
};

inline Formula Formula::make(Op op, std::string name, int index, Formula a, Formula b) {
    return Formula(std::make_shared<const Node>(Node{op, std::move(name), index, std::move(a), std::move(b)}));
}

inline Formula Formula::atom(std::string name) { return make(Op::Atom, std::move(name), 0, {}, {}); }
inline Formula Formula::meta(std::string name) { return make(Op::Meta, std::move(name), 0, {}, {}); }
inline Formula Formula::top() { return make(Op::Top, {}, 0, {}, {}); }
inline Formula Formula::bot() { return make(Op::Bot, {}, 0, {}, {}); }
inline Formula Formula::neg(Formula f) { return make(Op::Not, {}, 0, std::move(f), {}); }
inline Formula Formula::conj(Formula a, Formula b) { return make(Op::And, {}, 0, std::move(a), std::move(b)); }
inline Formula Formula::disj(Formula a, Formula b) { return make(Op::Or, {}, 0, std::move(a), std::move(b)); }
inline Formula Formula::imp(Formula a, Formula b) { return make(Op::Imp, {}, 0, std::move(a), std::move(b)); }
inline Formula Formula::iff(Formula a, Formula b) { return make(Op::Iff, {}, 0, std::move(a), std::move(b)); }
inline Formula Formula::boxdot(Formula f) { return make(Op::BoxDot, {}, 0, std::move(f), {}); }
inline Formula Formula::boxplus(Formula f) { return make(Op::BoxPlus, {}, 0, std::move(f), {}); }

inline Formula Formula::box(int index, Formula f) {
    if (index != 1 && index != 2) throw std::invalid_argument("modal index must be 1 or 2");
    return make(Op::Box, {}, index, std::move(f), {});
}
inline Formula Formula::dia(int index, Formula f) {
    if (index != 1 && index != 2) throw std::invalid_argument("modal index must be 1 or 2");
    return make(Op::Dia, {}, index, std::move(f), {});
}
inline Formula Formula::delta(int index, Formula f) {
    if (index != 1 && index != 2) throw std::invalid_argument("modal index must be 1 or 2");
    return make(Op::Delta, {}, index, std::move(f), {});
}

inline Op Formula::op() const { return node_->op; }
inline const std::string& Formula::name() const { return node_->name; }
inline int Formula::index() const { return node_->index; }
inline const Formula& Formula::arg() const { return node_->a; }
inline const Formula& Formula::rhs() const { return node_->b; }

inline bool Formula::is_unary() const {
    switch (op()) {
        case Op::Not:
        case Op::BoxDot:
        case Op::BoxPlus:
        case Op::Box:
        case Op::Dia:
        case Op::Delta: return true;
        default: return false;
    }
}

inline bool Formula::is_binary() const {
    switch (op()) {
        case Op::And:
        case Op::Or:
        case Op::Imp:
        case Op::Iff: return true;
        default: return false;
    }
}

inline bool Formula::is_modal() const { return is_unary() && op() != Op::Not; }

inline bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    const Node& x = *a.node_;
    const Node& y = *b.node_;
    if (x.op != y.op || x.index != y.index || x.name != y.name) return false;
    return x.a == y.a && x.b == y.b;
}

// ---------------------------------------------------------------------------
// Parsing

class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, std::vector<std::string> expected, std::string found)
        : std::runtime_error(compose(line, column, expected, found)),
          line_(line),
          column_(column),
          expected_(std::move(expected)),
          found_(std::move(found)) {}

    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] int column() const { return column_; }
    [[nodiscard]] const std::vector<std::string>& expected() const { return expected_; }
    [[nodiscard]] const std::string& found() const { return found_; }

private:
    static std::string compose(int line, int column, const std::vector<std::string>& expected,
                               const std::string& found) {
        std::ostringstream os;
        os << "syntax error at line " << line << ", column " << column << ": expected ";
        if (expected.size() > 1) os << "one of ";
        for (std::size_t i = 0; i < expected.size(); ++i) os << (i ? ", " : "") << expected[i];
        os << " but found " << found;
        return os.str();
    }

    int line_;
    int column_;
    std::vector<std::string> expected_;
    std::string found_;
};

namespace detail {

enum class Tok : std::uint8_t {
    End,
    Ident,
    Meta,
    True,
    False,
    LParen,
    RParen,
    Not,
    And,
    Or,
    Imp,
    Iff,
    BoxDot,
    BoxPlus,
    Box1,
    Box2,
    Dia1,
    Dia2,
    Delta1,
    Delta2,
};

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
};

inline std::string describe(const Token& t) {
    if (t.kind == Tok::End) return "end of input";
    return "'" + t.text + "'";
}

class Lexer {
public:
    Lexer(std::string_view src, bool metavars) : src_(src), metavars_(metavars) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_blank();
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, "", line_, col_});
                return out;
            }
            out.push_back(next());
        }
    }

private:
    void skip_blank() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance(1);
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance(1);
            } else {
                break;
            }
        }
    }

    void advance(std::size_t n) {
        for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
            if (src_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
    }

    bool starts(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

    Token next() {
        static constexpr std::pair<std::string_view, Tok> fixed[] = {
            {"<->", Tok::Iff},     {"->", Tok::Imp},      {"[.]", Tok::BoxDot}, {"[+]", Tok::BoxPlus},
            {"[1]", Tok::Box1},    {"[2]", Tok::Box2},    {"<1>", Tok::Dia1},   {"<2>", Tok::Dia2},
            {"D1", Tok::Delta1},   {"D2", Tok::Delta2},   {"~", Tok::Not},      {"&", Tok::And},
            {"|", Tok::Or},        {"(", Tok::LParen},    {")", Tok::RParen},
        };
        const int line = line_;
        const int col = col_;
        for (const auto& [text, kind] : fixed) {
            if (starts(text)) {
                advance(text.size());
                return {kind, std::string(text), line, col};
            }
        }
        const char c = src_[pos_];
        if (std::islower(static_cast<unsigned char>(c))) {
            std::size_t end = pos_ + 1;
            while (end < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
                ++end;
            std::string word(src_.substr(pos_, end - pos_));
            advance(end - pos_);
            if (word == "true") return {Tok::True, word, line, col};
            if (word == "false") return {Tok::False, word, line, col};
            return {Tok::Ident, word, line, col};
        }
        if (metavars_ && std::isupper(static_cast<unsigned char>(c))) {
            advance(1);
            return {Tok::Meta, std::string(1, c), line, col};
        }
        std::string bad(1, c);
        throw ParseError(line, col, {"formula"}, "'" + bad + "'");
    }

    std::string_view src_;
    bool metavars_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Formula parse_all() {
        Formula f = parse_iff();
        if (peek().kind != Tok::End) fail(binary_ops({"end of input"}));
        return f;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    Token take() { return toks_[pos_++]; }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        const Token& t = peek();
        throw ParseError(t.line, t.column, std::move(expected), describe(t));
    }

    static std::vector<std::string> binary_ops(std::vector<std::string> extra) {
        std::vector<std::string> e{"'&'", "'|'", "'->'", "'<->'"};
        e.insert(e.end(), extra.begin(), extra.end());
        return e;
    }

    Formula parse_iff() {
        Formula f = parse_imp();
        while (peek().kind == Tok::Iff) {
            take();
            f = Formula::iff(std::move(f), parse_imp());
        }
        return f;
    }

    Formula parse_imp() {
        Formula f = parse_or();
        if (peek().kind == Tok::Imp) {
            take();
            return Formula::imp(std::move(f), parse_imp());
        }
        return f;
    }

    Formula parse_or() {
        Formula f = parse_and();
        while (peek().kind == Tok::Or) {
            take();
            f = Formula::disj(std::move(f), parse_and());
        }
        return f;
    }

    Formula parse_and() {
        Formula f = parse_unary();
        while (peek().kind == Tok::And) {
            take();
            f = Formula::conj(std::move(f), parse_unary());
        }
        return f;
    }

    Formula parse_unary() {
        switch (peek().kind) {
            case Tok::Not: take(); return Formula::neg(parse_unary());
            case Tok::BoxDot: take(); return Formula::boxdot(parse_unary());
            case Tok::BoxPlus: take(); return Formula::boxplus(parse_unary());
            case Tok::Box1: take(); return Formula::box(1, parse_unary());
            case Tok::Box2: take(); return Formula::box(2, parse_unary());
            case Tok::Dia1: take(); return Formula::dia(1, parse_unary());
            case Tok::Dia2: take(); return Formula::dia(2, parse_unary());
            case Tok::Delta1: take(); return Formula::delta(1, parse_unary());
            case Tok::Delta2: take(); return Formula::delta(2, parse_unary());
            default: return parse_atom();
        }
    }

    Formula parse_atom() {
        switch (peek().kind) {
            case Tok::True: take(); return Formula::top();
            case Tok::False: take(); return Formula::bot();
            case Tok::Ident: return Formula::atom(take().text);
            case Tok::Meta: return Formula::meta(take().text);
            case Tok::LParen: {
                take();
                Formula f = parse_iff();
                if (peek().kind != Tok::RParen) fail(binary_ops({"')'"}));
                take();
                return f;
            }
            default:
                fail({"'~'", "'[.]'", "'[+]'", "'[1]'", "'[2]'", "'<1>'", "'<2>'", "'D1'", "'D2'", "'true'",
                      "'false'", "identifier", "'('"});
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Formula parse(std::string_view text) {
    return detail::Parser(detail::Lexer(text, false).run()).parse_all();
}

/// Parses a schema pattern: single uppercase letters (other than the D1/D2
/// operators) are metavariables.
inline Formula parse_pattern(std::string_view text) {
    return detail::Parser(detail::Lexer(text, true).run()).parse_all();
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline int precedence(Op op) {
    switch (op) {
        case Op::Iff: return 1;
        case Op::Imp: return 2;
        case Op::Or: return 3;
        case Op::And: return 4;
        case Op::Not:
        case Op::BoxDot:
        case Op::BoxPlus:
        case Op::Box:
        case Op::Dia:
        case Op::Delta: return 5;
        default: return 6;
    }
}

inline void print_to(std::string& out, const Formula& f);

inline void print_child(std::string& out, const Formula& child, bool paren) {
    if (paren) out += '(';
    print_to(out, child);
    if (paren) out += ')';
}

inline void print_to(std::string& out, const Formula& f) {
    switch (f.op()) {
        case Op::Atom:
        case Op::Meta: out += f.name(); return;
        case Op::Top: out += "true"; return;
        case Op::Bot: out += "false"; return;
        case Op::Not: out += "~"; break;
        case Op::BoxDot: out += "[.]"; break;
        case Op::BoxPlus: out += "[+]"; break;
        case Op::Box: out += f.index() == 1 ? "[1]" : "[2]"; break;
        case Op::Dia: out += f.index() == 1 ? "<1>" : "<2>"; break;
        case Op::Delta: out += f.index() == 1 ? "D1 " : "D2 "; break;
        default: {
            const int p = precedence(f.op());
            const int pl = precedence(f.lhs().op());
            const int pr = precedence(f.rhs().op());
            // -> associates to the right, everything else to the left.
            const bool right_assoc = f.op() == Op::Imp;
            print_child(out, f.lhs(), pl < p || (pl == p && right_assoc));
            switch (f.op()) {
                case Op::And: out += " & "; break;
                case Op::Or: out += " | "; break;
                case Op::Imp: out += " -> "; break;
                default: out += " <-> "; break;
            }
            print_child(out, f.rhs(), pr < p || (pr == p && !right_assoc));
            return;
        }
    }
    // unary prefix: operand needs parentheses unless it is itself unary or atomic
    print_child(out, f.arg(), precedence(f.arg().op()) < 5);
}

}  // namespace detail

inline std::string print(const Formula& f) {
    std::string out;
    detail::print_to(out, f);
    return out;
}

inline std::ostream& operator<<(std::ostream& os, const Formula& f) { return os << print(f); }

// ---------------------------------------------------------------------------
// Classification

namespace detail {
inline void collect_ops(const Formula& f, bool& dot, bool& plus, bool& other) {
    switch (f.op()) {
        case Op::BoxDot: dot = true; break;
        case Op::BoxPlus: plus = true; break;
        case Op::Box:
        case Op::Dia:
        case Op::Delta: other = true; break;
        default: break;
    }
    if (f.is_unary()) collect_ops(f.arg(), dot, plus, other);
    if (f.is_binary()) {
        collect_ops(f.lhs(), dot, plus, other);
        collect_ops(f.rhs(), dot, plus, other);
    }
}
}  // namespace detail

/// Smallest language tag admitting f.
inline Language language_of(const Formula& f) {
    bool dot = false, plus = false, other = false;
    detail::collect_ops(f, dot, plus, other);
    if (other || (dot && plus)) return Language::Full;
    if (dot) return Language::Dot;
    if (plus) return Language::Plus;
    return Language::Prop;
}

/// True when `f` is expressible in `lang` (propositional formulas fit every language).
inline bool fits(const Formula& f, Language lang) {
    const Language l = language_of(f);
    return l == Language::Prop || l == lang || lang == Language::Full;
}

namespace detail {
inline void collect_vars(const Formula& f, std::set<std::string>& out, bool metas) {
    if (f.op() == Op::Atom && !metas) out.insert(f.name());
    if (f.op() == Op::Meta && metas) out.insert(f.name());
    if (f.is_unary()) collect_vars(f.arg(), out, metas);
    if (f.is_binary()) {
        collect_vars(f.lhs(), out, metas);
        collect_vars(f.rhs(), out, metas);
    }
}
}  // namespace detail

inline std::set<std::string> vars(const Formula& f) {
    std::set<std::string> out;
    detail::collect_vars(f, out, false);
    return out;
}

inline std::set<std::string> metavars(const Formula& f) {
    std::set<std::string> out;
    detail::collect_vars(f, out, true);
    return out;
}

inline int modal_depth(const Formula& f) {
    if (f.is_binary()) return std::max(modal_depth(f.lhs()), modal_depth(f.rhs()));
    if (f.is_unary()) return modal_depth(f.arg()) + (f.is_modal() ? 1 : 0);
    return 0;
}

inline std::size_t size(const Formula& f) {
    if (f.is_binary()) return 1 + size(f.lhs()) + size(f.rhs());
    if (f.is_unary()) return 1 + size(f.arg());
    return 1;
}

/// Rewrites every [.]g as [+]t(g) & [+]~t(g). Only accepts formulas of Ldot.
inline Formula translate_dot_to_plus(const Formula& f) {
    const Language l = language_of(f);
    if (l != Language::Prop && l != Language::Dot)
        throw std::invalid_argument("translate_dot_to_plus: formula is not in Ldot: " + print(f));
    switch (f.op()) {
        case Op::Not: return Formula::neg(translate_dot_to_plus(f.arg()));
        case Op::And: return Formula::conj(translate_dot_to_plus(f.lhs()), translate_dot_to_plus(f.rhs()));
        case Op::Or: return Formula::disj(translate_dot_to_plus(f.lhs()), translate_dot_to_plus(f.rhs()));
        case Op::Imp: return Formula::imp(translate_dot_to_plus(f.lhs()), translate_dot_to_plus(f.rhs()));
        case Op::Iff: return Formula::iff(translate_dot_to_plus(f.lhs()), translate_dot_to_plus(f.rhs()));
        case Op::BoxDot: {
            Formula t = translate_dot_to_plus(f.arg());
            return Formula::conj(Formula::boxplus(t), Formula::boxplus(Formula::neg(t)));
        }
        default: return f;
    }
}

}  // namespace nck
