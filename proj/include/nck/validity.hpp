#pragma once

// Frame validity and countermodel search by exhaustive enumeration. A
// formula is evaluated on a frame for a whole block of valuations at once:
// each (subformula, world) pair holds one bit per valuation.
//
// Valuation index v encodes a valuation of the sorted variable list over
// worlds 0..n-1: bit (k*n + w) of v is the truth of variable k at world w.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "formula.hpp"
#include "kripke.hpp"

namespace nck {

struct SearchBudget {
    unsigned max_worlds = 3;
    unsigned max_vars = 2;
    std::uint64_t frame_cap = std::uint64_t{1} << 18;  // frames examined per world count
};

/// Parses "key=value" pairs separated by commas (keys: max_worlds, max_vars, frame_cap).
inline SearchBudget parse_budget(const std::string& spec, SearchBudget base = {}) {
    std::istringstream in(spec);
    for (std::string item; std::getline(in, item, ',');) {
        item = detail::trim(item);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("budget entry '" + item + "' lacks '='");
        const std::string key = detail::trim(std::string_view(item).substr(0, eq));
        const std::string val = detail::trim(std::string_view(item).substr(eq + 1));
        std::uint64_t v = 0;
        try {
            std::size_t used = 0;
            v = std::stoull(val, &used);
            if (used != val.size()) throw std::invalid_argument(val);
        } catch (const std::exception&) {
            throw std::invalid_argument("budget value for '" + key + "' is not a number: " + val);
        }
        if (v == 0) throw std::invalid_argument("budget value for '" + key + "' must be positive");
        if (key == "max_worlds")
            base.max_worlds = static_cast<unsigned>(v);
        else if (key == "max_vars")
            base.max_vars = static_cast<unsigned>(v);
        else if (key == "frame_cap")
            base.frame_cap = v;
        else
            throw std::invalid_argument("unknown budget key '" + key + "'");
    }
    return base;
}

/// Applies CK_BUDGET from the environment, if set.
inline SearchBudget budget_from_env(SearchBudget base = {}) {
    if (const char* env = std::getenv("CK_BUDGET")) return parse_budget(env, base);
    return base;
}

inline constexpr unsigned max_valuation_bits = 20;

class BudgetExceeded : public std::length_error {
public:
    using std::length_error::length_error;
};

namespace detail {

/// Formula flattened to postorder with shared subformulas evaluated once.
struct Compiled {
    struct Step {
        Op op;
        int index;  // modal index
        int a = -1;
        int b = -1;
        int var = -1;
    };
    std::vector<Step> steps;
    std::vector<std::string> vars;  // sorted
};

inline int compile_into(const Formula& f, Compiled& c, std::unordered_map<const Node*, int>& seen,
                        const std::map<std::string, int>& var_ids) {
    if (auto it = seen.find(f.node()); it != seen.end()) return it->second;
    Compiled::Step s{f.op(), f.is_modal() ? f.index() : 0};
    if (f.op() == Op::Meta) throw std::invalid_argument("cannot evaluate schema metavariable '" + f.name() + "'");
    if (f.op() == Op::Atom) s.var = var_ids.at(f.name());
    if (f.is_unary()) s.a = compile_into(f.arg(), c, seen, var_ids);
    if (f.is_binary()) {
        s.a = compile_into(f.lhs(), c, seen, var_ids);
        s.b = compile_into(f.rhs(), c, seen, var_ids);
    }
    c.steps.push_back(s);
    const int id = static_cast<int>(c.steps.size()) - 1;
    seen.emplace(f.node(), id);
    return id;
}

inline Compiled compile(const Formula& f) {
    Compiled c;
    std::map<std::string, int> ids;
    for (const auto& v : vars(f)) {
        ids.emplace(v, static_cast<int>(c.vars.size()));
        c.vars.push_back(v);
    }
    std::unordered_map<const Node*, int> seen;
    compile_into(f, c, seen, ids);
    return c;
}

inline constexpr unsigned chunk_bits_log2 = 12;  // 4096 valuations per block

/// Evaluates a compiled formula on one frame across all valuations, block by block.
class BlockEvaluator {
public:
    template <FrameLike F>
    BlockEvaluator(const Compiled& c, const F& f) : c_(c), n_(static_cast<unsigned>(f.size())) {
        const unsigned total_bits = static_cast<unsigned>(c.vars.size()) * n_;
        if (total_bits > max_valuation_bits)
            throw BudgetExceeded("valuation space 2^" + std::to_string(total_bits) + " exceeds 2^" +
                                 std::to_string(max_valuation_bits));
        total_log2_ = total_bits;
        block_log2_ = std::min(total_bits, chunk_bits_log2);
        words_ = block_log2_ >= 6 ? (std::size_t{1} << (block_log2_ - 6)) : 1;
        last_mask_ = block_log2_ >= 6 ? ~std::uint64_t{0} : ((std::uint64_t{1} << (std::uint64_t{1} << block_log2_)) - 1);
        for (int rel : {1, 2}) {
            succ_[rel - 1].resize(n_);
            for (std::size_t x = 0; x < n_; ++x)
                for (std::size_t y = 0; y < n_; ++y)
                    if (f.has(rel, x, y)) succ_[rel - 1][x].push_back(static_cast<unsigned>(y));
        }
        buf_.assign(c.steps.size() * n_ * words_, 0);
    }

    [[nodiscard]] std::uint64_t blocks() const { return std::uint64_t{1} << (total_log2_ - block_log2_); }
    [[nodiscard]] std::uint64_t block_size() const { return std::uint64_t{1} << block_log2_; }

    /// Least (valuation, world) in block `blk` where the root is false.
    std::optional<std::pair<std::uint64_t, unsigned>> first_failure(std::uint64_t blk) {
        run(blk);
        const std::size_t root = c_.steps.size() - 1;
        for (std::size_t wi = 0; wi < words_; ++wi) {
            std::uint64_t bad = 0;
            for (unsigned w = 0; w < n_; ++w) bad |= ~at(root, w)[wi];
            bad &= wi + 1 == words_ ? last_mask_ : ~std::uint64_t{0};
            if (!bad) continue;
            const unsigned bit = static_cast<unsigned>(std::countr_zero(bad));
            for (unsigned w = 0; w < n_; ++w)
                if (!((at(root, w)[wi] >> bit) & 1U))
                    return std::make_pair(blk * block_size() + wi * 64 + bit, w);
        }
        return std::nullopt;
    }

private:
    std::uint64_t* at(std::size_t step, unsigned w) { return buf_.data() + (step * n_ + w) * words_; }

    void fill_atom(std::uint64_t* out, unsigned bit, std::uint64_t blk) const {
        static constexpr std::uint64_t low[6] = {0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
                                                 0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
        for (std::size_t wi = 0; wi < words_; ++wi) {
            if (bit < 6)
                out[wi] = low[bit];
            else if (bit < block_log2_)
                out[wi] = ((wi >> (bit - 6)) & 1U) ? ~std::uint64_t{0} : 0;
            else
                out[wi] = ((blk >> (bit - block_log2_)) & 1U) ? ~std::uint64_t{0} : 0;
        }
    }

    void run(std::uint64_t blk) {
        const std::size_t W = words_;
        std::vector<std::uint64_t> all(W), none(W), all2(W), none2(W);
        for (std::size_t k = 0; k < c_.steps.size(); ++k) {
            const auto& s = c_.steps[k];
            for (unsigned w = 0; w < n_; ++w) {
                std::uint64_t* out = at(k, w);
                switch (s.op) {
                    case Op::Atom: fill_atom(out, static_cast<unsigned>(s.var) * n_ + w, blk); continue;
                    case Op::Top: std::fill(out, out + W, ~std::uint64_t{0}); continue;
                    case Op::Bot: std::fill(out, out + W, 0); continue;
                    case Op::Not: {
                        const std::uint64_t* a = at(s.a, w);
                        for (std::size_t i = 0; i < W; ++i) out[i] = ~a[i];
                        continue;
                    }
                    case Op::And:
                    case Op::Or:
                    case Op::Imp:
                    case Op::Iff: {
                        const std::uint64_t* a = at(s.a, w);
                        const std::uint64_t* b = at(s.b, w);
                        for (std::size_t i = 0; i < W; ++i) {
                            switch (s.op) {
                                case Op::And: out[i] = a[i] & b[i]; break;
                                case Op::Or: out[i] = a[i] | b[i]; break;
                                case Op::Imp: out[i] = ~a[i] | b[i]; break;
                                default: out[i] = ~(a[i] ^ b[i]); break;
                            }
                        }
                        continue;
                    }
                    default: break;
                }
                // Modal steps: "all" = child true at every successor, "none" = at none.
                auto gather = [&](int rel, std::vector<std::uint64_t>& al, std::vector<std::uint64_t>& no) {
                    std::fill(al.begin(), al.end(), ~std::uint64_t{0});
                    std::fill(no.begin(), no.end(), ~std::uint64_t{0});
                    for (unsigned t : succ_[rel - 1][w]) {
                        const std::uint64_t* c = at(s.a, t);
                        for (std::size_t i = 0; i < W; ++i) {
                            al[i] &= c[i];
                            no[i] &= ~c[i];
                        }
                    }
                };
                switch (s.op) {
                    case Op::Box:
                        gather(s.index, all, none);
                        std::copy(all.begin(), all.end(), out);
                        break;
                    case Op::Dia:
                        gather(s.index, all, none);
                        for (std::size_t i = 0; i < W; ++i) out[i] = ~none[i];
                        break;
                    case Op::Delta:
                        gather(s.index, all, none);
                        for (std::size_t i = 0; i < W; ++i) out[i] = all[i] | none[i];
                        break;
                    case Op::BoxPlus:
                        gather(1, all, none);
                        gather(2, all2, none2);
                        for (std::size_t i = 0; i < W; ++i) out[i] = all[i] | none2[i];
                        break;
                    case Op::BoxDot:
                        gather(1, all, none);
                        gather(2, all2, none2);
                        for (std::size_t i = 0; i < W; ++i) out[i] = (all[i] | none2[i]) & (none[i] | all2[i]);
                        break;
                    default: throw std::logic_error("unexpected operator in block evaluator");
                }
            }
        }
    }

    const Compiled& c_;
    unsigned n_;
    unsigned total_log2_ = 0;
    unsigned block_log2_ = 0;
    std::size_t words_ = 1;
    std::uint64_t last_mask_ = ~std::uint64_t{0};
    std::vector<std::vector<unsigned>> succ_[2];
    std::vector<std::uint64_t> buf_;
};

}  // namespace detail

/// Builds the model for valuation index `v` on frame `f` over `vars` (sorted), pointed at `w`.
template <FrameLike F>
Model model_from_valuation(const F& f, const std::vector<std::string>& var_list, std::uint64_t v, std::size_t w,
                           const std::vector<std::string>* names = nullptr) {
    Model m;
    const std::size_t n = f.size();
    for (std::size_t x = 0; x < n; ++x) m.add_world(names ? (*names)[x] : enumerated_world_name(x));
    for (int rel : {1, 2})
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y)
                if (f.has(rel, x, y)) m.add_edge(rel, x, y);
    for (std::size_t k = 0; k < var_list.size(); ++k) {
        m.declare(var_list[k]);
        for (std::size_t x = 0; x < n; ++x)
            if ((v >> (k * n + x)) & 1U) m.set_true(var_list[k], x);
    }
    m.point = w;
    return m;
}

struct FrameValidity {
    bool valid = true;
    /// Least failing (valuation, world), as a pointed model over the frame's world names.
    std::optional<Model> counter;
};

/// Validity of φ on a frame under every valuation of vars(φ).
inline FrameValidity valid_on_frame(const Frame& f, const Formula& phi) {
    const detail::Compiled c = detail::compile(phi);
    detail::BlockEvaluator ev(c, f);
    for (std::uint64_t b = 0; b < ev.blocks(); ++b)
        if (auto bad = ev.first_failure(b))
            return {false, model_from_valuation(f, c.vars, bad->first, bad->second, &f.names())};
    return {};
}

enum class SearchOutcome { Refuted, ValidWithinBudget, Inconclusive };

inline const char* to_string(SearchOutcome o) {
    switch (o) {
        case SearchOutcome::Refuted: return "refuted";
        case SearchOutcome::ValidWithinBudget: return "valid within budget";
        case SearchOutcome::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct SearchResult {
    SearchOutcome outcome = SearchOutcome::ValidWithinBudget;
    std::optional<Model> countermodel;  // pointed
    std::uint64_t frames_examined = 0;
    unsigned worlds_exhausted = 0;  // largest n whose frames were all examined
    std::string note;
};

/// First pointed model, in (world count, frame, valuation, world) order,
/// on a frame of class `tag` where φ is false.
inline SearchResult countermodel_search(const Formula& phi, PropertyTag tag, const SearchBudget& budget = {}) {
    SearchResult r;
    const detail::Compiled c = detail::compile(phi);
    if (c.vars.size() > budget.max_vars) {
        r.outcome = SearchOutcome::Inconclusive;
        r.note = std::to_string(c.vars.size()) + " variables exceed max_vars=" + std::to_string(budget.max_vars);
        return r;
    }
    for (unsigned n = 1; n <= budget.max_worlds; ++n) {
        if (n > max_enumeration_cap || c.vars.size() * n > max_valuation_bits) {
            r.outcome = SearchOutcome::Inconclusive;
            r.note = "frames with " + std::to_string(n) + " worlds are beyond the enumeration limits";
            return r;
        }
        FrameEnumerator en(n, tag, std::max(n, default_enumeration_cap));
        std::uint64_t seen = 0;
        while (auto f = en.next()) {
            if (seen == budget.frame_cap) {
                r.outcome = SearchOutcome::Inconclusive;
                r.note = "frame_cap=" + std::to_string(budget.frame_cap) + " reached at " + std::to_string(n) +
                         " worlds";
                return r;
            }
            ++seen;
            ++r.frames_examined;
            detail::BlockEvaluator ev(c, *f);
            for (std::uint64_t b = 0; b < ev.blocks(); ++b)
                if (auto bad = ev.first_failure(b)) {
                    r.outcome = SearchOutcome::Refuted;
                    r.countermodel = model_from_valuation(*f, c.vars, bad->first, bad->second);
                    return r;
                }
        }
        r.worlds_exhausted = n;
    }
    return r;
}

/// Pointed model of class `tag` satisfying every formula of Γ and refuting φ.
inline SearchResult consequence_check(const std::vector<Formula>& gamma, const Formula& phi, PropertyTag tag,
                                      const SearchBudget& budget = {}) {
    std::optional<Formula> premises;
    for (const auto& g : gamma) premises = premises ? Formula::conj(*premises, g) : g;
    return countermodel_search(premises ? Formula::imp(*premises, phi) : phi, tag, budget);
}

}  // namespace nck
