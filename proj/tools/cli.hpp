#pragma once

// Command-line front end. run() is the whole program minus process setup,
// so it can be driven in-process by tests.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nck/nck.hpp"

namespace nck::cli {

enum Exit : int { holds = 0, refuted = 1, inconclusive = 2, usage = 64 };

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string slurp(const std::string& path) {
    if (!std::filesystem::is_regular_file(path)) throw UsageError("cannot read file '" + path + "'");
    return read_file(path);
}

inline Model load_model(const std::string& path) {
    try {
        return parse_model(slurp(path));
    } catch (const ModelError& e) {
        throw UsageError(path + ": " + e.what());
    }
}

inline Formula load_formula(const std::string& text) {
    try {
        return parse(text);
    } catch (const ParseError& e) {
        throw UsageError(e.what());
    }
}

inline std::size_t world_arg(const Model& m, const std::string& name, const char* flag) {
    if (name.empty()) {
        if (m.point) return *m.point;
        throw UsageError(std::string("no world given: pass ") + flag + " or add a 'point:' line");
    }
    auto w = m.find(name);
    if (!w) throw UsageError("unknown world '" + name + "'");
    return *w;
}

inline Language lang_arg(const std::string& s) {
    if (s == "dot") return Language::Dot;
    if (s == "plus") return Language::Plus;
    if (s == "full") return Language::Full;
    throw UsageError("--lang must be dot, plus or full");
}

inline std::set<std::string> vars_arg(const std::string& csv) {
    std::set<std::string> out;
    std::istringstream in(csv);
    for (std::string v; std::getline(in, v, ',');) {
        v = nck::detail::trim(v);
        if (!v.empty()) out.insert(v);
    }
    return out;
}

inline PropertyTag tag_arg(const std::string& s) {
    try {
        return parse_property_tag(s);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

inline json witness_json(const Frame& f, const PropertyResult& r) {
    json w = json::array();
    for (auto x : r.witness) w.push_back(f.name(x));
    return w;
}

inline std::string witness_text(const Frame& f, const PropertyResult& r) {
    std::string s = "(";
    for (std::size_t i = 0; i < r.witness.size(); ++i) s += (i ? ", " : "") + f.name(r.witness[i]);
    s += ")";
    if (r.i) s += " i=" + std::to_string(r.i);
    if (r.j) s += " j=" + std::to_string(r.j);
    return s;
}

inline json violation_json(const Violation& v) {
    return json{{"condition", v.condition}, {"witness", v.witness}, {"detail", v.detail}};
}

struct Context {
    std::ostream& out;
    bool as_json = false;
};

inline int cmd_parse(Context& c, const std::string& text) {
    const Formula f = load_formula(text);
    const auto var_set = vars(f);
    std::vector<std::string> vs(var_set.begin(), var_set.end());
    if (c.as_json) {
        c.out << json{{"verdict", "ok"},
                      {"formula", print(f)},
                      {"language", to_string(language_of(f))},
                      {"vars", vs},
                      {"depth", modal_depth(f)}}
                     .dump()
              << '\n';
        return holds;
    }
    c.out << print(f) << '\n' << "language: " << to_string(language_of(f)) << '\n' << "vars:";
    for (const auto& v : vs) c.out << ' ' << v;
    c.out << '\n' << "depth: " << modal_depth(f) << '\n';
    return holds;
}

inline int cmd_mc(Context& c, const std::string& model, const std::string& at, const std::string& text) {
    const Model m = load_model(model);
    const std::size_t w = world_arg(m, at, "--at");
    const Formula f = load_formula(text);
    const bool v = satisfies(m, w, f);
    if (c.as_json)
        c.out << json{{"verdict", v ? "true" : "false"}, {"world", m.name(w)}, {"formula", print(f)}}.dump() << '\n';
    else
        c.out << (v ? "true" : "false") << '\n';
    return v ? holds : refuted;
}

inline int cmd_equiv(Context& c, const std::string& m1, const std::string& at1, const std::string& m2,
                     const std::string& at2, const std::string& lang_s, const std::string& vars_s) {
    const Model a = load_model(m1), b = load_model(m2);
    const PointedModel pa{a, world_arg(a, at1, "--at1")}, pb{b, world_arg(b, at2, "--at2")};
    const Language lang = lang_arg(lang_s);
    std::set<std::string> vs = vars_s.empty() ? a.declared() : vars_arg(vars_s);
    if (vars_s.empty())
        for (const auto& v : b.declared()) vs.insert(v);
    EquivalenceResult r;
    std::optional<Formula> f;
    try {
        r = equivalent(pa, pb, lang, vs);
        if (!r.equivalent) f = distinguishing_formula(pa, pb, lang, vs);
    } catch (const ClassCapExceeded& e) {
        if (c.as_json)
            c.out << json{{"verdict", "inconclusive"}, {"reason", e.what()}}.dump() << '\n';
        else
            c.out << "inconclusive: " << e.what() << '\n';
        return inconclusive;
    }
    if (c.as_json) {
        json j{{"verdict", r.equivalent ? "equivalent" : "inequivalent"}, {"language", to_string(lang)}};
        if (r.equivalent) j["steps"] = r.steps;
        if (r.separation_depth) j["separation_depth"] = *r.separation_depth;
        if (f) j["formula"] = print(*f);
        c.out << j.dump() << '\n';
    } else if (r.equivalent) {
        c.out << "equivalent in " << to_string(lang) << " (fixpoint after " << r.steps << " refinement steps)\n";
    } else {
        c.out << "inequivalent in " << to_string(lang) << ": separated at depth " << *r.separation_depth << " via "
              << print(*f) << " (true at " << a.name(pa.point) << ", false at " << b.name(pb.point) << ")\n";
    }
    return r.equivalent ? holds : refuted;
}

inline int cmd_morphism(Context& c, const std::string& m1, const std::string& m2, const std::string& map_path,
                        bool frame, const std::string& vars_s) {
    const Model a = load_model(m1), b = load_model(m2);
    WorldMap f;
    try {
        f = parse_map(slurp(map_path), a, b);
    } catch (const ModelError& e) {
        throw UsageError(map_path + ": " + e.what());
    }
    MorphismReport r;
    if (frame) {
        r = check_frame_morphism(a, b, f);
    } else if (vars_s.empty()) {
        r = check_model_morphism(a, b, f);
    } else {
        r = check_model_morphism(a, b, f, vars_arg(vars_s));
    }
    if (c.as_json) {
        json v = json::array();
        for (const auto& x : r.violations) v.push_back(violation_json(x));
        json j{{"verdict", r.morphism() ? "morphism" : "not a morphism"},
               {"forth", r.forth_ok},
               {"back", r.back_ok},
               {"surjective", r.surjective},
               {"violations", v}};
        if (!frame) j["var"] = r.var_ok;
        c.out << j.dump() << '\n';
    } else {
        auto line = [&](const char* name, bool ok) {
            c.out << name << ": " << (ok ? "ok" : "violated");
            for (const auto& v : r.violations)
                if (v.condition == name) c.out << ", " << describe(v);
            c.out << '\n';
        };
        if (!frame) line("Var", r.var_ok);
        line("Forth", r.forth_ok);
        line("Back", r.back_ok);
        c.out << "surjective: " << (r.surjective ? "yes" : "no") << '\n';
        c.out << (frame ? "frame " : "") << "⊡-morphism: " << (r.morphism() ? "yes" : "no") << '\n';
    }
    return r.morphism() ? holds : refuted;
}

inline int cmd_transform(Context& c, const std::string& kind, const std::string& model) {
    const Model m = load_model(model);
    TransformResult r;
    try {
        if (kind == "serialize")
            r = serialize(m);
        else if (kind == "symmetrize")
            r = symmetrize(m);
        else if (kind == "reflexive-closure")
            r = reflexive_closure(m);
        else if (kind == "reflexivize-endpoints")
            r = reflexivize_endpoints(m);
        else
            throw UsageError("unknown transform '" + kind + "'");
    } catch (const NotQuasiSymmetric& e) {
        if (c.as_json)
            c.out << json{{"verdict", "rejected"}, {"reason", e.what()}, {"witness", e.witness()}}.dump() << '\n';
        else
            c.out << "rejected: " << e.what() << '\n';
        return refuted;
    }
    if (c.as_json) {
        json v = json::array();
        for (const auto& x : r.report.violations) v.push_back(violation_json(x));
        c.out << json{{"verdict", "ok"},
                      {"model", print_model(r.output)},
                      {"map", print_map(r.map, r.output, m)},
                      {"map_is_morphism", r.report.morphism()},
                      {"map_is_surjective", r.report.surjective},
                      {"violations", v}}
                     .dump()
              << '\n';
        return holds;
    }
    c.out << "# map to input: " << (r.report.morphism() ? "⊡-morphism" : "not a ⊡-morphism") << ", "
          << (r.report.surjective ? "surjective" : "not surjective") << '\n';
    c.out << print_model(r.output) << "---\n" << print_map(r.map, r.output, m);
    return holds;
}

inline int cmd_props(Context& c, const std::string& model) {
    const Model m = load_model(model);
    json j = json::object();
    for (auto t : all_property_tags) {
        if (t == PropertyTag::all) continue;
        const PropertyResult r = check_property(m, t);
        if (c.as_json) {
            json e{{"holds", r.holds}};
            if (!r.holds) e["witness"] = witness_json(m, r);
            j[to_string(t)] = e;
        } else {
            c.out << to_string(t) << ": " << (r.holds ? "holds" : "fails " + witness_text(m, r)) << '\n';
        }
    }
    if (c.as_json) c.out << json{{"verdict", "ok"}, {"properties", j}}.dump() << '\n';
    return holds;
}

inline int search_exit(const SearchResult& r) {
    switch (r.outcome) {
        case SearchOutcome::Refuted: return refuted;
        case SearchOutcome::ValidWithinBudget: return holds;
        case SearchOutcome::Inconclusive: return inconclusive;
    }
    return inconclusive;
}

inline json search_json(const SearchResult& r) {
    json j{{"verdict", to_string(r.outcome)}, {"frames_examined", r.frames_examined},
           {"worlds_exhausted", r.worlds_exhausted}};
    if (r.countermodel) j["countermodel"] = print_model(*r.countermodel);
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

inline SearchBudget budget_args(int max_worlds, int max_vars) {
    SearchBudget b;
    try {
        b = budget_from_env();
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("CK_BUDGET: ") + e.what());
    }
    if (max_worlds > 0) b.max_worlds = static_cast<unsigned>(max_worlds);
    if (max_vars > 0) b.max_vars = static_cast<unsigned>(max_vars);
    return b;
}

inline int cmd_valid(Context& c, const std::string& text, const std::string& cls, int max_worlds, int max_vars,
                     bool counter_mode) {
    const Formula f = load_formula(text);
    const PropertyTag tag = tag_arg(cls);
    const SearchResult r = countermodel_search(f, tag, budget_args(max_worlds, max_vars));
    if (c.as_json) {
        c.out << search_json(r).dump() << '\n';
        return search_exit(r);
    }
    switch (r.outcome) {
        case SearchOutcome::ValidWithinBudget:
            if (counter_mode)
                c.out << "no countermodel within budget (" << r.frames_examined << " frames, up to "
                      << r.worlds_exhausted << " worlds)\n";
            else
                c.out << "valid within budget\n";
            break;
        case SearchOutcome::Refuted:
            if (!counter_mode) c.out << "refuted\n";
            c.out << print_model(*r.countermodel);
            break;
        case SearchOutcome::Inconclusive: c.out << "inconclusive: " << r.note << '\n'; break;
    }
    return search_exit(r);
}

inline int cmd_proof(Context& c, const std::string& file, const std::string& lib_dir) {
    Proof p;
    try {
        p = parse_proof(slurp(file));
    } catch (const ProofSyntaxError& e) {
        throw UsageError(file + ": " + e.what());
    }
    Library lib;
    json lib_failures = json::object();
    if (!lib_dir.empty()) {
        if (!std::filesystem::is_directory(lib_dir)) throw UsageError("not a directory: '" + lib_dir + "'");
        LibraryLoad l = load_library(lib_dir);
        lib = std::move(l.library);
        for (const auto& [k, v] : l.failures) lib_failures[k] = v;
    }
    const ProofReport r = check_proof(p, lib);
    if (c.as_json) {
        json j{{"verdict", r.ok ? "ok" : "rejected"}, {"system", to_string(p.system)}, {"lines", p.lines.size()}};
        if (r.ok) j["conclusion"] = print(p.lines.back().formula);
        if (r.first_bad_line) j["first_bad_line"] = {{"index", r.first_bad_line->index}, {"reason", r.first_bad_line->reason}};
        if (!lib_failures.empty()) j["library_failures"] = lib_failures;
        c.out << j.dump() << '\n';
    } else if (r.ok) {
        c.out << "ok: " << p.lines.size() << " lines in " << to_string(p.system) << ", concludes "
              << print(p.lines.back().formula) << '\n';
    } else {
        c.out << "rejected at line " << r.first_bad_line->index << ": " << r.first_bad_line->reason << '\n';
    }
    return r.ok ? holds : refuted;
}

inline int cmd_repro(Context& c, const std::string& name, bool all) {
    if (all == !name.empty()) throw UsageError("repro takes a fixture name or --all");
    std::vector<const fixtures::Fixture*> todo;
    if (all) {
        for (const auto& f : fixtures::all()) todo.push_back(&f);
    } else {
        const auto* f = fixtures::find(name);
        if (!f) throw UsageError("unknown fixture '" + name + "'");
        todo.push_back(f);
    }
    bool pass = true;
    json arr = json::array();
    for (const auto* f : todo) {
        const fixtures::Outcome o = f->run();
        pass = pass && o.pass;
        if (c.as_json)
            arr.push_back(json{{"name", f->name}, {"pass", o.pass}, {"report", o.report}});
        else if (all)
            c.out << (o.pass ? "[ok]   " : "[FAIL] ") << f->name << ": " << o.report << '\n';
        else
            c.out << o.report << '\n';
    }
    if (c.as_json) c.out << json{{"verdict", pass ? "pass" : "fail"}, {"fixtures", arr}}.dump() << '\n';
    return pass ? holds : refuted;
}

inline int cmd_dot(Context& c, const std::string& model, const std::string& vars_s) {
    const Model m = load_model(model);
    const std::set<std::string> vs = vars_s.empty() ? m.declared() : vars_arg(vars_s);
    const std::string dot = to_dot(m, vs);
    if (c.as_json)
        c.out << json{{"verdict", "ok"}, {"dot", dot}}.dump() << '\n';
    else
        c.out << dot;
    return holds;
}

}  // namespace detail

/// Runs one command; args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Model checking, equivalence, morphisms, validity search and proof checking for "
                 "generalized and pseudo noncontingency logics"};
    app.set_version_flag("--version", "nck 1.0.0");
    app.require_subcommand(1);
    app.fallthrough();
    bool as_json = false;
    app.add_flag("--json", as_json, "Emit a JSON report");

    std::string s1, s2, s3, s4, s5, s6, s7, cls = "all";
    bool flag = false;
    int n1 = 0, n2 = 0;
    std::function<int(detail::Context&)> action;

    auto* parse_c = app.add_subcommand("parse", "Parse and print a formula");
    parse_c->add_option("formula", s1)->required();
    parse_c->callback([&] { action = [&](detail::Context& c) { return detail::cmd_parse(c, s1); }; });

    auto* mc = app.add_subcommand("mc", "Model-check a formula at a world");
    mc->add_option("model", s1)->required();
    mc->add_option("formula", s3)->required();
    mc->add_option("--at", s2, "World (defaults to the model's point)");
    mc->callback([&] { action = [&](detail::Context& c) { return detail::cmd_mc(c, s1, s2, s3); }; });

    auto* eq = app.add_subcommand("equiv", "Decide equivalence of two pointed models");
    eq->add_option("model1", s1)->required();
    eq->add_option("model2", s3)->required();
    eq->add_option("--at1", s2);
    eq->add_option("--at2", s4);
    eq->add_option("--lang", s5, "dot, plus or full")->required();
    eq->add_option("--vars", s6, "Comma-separated variables (default: all declared)");
    eq->callback([&] { action = [&](detail::Context& c) { return detail::cmd_equiv(c, s1, s2, s3, s4, s5, s6); }; });

    auto* mo = app.add_subcommand("morphism", "Verify a map as a ⊡-morphism");
    mo->add_option("source", s1)->required();
    mo->add_option("target", s2)->required();
    mo->add_option("map", s3)->required();
    mo->add_flag("--frame", flag, "Ignore valuations");
    mo->add_option("--vars", s4, "Variables for (Var) (default: all declared)");
    mo->callback([&] { action = [&](detail::Context& c) { return detail::cmd_morphism(c, s1, s2, s3, flag, s4); }; });

    auto* tr = app.add_subcommand("transform", "Apply a model construction");
    tr->add_option("kind", s1, "serialize, symmetrize, reflexive-closure or reflexivize-endpoints")->required();
    tr->add_option("model", s2)->required();
    tr->callback([&] { action = [&](detail::Context& c) { return detail::cmd_transform(c, s1, s2); }; });

    auto* pr = app.add_subcommand("props", "Check frame properties");
    pr->add_option("model", s1)->required();
    pr->callback([&] { action = [&](detail::Context& c) { return detail::cmd_props(c, s1); }; });

    auto* va = app.add_subcommand("valid", "Search for a countermodel over a frame class");
    va->add_option("formula", s1)->required();
    va->add_option("--class", cls, "Frame class (default: all)");
    va->add_option("--max-worlds", n1);
    va->add_option("--max-vars", n2);
    va->callback([&] { action = [&](detail::Context& c) { return detail::cmd_valid(c, s1, cls, n1, n2, false); }; });

    auto* co = app.add_subcommand("counter", "Print the first countermodel over a frame class");
    co->add_option("formula", s1)->required();
    co->add_option("--class", cls, "Frame class (default: all)");
    co->add_option("--max-worlds", n1);
    co->add_option("--max-vars", n2);
    co->callback([&] { action = [&](detail::Context& c) { return detail::cmd_valid(c, s1, cls, n1, n2, true); }; });

    auto* pf = app.add_subcommand("proof", "Proof tools");
    pf->require_subcommand(1);
    auto* pc = pf->add_subcommand("check", "Check a proof file");
    pc->add_option("file", s1)->required();
    pc->add_option("--lib", s2, "Directory of proofs usable as THM");
    pc->callback([&] { action = [&](detail::Context& c) { return detail::cmd_proof(c, s1, s2); }; });

    auto* rp = app.add_subcommand("repro", "Replay built-in reference fixtures");
    rp->add_option("name", s1);
    rp->add_flag("--all", flag);
    rp->callback([&] { action = [&](detail::Context& c) { return detail::cmd_repro(c, s1, flag); }; });

    auto* dt = app.add_subcommand("dot", "Render a model as Graphviz");
    dt->add_option("model", s1)->required();
    dt->add_option("--vars", s7);
    dt->callback([&] { action = [&](detail::Context& c) { return detail::cmd_dot(c, s1, s7); }; });

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return holds;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return holds;
    } catch (const CLI::CallForVersion&) {
        out << app.version() << '\n';
        return holds;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return usage;
    }
    detail::Context ctx{out, as_json};
    try {
        return action(ctx);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    }
}

}  // namespace nck::cli
