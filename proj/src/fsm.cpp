#include "specfsm/fsm.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace specfsm::fsm {

namespace {

bool contains_or(const std::vector<std::string>& tokens) {
    for (const auto& t : tokens) {
        std::string l = t;
        std::transform(l.begin(), l.end(), l.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (l == "or") return true;
    }
    return false;
}

}  // namespace

std::string Transition::label() const {
    std::string out = logic::to_string(condition);
    out += " / ";
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (i) out += "; ";
        out += actions[i].to_string();
    }
    return out;
}

const Fsm* Model::fsm_for(const std::string& participant) const {
    for (const auto& f : fsms)
        if (f.participant == participant) return &f;
    return nullptr;
}

const VarDecl* Model::var(const std::string& name) const {
    for (const auto& v : vars)
        if (v.name == name) return &v;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Block combination

logic::ExprPtr combined_condition(const BlockIr& block) {
    using annotation::TagLabel;
    logic::ExprPtr own;
    int last_condition = -1;
    for (std::size_t i = 0; i < block.components.size(); ++i) {
        const auto& comp = block.components[i];
        if (comp.label != TagLabel::Condition) continue;
        // the joining operator is recovered from the connective gaps
        // between this condition span and the previous one
        bool use_or = false;
        if (last_condition >= 0) {
            for (std::size_t g = last_condition + 1; g <= i; ++g)
                if (contains_or(block.connective_tokens[g])) use_or = true;
        }
        if (!own) {
            own = comp.condition;
        } else if (use_or) {
            own = logic::mk_or(own, comp.condition);
        } else {
            own = logic::mk_and(own, comp.condition);
        }
        last_condition = static_cast<int>(i);
    }
    if (!block.inherited_condition) return own;
    if (!own) return block.inherited_condition;
    return logic::mk_and(block.inherited_condition, own);
}

std::vector<Transition> combine_block(const BlockIr& block,
                                      std::vector<std::string>* diagnostics,
                                      const logic::Limits& limits) {
    using annotation::TagLabel;
    logic::ExprPtr condition = combined_condition(block);
    std::string start_state;
    std::vector<std::string> end_states;
    bool end_or = false;
    std::vector<dsl::Assignment> actions;

    int last_end_state = -1;
    for (std::size_t i = 0; i < block.components.size(); ++i) {
        const auto& comp = block.components[i];
        switch (comp.label) {
            case TagLabel::Action:
                actions.insert(actions.end(), comp.actions.begin(), comp.actions.end());
                break;
            case TagLabel::StartState:
                start_state = comp.state;
                break;
            case TagLabel::EndState: {
                if (last_end_state >= 0) {
                    bool use_or = false;
                    for (std::size_t g = last_end_state + 1; g <= i; ++g) {
                        if (contains_or(block.connective_tokens[g])) use_or = true;
                        for (const auto& t : block.connective_tokens[g])
                            if (t == "not" || t == "never")
                                throw UnsupportedStateConnective(
                                    "negated end state is unsupported");
                    }
                    end_or = end_or || use_or;
                }
                end_states.push_back(comp.state);
                last_end_state = static_cast<int>(i);
                break;
            }
            default:
                break;  // nested controls are assembled as their own blocks
        }
    }
    (void)end_or;  // multiple end states are treated as "or": one transition each

    if (actions.empty() && end_states.empty()) return {};  // condition-only block

    if (!condition) condition = logic::mk_true();
    try {
        if (!logic::satisfiable(condition, limits)) {
            if (diagnostics)
                diagnostics->push_back("block " + std::to_string(block.block_index) +
                                       ": unsatisfiable condition dropped: " +
                                       logic::to_string(condition));
            return {};
        }
    } catch (const logic::BlowupLimit& e) {
        if (diagnostics)
            diagnostics->push_back("block " + std::to_string(block.block_index) +
                                   ": satisfiability skipped: " + e.what());
    }

    std::string s_i = start_state.empty() ? kWildcardState : start_state;
    if (end_states.empty()) end_states.push_back(s_i);  // FSM remains in the same state

    std::vector<Transition> out;
    for (const auto& s_f : end_states) {
        Transition t;
        t.s_i = s_i;
        t.s_f = s_f;
        t.condition = condition;
        t.actions = actions;
        t.participant = block.participant;
        t.provenance = {block.block_index};
        out.push_back(std::move(t));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Model compilation

namespace {

void observe_value(VarDecl& d, const logic::Value& v) {
    switch (v.kind) {
        case logic::Value::Kind::Bool:
            break;  // kind stays whatever it is; booleans add no domain info
        case logic::Value::Kind::Symbol:
            d.kind = VarDecl::Kind::Enum;
            if (std::find(d.values.begin(), d.values.end(), v.sym) == d.values.end())
                d.values.push_back(v.sym);
            break;
        case logic::Value::Kind::Int:
            d.kind = VarDecl::Kind::Int;
            d.lo = std::min(d.lo, (long)v.ival);
            // headroom above the largest literal so increments stay in range
            d.hi = std::max(d.hi, (long)v.ival + 1);
            break;
    }
}

}  // namespace

Model compile_model(const std::vector<Transition>& transitions, const dsl::Context& ctx) {
    if (transitions.empty()) throw EmptyModel("no transitions to compile");

    Model m;
    std::map<std::string, std::size_t> fsm_index;
    for (const auto& t : transitions) {
        if (t.participant.empty())
            throw UnknownParticipant("transition with no participant attribution");
        auto it = fsm_index.find(t.participant);
        if (it == fsm_index.end()) {
            fsm_index[t.participant] = m.fsms.size();
            m.participants.push_back(t.participant);
            Fsm f;
            f.participant = t.participant;
            m.fsms.push_back(std::move(f));
            it = fsm_index.find(t.participant);
        }
        Fsm& f = m.fsms[it->second];
        for (const std::string* s : {&t.s_i, &t.s_f}) {
            if (*s == kWildcardState) continue;
            if (std::find(f.states.begin(), f.states.end(), *s) == f.states.end())
                f.states.push_back(*s);
        }
        f.transitions.push_back(t);
    }
    for (auto& f : m.fsms)
        if (!f.states.empty()) f.initial = f.states.front();

    // channels for every ordered distinct pair
    for (const auto& p : m.participants)
        for (const auto& q : m.participants) {
            if (p == q) continue;
            Channel c;
            c.src = p;
            c.dst = q;
            c.name = ctx.channel_name(p, q);
            m.channels.push_back(std::move(c));
        }

    // variable domains from usage
    std::map<std::string, VarDecl> vars;
    auto decl = [&](const std::string& name) -> VarDecl& {
        auto it = vars.find(name);
        if (it == vars.end()) {
            VarDecl d;
            d.name = name;
            d.nondet = name.rfind("nd_", 0) == 0;
            for (const auto& c : m.channels)
                if (c.name == name) d.is_channel = true;
            it = vars.emplace(name, std::move(d)).first;
        }
        return it->second;
    };
    std::function<void(const logic::ExprPtr&)> walk_atoms = [&](const logic::ExprPtr& e) {
        if (e->kind == logic::BoolExpr::Kind::Atom)
            observe_value(decl(e->atom.var), e->atom.value);
        for (const auto& k : e->kids) walk_atoms(k);
    };
    for (const auto& t : transitions) {
        walk_atoms(t.condition);
        for (const auto& a : t.actions) {
            VarDecl& d = decl(a.var);
            if (a.rhs == dsl::Assignment::Rhs::Value)
                observe_value(d, a.value);
            else
                d.kind = VarDecl::Kind::Int;
        }
    }
    for (auto& [name, d] : vars) {
        if (d.kind == VarDecl::Kind::Enum) {
            d.values.insert(d.values.begin(), "none");
            d.init = logic::Value::symbol("none");
        } else if (d.kind == VarDecl::Kind::Int) {
            if (d.hi <= d.lo) d.hi = d.lo + 1;
            d.init = logic::Value::integer(d.lo);
        } else {
            d.init = logic::Value::boolean(false);
        }
        m.vars.push_back(d);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Merging

Fsm merge_split_transitions(const Fsm& fsm, std::vector<std::string>* diagnostics,
                            const logic::Limits& limits) {
    Fsm out = fsm;
    auto& ts = out.transitions;

    auto extend_actions = [](Transition& dst, const Transition& src) {
        for (const auto& a : src.actions)
            if (std::find(dst.actions.begin(), dst.actions.end(), a) == dst.actions.end())
                dst.actions.push_back(a);
        for (int p : src.provenance)
            if (std::find(dst.provenance.begin(), dst.provenance.end(), p) ==
                dst.provenance.end())
                dst.provenance.push_back(p);
    };

    bool changed = true;
    std::size_t guard = ts.size() * ts.size() * 4 + 16;
    while (changed && guard-- > 0) {
        changed = false;
        for (std::size_t i = 0; i < ts.size() && !changed; ++i) {
            for (std::size_t j = i + 1; j < ts.size() && !changed; ++j) {
                if (ts[i].s_i != ts[j].s_i || ts[i].s_f != ts[j].s_f) continue;
                try {
                    if (logic::equivalent(ts[i].condition, ts[j].condition, limits)) {
                        extend_actions(ts[i], ts[j]);
                        ts.erase(ts.begin() + j);
                        changed = true;
                    } else if (logic::implies(ts[i].condition, ts[j].condition, limits)) {
                        // ts[i] is the stricter transition: it also performs
                        // ts[j]'s actions, and ts[j] keeps the remainder
                        extend_actions(ts[i], ts[j]);
                        ts[j].condition =
                            logic::mk_and(ts[j].condition, logic::mk_not(ts[i].condition));
                        if (!logic::satisfiable(ts[j].condition, limits))
                            ts.erase(ts.begin() + j);
                        changed = true;
                    } else if (logic::implies(ts[j].condition, ts[i].condition, limits)) {
                        extend_actions(ts[j], ts[i]);
                        ts[i].condition =
                            logic::mk_and(ts[i].condition, logic::mk_not(ts[j].condition));
                        if (!logic::satisfiable(ts[i].condition, limits))
                            ts.erase(ts.begin() + i);
                        changed = true;
                    }
                } catch (const logic::BlowupLimit& e) {
                    if (diagnostics)
                        diagnostics->push_back("merge skipped a pair: " + std::string(e.what()));
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Action recovery

std::vector<dsl::IrFormula> recover_missing_actions(const annotation::CtlBlock& block,
                                                    const dsl::RuleSet& rules,
                                                    const lexicon::Lexicon& lex,
                                                    const dsl::Context& ctx) {
    std::vector<dsl::IrFormula> out;
    auto verbs = rules.verb_lexicon();
    for (const auto& run : block.connective_tokens) {
        bool has_verb = false;
        for (const auto& tok : run) {
            std::string l = tok;
            std::transform(l.begin(), l.end(), l.begin(),
                           [](unsigned char c) { return std::tolower(c); });
            if (verbs.is_verb_form(l)) has_verb = true;
        }
        if (!has_verb) continue;
        try {
            auto linked = lexicon::link_keywords(run, lex);
            auto tree = deptree::restructure_logical(deptree::parse_dependencies(linked, verbs));
            auto ast = dsl::map_to_ast(tree, rules, run);
            dsl::resolve_context(ast, ctx, lex, nullptr);
            out.push_back(dsl::interpret_ast(ast, dsl::Mode::Action, ctx));
        } catch (const std::runtime_error&) {
            // not an action phrase after all: no recovery from this run
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Graph emission

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

std::string node_name(const std::string& state) {
    return state == kWildcardState ? "any" : state;
}

std::string unescape(const std::string& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size()) i++;
        out += s[i];
    }
    return out;
}

// reads attr="..." with escaped quotes
std::string read_attr(const std::string& line, const std::string& key) {
    std::string needle = key + "=\"";
    std::size_t p = line.find(needle);
    if (p == std::string::npos) return "";
    std::size_t q = p + needle.size();
    std::string raw;
    while (q < line.size()) {
        if (line[q] == '\\' && q + 1 < line.size()) {
            raw += line[q];
            raw += line[q + 1];
            q += 2;
            continue;
        }
        if (line[q] == '"') break;
        raw += line[q++];
    }
    return unescape(raw);
}

}  // namespace

std::string emit_graph(const Fsm& fsm) {
    std::ostringstream os;
    os << "digraph fsm {\n";
    os << "  graph [participant=\"" << dot_escape(fsm.participant) << "\", initial=\""
       << dot_escape(fsm.initial) << "\"];\n";
    os << "  rankdir=LR;\n";
    for (const auto& s : fsm.states) os << "  \"" << dot_escape(s) << "\" [shape=ellipse];\n";
    bool any_wildcard = false;
    for (const auto& t : fsm.transitions)
        if (t.s_i == kWildcardState || t.s_f == kWildcardState) any_wildcard = true;
    if (any_wildcard) os << "  \"any\" [shape=box, style=dashed];\n";
    for (const auto& t : fsm.transitions) {
        std::string actions;
        for (std::size_t i = 0; i < t.actions.size(); ++i) {
            if (i) actions += "; ";
            actions += t.actions[i].to_string();
        }
        os << "  \"" << dot_escape(node_name(t.s_i)) << "\" -> \""
           << dot_escape(node_name(t.s_f)) << "\" [label=\"" << dot_escape(t.label())
           << "\", condition=\"" << dot_escape(logic::to_string(t.condition))
           << "\", actions=\"" << dot_escape(actions) << "\", from=\"" << dot_escape(t.s_i)
           << "\", to=\"" << dot_escape(t.s_f) << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

Fsm parse_graph(const std::string& text) {
    Fsm f;
    std::istringstream in(text);
    std::string line;
    bool in_graph = false;
    while (std::getline(in, line)) {
        std::string t = line;
        t.erase(0, t.find_first_not_of(" \t"));
        if (t.rfind("digraph", 0) == 0) {
            in_graph = true;
            continue;
        }
        if (!in_graph) continue;
        if (t.rfind("graph [", 0) == 0) {
            f.participant = read_attr(t, "participant");
            f.initial = read_attr(t, "initial");
            continue;
        }
        if (t.find("->") != std::string::npos && t.find("from=") != std::string::npos) {
            Transition tr;
            tr.s_i = read_attr(t, "from");
            tr.s_f = read_attr(t, "to");
            std::string cond = read_attr(t, "condition");
            tr.condition = logic::parse_expr(cond.empty() ? "TRUE" : cond);
            std::string actions = read_attr(t, "actions");
            std::size_t p = 0;
            while (p < actions.size()) {
                std::size_t q = actions.find("; ", p);
                std::string one =
                    q == std::string::npos ? actions.substr(p) : actions.substr(p, q - p);
                if (!one.empty()) tr.actions.push_back(dsl::Assignment::parse(one));
                if (q == std::string::npos) break;
                p = q + 2;
            }
            tr.participant = f.participant;
            f.transitions.push_back(std::move(tr));
            continue;
        }
        if (t.rfind("\"", 0) == 0 && t.find("shape=ellipse") != std::string::npos) {
            std::size_t q = t.find('"', 1);
            if (q == std::string::npos) throw GraphParseError("bad node line: " + t);
            f.states.push_back(unescape(t.substr(1, q - 1)));
        }
    }
    if (!in_graph) throw GraphParseError("no digraph found");
    return f;
}

bool fsm_equal(const Fsm& a, const Fsm& b) {
    if (a.participant != b.participant || a.initial != b.initial || a.states != b.states)
        return false;
    if (a.transitions.size() != b.transitions.size()) return false;
    for (std::size_t i = 0; i < a.transitions.size(); ++i) {
        const auto& x = a.transitions[i];
        const auto& y = b.transitions[i];
        if (x.s_i != y.s_i || x.s_f != y.s_f) return false;
        if (logic::to_string(x.condition) != logic::to_string(y.condition)) return false;
        if (x.actions != y.actions) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// JSON serialization

namespace {

nlohmann::json value_to_json(const logic::Value& v) {
    switch (v.kind) {
        case logic::Value::Kind::Bool: return {{"kind", "bool"}, {"value", v.bval}};
        case logic::Value::Kind::Symbol: return {{"kind", "symbol"}, {"value", v.sym}};
        case logic::Value::Kind::Int: return {{"kind", "int"}, {"value", v.ival}};
    }
    return {};
}

logic::Value value_from_json(const nlohmann::json& j) {
    std::string kind = j.at("kind");
    if (kind == "bool") return logic::Value::boolean(j.at("value").get<bool>());
    if (kind == "symbol") return logic::Value::symbol(j.at("value").get<std::string>());
    return logic::Value::integer(j.at("value").get<std::int64_t>());
}

nlohmann::json transition_to_json(const Transition& t) {
    nlohmann::json j;
    j["from"] = t.s_i;
    j["to"] = t.s_f;
    j["condition"] = logic::to_string(t.condition);
    j["actions"] = nlohmann::json::array();
    for (const auto& a : t.actions) j["actions"].push_back(a.to_ir_dump());
    j["participant"] = t.participant;
    j["provenance"] = t.provenance;
    return j;
}

Transition transition_from_json(const nlohmann::json& j) {
    Transition t;
    t.s_i = j.at("from");
    t.s_f = j.at("to");
    t.condition = logic::parse_expr(j.at("condition").get<std::string>());
    for (const auto& a : j.at("actions"))
        t.actions.push_back(dsl::Assignment::parse(a.get<std::string>()));
    t.participant = j.value("participant", "");
    if (j.contains("provenance")) t.provenance = j["provenance"].get<std::vector<int>>();
    return t;
}

}  // namespace

nlohmann::json model_to_json(const Model& m) {
    nlohmann::json j;
    j["participants"] = m.participants;
    j["fsms"] = nlohmann::json::array();
    for (const auto& f : m.fsms) {
        nlohmann::json jf;
        jf["participant"] = f.participant;
        jf["states"] = f.states;
        jf["initial"] = f.initial;
        jf["transitions"] = nlohmann::json::array();
        for (const auto& t : f.transitions) jf["transitions"].push_back(transition_to_json(t));
        j["fsms"].push_back(std::move(jf));
    }
    j["channels"] = nlohmann::json::array();
    for (const auto& c : m.channels)
        j["channels"].push_back({{"name", c.name}, {"src", c.src}, {"dst", c.dst}});
    j["vars"] = nlohmann::json::array();
    for (const auto& v : m.vars) {
        nlohmann::json jv;
        jv["name"] = v.name;
        jv["kind"] = v.kind == VarDecl::Kind::Bool   ? "bool"
                     : v.kind == VarDecl::Kind::Enum ? "enum"
                                                     : "int";
        if (v.kind == VarDecl::Kind::Enum) jv["values"] = v.values;
        if (v.kind == VarDecl::Kind::Int) {
            jv["lo"] = v.lo;
            jv["hi"] = v.hi;
        }
        jv["init"] = value_to_json(v.init);
        jv["nondet"] = v.nondet;
        jv["channel"] = v.is_channel;
        j["vars"].push_back(std::move(jv));
    }
    return j;
}

Model model_from_json(const nlohmann::json& j) {
    Model m;
    m.participants = j.at("participants").get<std::vector<std::string>>();
    for (const auto& jf : j.at("fsms")) {
        Fsm f;
        f.participant = jf.at("participant");
        f.states = jf.at("states").get<std::vector<std::string>>();
        f.initial = jf.at("initial");
        for (const auto& jt : jf.at("transitions")) f.transitions.push_back(transition_from_json(jt));
        m.fsms.push_back(std::move(f));
    }
    for (const auto& jc : j.at("channels"))
        m.channels.push_back({jc.at("name"), jc.at("src"), jc.at("dst")});
    for (const auto& jv : j.at("vars")) {
        VarDecl v;
        v.name = jv.at("name");
        std::string kind = jv.at("kind");
        v.kind = kind == "bool"   ? VarDecl::Kind::Bool
                 : kind == "enum" ? VarDecl::Kind::Enum
                                  : VarDecl::Kind::Int;
        if (jv.contains("values")) v.values = jv["values"].get<std::vector<std::string>>();
        if (jv.contains("lo")) v.lo = jv["lo"].get<long>();
        if (jv.contains("hi")) v.hi = jv["hi"].get<long>();
        v.init = value_from_json(jv.at("init"));
        v.nondet = jv.value("nondet", false);
        v.is_channel = jv.value("channel", false);
        m.vars.push_back(std::move(v));
    }
    return m;
}

}  // namespace specfsm::fsm
