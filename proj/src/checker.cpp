#include "specfsm/checker.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <sstream>

namespace specfsm::checker {

void AdversaryConfig::validate() const {
    static const std::set<std::string> known = {"drop", "modify", "inject", "replay"};
    for (const auto& c : capabilities)
        if (!known.count(c)) throw CheckerError("unknown adversary capability: " + c);
    if (capabilities.count("replay") && replay_buffer_size < 1)
        throw CheckerError("replay requires a buffer of at least 1");
    if ((capabilities.count("modify") || capabilities.count("inject")) &&
        injectable_messages.empty())
        throw CheckerError("modify/inject require a non-empty injectable message set");
}

// ---------------------------------------------------------------------------
// LTL parsing

namespace {

struct LtlLexer {
    std::string text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) pos++;
    }
    bool eat(const std::string& tok) {
        skip_ws();
        if (text.compare(pos, tok.size(), tok) == 0) {
            // word tokens must not run into identifier characters
            if (std::isalpha(static_cast<unsigned char>(tok[0])) &&
                pos + tok.size() < text.size() &&
                (std::isalnum(static_cast<unsigned char>(text[pos + tok.size()])) ||
                 text[pos + tok.size()] == '_'))
                return false;
            pos += tok.size();
            return true;
        }
        return false;
    }
    bool peek(const std::string& tok) {
        std::size_t save = pos;
        bool ok = eat(tok);
        pos = save;
        return ok;
    }
    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size()) {
            char c = text[pos];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                pos++;
            } else if (c == '-' && pos + 1 < text.size() &&
                       (std::isalnum(static_cast<unsigned char>(text[pos + 1])) ||
                        text[pos + 1] == '_')) {
                pos++;  // hyphenated state names; never consumes "->"
            } else {
                break;
            }
        }
        if (pos == start) throw PropertyParseError("expected identifier at offset " +
                                                   std::to_string(pos) + " in: " + text);
        return text.substr(start, pos - start);
    }
    bool done() {
        skip_ws();
        return pos >= text.size();
    }
};

LtlPtr mk(Ltl::Kind k, std::vector<LtlPtr> kids) {
    auto n = std::make_shared<Ltl>();
    n->kind = k;
    n->kids = std::move(kids);
    return n;
}

LtlPtr mk_atom(logic::ExprPtr e) {
    auto n = std::make_shared<Ltl>();
    n->kind = Ltl::Kind::Atom;
    n->atom = std::move(e);
    return n;
}

LtlPtr parse_implies(LtlLexer& lx);

logic::Value parse_value(LtlLexer& lx) {
    lx.skip_ws();
    if (lx.pos < lx.text.size() &&
        (std::isdigit(static_cast<unsigned char>(lx.text[lx.pos])))) {
        std::size_t start = lx.pos;
        while (lx.pos < lx.text.size() &&
               std::isdigit(static_cast<unsigned char>(lx.text[lx.pos])))
            lx.pos++;
        return logic::Value::integer(std::stoll(lx.text.substr(start, lx.pos - start)));
    }
    std::string id = lx.ident();
    if (id == "TRUE") return logic::Value::boolean(true);
    if (id == "FALSE") return logic::Value::boolean(false);
    return logic::Value::symbol(id);
}

LtlPtr parse_primary(LtlLexer& lx) {
    if (lx.eat("(")) {
        LtlPtr inner = parse_implies(lx);
        if (!lx.eat(")")) throw PropertyParseError("missing ')' in: " + lx.text);
        return inner;
    }
    if (lx.peek("TRUE")) {
        lx.eat("TRUE");
        return mk_atom(logic::mk_true());
    }
    if (lx.peek("FALSE")) {
        lx.eat("FALSE");
        return mk_atom(logic::mk_false());
    }
    std::string var = lx.ident();
    logic::Atom a;
    a.var = var;
    if (lx.eat("<=")) a.cmp = logic::Cmp::Le;
    else if (lx.eat(">=")) a.cmp = logic::Cmp::Ge;
    else if (lx.eat("<")) a.cmp = logic::Cmp::Lt;
    else if (lx.eat(">")) a.cmp = logic::Cmp::Gt;
    else if (lx.eat("=")) a.cmp = logic::Cmp::Eq;
    else {
        a.value = logic::Value::boolean(true);  // bare boolean variable
        return mk_atom(logic::mk_atom(a));
    }
    a.value = parse_value(lx);
    return mk_atom(logic::mk_atom(a));
}

LtlPtr parse_unary(LtlLexer& lx) {
    if (lx.eat("!")) return mk(Ltl::Kind::Not, {parse_unary(lx)});
    if (lx.eat("G")) return mk(Ltl::Kind::G, {parse_unary(lx)});
    if (lx.eat("F")) return mk(Ltl::Kind::F, {parse_unary(lx)});
    if (lx.eat("X")) return mk(Ltl::Kind::X, {parse_unary(lx)});
    return parse_primary(lx);
}

LtlPtr parse_until(LtlLexer& lx) {
    LtlPtr left = parse_unary(lx);
    while (lx.eat("U")) left = mk(Ltl::Kind::U, {left, parse_unary(lx)});
    return left;
}

LtlPtr parse_and(LtlLexer& lx) {
    LtlPtr left = parse_until(lx);
    while (lx.eat("&")) left = mk(Ltl::Kind::And, {left, parse_until(lx)});
    return left;
}

LtlPtr parse_or(LtlLexer& lx) {
    LtlPtr left = parse_and(lx);
    while (true) {
        lx.skip_ws();
        if (lx.peek("->")) break;
        if (!lx.eat("|")) break;
        left = mk(Ltl::Kind::Or, {left, parse_and(lx)});
    }
    return left;
}

LtlPtr parse_implies(LtlLexer& lx) {
    LtlPtr left = parse_or(lx);
    if (lx.eat("->")) return mk(Ltl::Kind::Implies, {left, parse_implies(lx)});
    return left;
}

}  // namespace

LtlPtr parse_ltl(const std::string& text) {
    LtlLexer lx{text};
    LtlPtr p = parse_implies(lx);
    if (!lx.done())
        throw PropertyParseError("trailing input at offset " + std::to_string(lx.pos) +
                                 " in: " + text);
    return p;
}

std::string ltl_to_string(const LtlPtr& p) {
    switch (p->kind) {
        case Ltl::Kind::Atom: return logic::to_string(p->atom);
        case Ltl::Kind::Not: return "!(" + ltl_to_string(p->kids[0]) + ")";
        case Ltl::Kind::And:
            return "(" + ltl_to_string(p->kids[0]) + " & " + ltl_to_string(p->kids[1]) + ")";
        case Ltl::Kind::Or:
            return "(" + ltl_to_string(p->kids[0]) + " | " + ltl_to_string(p->kids[1]) + ")";
        case Ltl::Kind::Implies:
            return "(" + ltl_to_string(p->kids[0]) + " -> " + ltl_to_string(p->kids[1]) + ")";
        case Ltl::Kind::G: return "G (" + ltl_to_string(p->kids[0]) + ")";
        case Ltl::Kind::F: return "F (" + ltl_to_string(p->kids[0]) + ")";
        case Ltl::Kind::X: return "X (" + ltl_to_string(p->kids[0]) + ")";
        case Ltl::Kind::U:
            return "(" + ltl_to_string(p->kids[0]) + " U " + ltl_to_string(p->kids[1]) + ")";
    }
    return "?";
}

std::vector<LtlProperty> parse_property_file(const std::string& text) {
    std::vector<LtlProperty> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        std::string t = line;
        t.erase(0, t.find_first_not_of(" \t"));
        if (t.empty() || t[0] == '#') continue;
        std::size_t colon = t.find(':');
        if (colon == std::string::npos)
            throw PropertyParseError("line " + std::to_string(lineno) +
                                     ": expected `name: formula`");
        LtlProperty p;
        std::string head = t.substr(0, colon);
        std::size_t at = head.find('@');
        if (at != std::string::npos) {
            p.bound = std::stoi(head.substr(at + 1));
            head = head.substr(0, at);
        }
        while (!head.empty() && std::isspace(static_cast<unsigned char>(head.back())))
            head.pop_back();
        p.name = head;
        p.formula = parse_ltl(t.substr(colon + 1));
        out.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Instrumentation (metadata only; the adversary stage lives in the engine)

fsm::Model instrument_adversary(const fsm::Model& m, const AdversaryConfig& cfg) {
    cfg.validate();
    if (cfg.capabilities.empty()) return m;  // identity
    fsm::Model out = m;
    // one nondeterministic choice variable documenting the stage, plus replay
    // buffer slots, so the transpiled text carries the adversary explicitly
    fsm::VarDecl action;
    action.name = "adv_action";
    action.kind = fsm::VarDecl::Kind::Enum;
    action.values = {"pass"};
    action.nondet = true;
    for (const auto& c : out.channels) {
        if (cfg.capabilities.count("drop")) action.values.push_back("drop_" + c.name);
        if (cfg.capabilities.count("inject") || cfg.capabilities.count("modify"))
            for (const auto& msg : cfg.injectable_messages)
                action.values.push_back("put_" + c.name + "_" + msg);
        if (cfg.capabilities.count("replay")) {
            action.values.push_back("replay_" + c.name);
            for (int i = 0; i < cfg.replay_buffer_size; ++i) {
                fsm::VarDecl buf;
                buf.name = c.name + "_buf" + std::to_string(i);
                buf.kind = fsm::VarDecl::Kind::Enum;
                const fsm::VarDecl* chan = out.var(c.name);
                buf.values = chan && !chan->values.empty()
                                 ? chan->values
                                 : std::vector<std::string>{"none"};
                buf.init = logic::Value::symbol("none");
                out.vars.push_back(std::move(buf));
            }
        }
    }
    action.init = logic::Value::symbol("pass");
    out.vars.push_back(std::move(action));
    return out;
}

// ---------------------------------------------------------------------------
// Engine

namespace {

using Store = std::map<std::string, logic::Value>;

struct BufferEntry {
    std::string msg;
    std::map<std::string, logic::Value> fields;
    bool operator==(const BufferEntry& o) const { return msg == o.msg && fields == o.fields; }
};

struct GlobalState {
    std::vector<std::string> fsm_states;  // model participant order
    Store store;
    std::map<std::string, std::vector<BufferEntry>> buffers;

    std::string key() const {
        std::string k;
        for (const auto& s : fsm_states) k += s + "\x1f";
        k += "\x1e";
        for (const auto& [n, v] : store) k += n + "=" + v.to_string() + "\x1f";
        k += "\x1e";
        for (const auto& [c, b] : buffers) {
            k += c + ":";
            for (const auto& e : b) {
                k += e.msg;
                for (const auto& [f, v] : e.fields) k += "," + f + "=" + v.to_string();
                k += "\x1f";
            }
        }
        return k;
    }
};

struct Succ {
    GlobalState state;
    std::string action;
    std::vector<std::string> fired;
};

const std::string kNone = "none";

struct Engine {
    const fsm::Model& m;
    const AdversaryConfig& cfg;
    std::vector<std::string> nondet_vars;
    // per channel: the attached field variables (boolean `<chan>_<suffix>`)
    std::map<std::string, std::vector<std::string>> channel_fields;

    explicit Engine(const fsm::Model& model, const AdversaryConfig& config)
        : m(model), cfg(config) {
        for (const auto& v : m.vars) {
            if (v.nondet && v.kind == fsm::VarDecl::Kind::Bool) nondet_vars.push_back(v.name);
            for (const auto& c : m.channels)
                if (v.kind == fsm::VarDecl::Kind::Bool &&
                    v.name.rfind(c.name + "_", 0) == 0)
                    channel_fields[c.name].push_back(v.name);
        }
    }

    GlobalState initial() const {
        GlobalState g;
        for (const auto& f : m.fsms) g.fsm_states.push_back(f.initial);
        for (const auto& v : m.vars) {
            if (v.name == "adv_action" || v.name.find("_buf") != std::string::npos) continue;
            g.store[v.name] = v.init;
        }
        if (cfg.capabilities.count("replay"))
            for (const auto& c : m.channels) g.buffers[c.name] = {};
        return g;
    }

    bool is_channel_var(const std::string& name) const {
        const fsm::VarDecl* v = m.var(name);
        return v && v->is_channel;
    }

    // deterministic synchronous firing on a prepared store
    void fire(GlobalState& g, std::vector<std::string>& fired) const {
        Store pre = g.store;
        std::set<std::string> read_channels;
        std::function<void(const logic::ExprPtr&)> note_reads = [&](const logic::ExprPtr& e) {
            if (e->kind == logic::BoolExpr::Kind::Atom && is_channel_var(e->atom.var))
                read_channels.insert(e->atom.var);
            for (const auto& k : e->kids) note_reads(k);
        };

        std::vector<std::pair<std::string, std::string>> sends;  // channel, message
        for (std::size_t fi = 0; fi < m.fsms.size(); ++fi) {
            const fsm::Fsm& f = m.fsms[fi];
            bool first = true;
            const std::string pre_state = g.fsm_states[fi];
            for (const auto& t : f.transitions) {
                if (t.s_i != pre_state && t.s_i != fsm::kWildcardState) continue;
                if (!logic::eval_expr(t.condition, pre)) continue;
                note_reads(t.condition);
                fired.push_back(f.participant + ": " + t.label());
                if (first) {
                    if (t.s_f != fsm::kWildcardState) g.fsm_states[fi] = t.s_f;
                    first = false;
                }
                for (const auto& a : t.actions) {
                    auto it = g.store.find(a.var);
                    const fsm::VarDecl* d = m.var(a.var);
                    switch (a.rhs) {
                        case dsl::Assignment::Rhs::Value:
                            g.store[a.var] = a.value;
                            break;
                        case dsl::Assignment::Rhs::Increment: {
                            long cur = it != g.store.end() &&
                                               it->second.kind == logic::Value::Kind::Int
                                           ? (long)it->second.ival
                                           : 0;
                            long hi = d ? d->hi : cur + 1;
                            g.store[a.var] = logic::Value::integer(std::min(cur + 1, hi));
                            break;
                        }
                        case dsl::Assignment::Rhs::Decrement: {
                            long cur = it != g.store.end() &&
                                               it->second.kind == logic::Value::Kind::Int
                                           ? (long)it->second.ival
                                           : 0;
                            long lo = d ? d->lo : cur - 1;
                            g.store[a.var] = logic::Value::integer(std::max(cur - 1, lo));
                            break;
                        }
                    }
                    if (is_channel_var(a.var) && a.rhs == dsl::Assignment::Rhs::Value &&
                        a.value.kind == logic::Value::Kind::Symbol && a.value.sym != kNone)
                        sends.push_back({a.var, a.value.sym});
                }
            }
        }

        // consume: matched channels empty out unless rewritten this step
        for (const auto& chan : read_channels) {
            if (g.store[chan] == pre[chan] &&
                !(pre[chan].kind == logic::Value::Kind::Symbol && pre[chan].sym == kNone)) {
                g.store[chan] = logic::Value::symbol(kNone);
                auto cf = channel_fields.find(chan);
                if (cf != channel_fields.end())
                    for (const auto& f : cf->second) g.store[f] = logic::Value::boolean(false);
            }
        }

        // legitimate sends feed the replay buffers
        if (cfg.capabilities.count("replay")) {
            for (const auto& [chan, msg] : sends) {
                BufferEntry e;
                e.msg = msg;
                auto cf = channel_fields.find(chan);
                if (cf != channel_fields.end())
                    for (const auto& f : cf->second) e.fields[f] = g.store[f];
                auto& buf = g.buffers[chan];
                if (std::find(buf.begin(), buf.end(), e) != buf.end()) continue;
                if ((int)buf.size() >= cfg.replay_buffer_size) buf.erase(buf.begin());
                buf.push_back(std::move(e));
            }
        }
    }

    std::vector<Succ> successors(const GlobalState& g) const {
        // stage 1: adversary choices
        std::vector<std::pair<GlobalState, std::string>> staged;
        staged.push_back({g, "pass"});
        for (const auto& c : m.channels) {
            const logic::Value& cur = g.store.count(c.name) ? g.store.at(c.name)
                                                            : logic::Value::symbol(kNone);
            bool occupied = !(cur.kind == logic::Value::Kind::Symbol && cur.sym == kNone);
            auto fields_of = [&](GlobalState& s, bool value) {
                auto cf = channel_fields.find(c.name);
                if (cf != channel_fields.end())
                    for (const auto& f : cf->second)
                        s.store[f] = logic::Value::boolean(value);
            };
            if (cfg.capabilities.count("drop") && occupied) {
                GlobalState s = g;
                s.store[c.name] = logic::Value::symbol(kNone);
                fields_of(s, false);
                staged.push_back({std::move(s), "drop " + c.name});
            }
            const fsm::VarDecl* decl = m.var(c.name);
            for (const char* cap : {"inject", "modify"}) {
                if (!cfg.capabilities.count(cap)) continue;
                if (std::string(cap) == "modify" && !occupied) continue;
                if (std::string(cap) == "inject" && occupied) continue;
                for (const auto& msg : cfg.injectable_messages) {
                    if (decl && std::find(decl->values.begin(), decl->values.end(), msg) ==
                                    decl->values.end())
                        continue;  // message not part of this channel's alphabet
                    GlobalState s = g;
                    s.store[c.name] = logic::Value::symbol(msg);
                    fields_of(s, false);  // forged messages are never integrity-protected
                    staged.push_back({std::move(s), std::string(cap) + " " + c.name + " " + msg});
                }
            }
            if (cfg.capabilities.count("replay")) {
                auto it = g.buffers.find(c.name);
                if (it != g.buffers.end()) {
                    for (const auto& e : it->second) {
                        GlobalState s = g;
                        s.store[c.name] = logic::Value::symbol(e.msg);
                        for (const auto& [f, v] : e.fields) s.store[f] = v;
                        staged.push_back({std::move(s), "replay " + c.name + " " + e.msg});
                    }
                }
            }
        }

        // stage 2: nondeterministic inputs; stage 3: synchronous firing
        std::vector<Succ> out;
        std::size_t nn = nondet_vars.size();
        for (auto& [st, action] : staged) {
            for (std::size_t bits = 0; bits < (std::size_t(1) << nn); ++bits) {
                GlobalState s = st;
                for (std::size_t i = 0; i < nn; ++i)
                    s.store[nondet_vars[i]] = logic::Value::boolean((bits >> i) & 1);
                Succ succ;
                succ.action = action;
                fire(s, succ.fired);
                // inputs are re-valued every step: canonicalize for dedup
                for (const auto& nv : nondet_vars) s.store[nv] = logic::Value::boolean(false);
                succ.state = std::move(s);
                out.push_back(std::move(succ));
            }
        }
        return out;
    }

    // property atoms may reference FSM states as `state_<participant>`
    Store property_env(const GlobalState& g) const {
        Store env = g.store;
        for (std::size_t i = 0; i < m.fsms.size(); ++i) {
            std::string name = "state_" + m.fsms[i].participant;
            std::transform(name.begin(), name.end(), name.begin(),
                           [](unsigned char c) { return std::tolower(c); });
            env[name] = logic::Value::symbol(g.fsm_states[i]);
        }
        return env;
    }
};

struct Edge {
    int to;
    std::string action;
    std::vector<std::string> fired;
};

struct Graph {
    std::vector<GlobalState> nodes;
    std::vector<int> parent;                    // BFS tree
    std::vector<std::string> parent_action;
    std::vector<std::vector<std::string>> parent_fired;
    std::vector<std::vector<Edge>> adj;
    bool complete = false;  // whole reachable space fit within the bound
};

Graph build_graph(const Engine& eng, int bound, std::size_t memory_cap) {
    Graph gr;
    std::map<std::string, int> seen;
    GlobalState init = eng.initial();
    seen[init.key()] = 0;
    gr.nodes.push_back(init);
    gr.parent.push_back(-1);
    gr.parent_action.push_back("");
    gr.parent_fired.push_back({});
    gr.adj.emplace_back();

    std::vector<int> frontier = {0};
    int depth = 0;
    while (!frontier.empty() && depth < bound) {
        std::vector<int> next;
        for (int u : frontier) {
            for (auto& succ : eng.successors(gr.nodes[u])) {
                std::string key = succ.state.key();
                auto it = seen.find(key);
                int v;
                if (it == seen.end()) {
                    v = static_cast<int>(gr.nodes.size());
                    if ((std::size_t)v >= memory_cap)
                        throw MemoryCap("state cap exceeded at " + std::to_string(v));
                    seen[key] = v;
                    gr.nodes.push_back(succ.state);
                    gr.parent.push_back(u);
                    gr.parent_action.push_back(succ.action);
                    gr.parent_fired.push_back(succ.fired);
                    gr.adj.emplace_back();
                    next.push_back(v);
                } else {
                    v = it->second;
                }
                gr.adj[u].push_back({v, succ.action, succ.fired});
            }
        }
        frontier = std::move(next);
        depth++;
    }
    gr.complete = frontier.empty();
    return gr;
}

bool is_prop(const LtlPtr& f) {
    switch (f->kind) {
        case Ltl::Kind::Atom: return true;
        case Ltl::Kind::Not:
        case Ltl::Kind::And:
        case Ltl::Kind::Or:
        case Ltl::Kind::Implies: {
            for (const auto& k : f->kids)
                if (!is_prop(k)) return false;
            return true;
        }
        default: return false;
    }
}

logic::ExprPtr prop_expr(const LtlPtr& f) {
    switch (f->kind) {
        case Ltl::Kind::Atom: return f->atom;
        case Ltl::Kind::Not: return logic::mk_not(prop_expr(f->kids[0]));
        case Ltl::Kind::And: return logic::mk_and(prop_expr(f->kids[0]), prop_expr(f->kids[1]));
        case Ltl::Kind::Or: return logic::mk_or(prop_expr(f->kids[0]), prop_expr(f->kids[1]));
        case Ltl::Kind::Implies:
            return logic::mk_or(logic::mk_not(prop_expr(f->kids[0])), prop_expr(f->kids[1]));
        default: throw UnsupportedProperty("not a propositional subformula");
    }
}

TraceStep step_of(const Engine& eng, const GlobalState& g, const std::string& action,
                  const std::vector<std::string>& fired) {
    TraceStep s;
    s.fsm_states = g.fsm_states;
    s.store = g.store;
    s.adversary_action = action;
    s.fired = fired;
    return s;
}

// stem from the BFS tree root to node u, inclusive
std::vector<TraceStep> stem_to(const Engine& eng, const Graph& gr, int u) {
    std::vector<int> path;
    for (int x = u; x != -1; x = gr.parent[x]) path.push_back(x);
    std::reverse(path.begin(), path.end());
    std::vector<TraceStep> steps;
    for (int x : path)
        steps.push_back(step_of(eng, gr.nodes[x], gr.parent_action[x], gr.parent_fired[x]));
    return steps;
}

// DFS cycle search within `allowed` nodes starting from src; returns the node
// path stem->...->cycle-entry->...->cycle-entry (edges inclusive) or empty.
std::vector<std::pair<int, const Edge*>> find_lasso(const Graph& gr,
                                                    const std::vector<char>& allowed, int src) {
    enum { White, Gray, Black };
    std::vector<char> color(gr.nodes.size(), White);
    std::vector<std::pair<int, const Edge*>> stack;  // (node, incoming edge)
    std::function<bool(int)> dfs = [&](int u) -> bool {
        color[u] = Gray;
        for (const auto& e : gr.adj[u]) {
            if (!allowed[e.to]) continue;
            if (color[e.to] == Gray) {
                stack.push_back({e.to, &e});  // closes the cycle
                return true;
            }
            if (color[e.to] == White) {
                stack.push_back({e.to, &e});
                if (dfs(e.to)) return true;
                stack.pop_back();
            }
        }
        color[u] = Black;
        return false;
    };
    if (!allowed[src]) return {};
    stack.push_back({src, nullptr});
    if (dfs(src)) return stack;
    return {};
}

CounterexampleTrace lasso_trace(const Engine& eng, const Graph& gr,
                                const std::vector<std::pair<int, const Edge*>>& lasso,
                                const std::string& property) {
    CounterexampleTrace t;
    t.property = property;
    int src = lasso.front().first;
    t.steps = stem_to(eng, gr, src);
    std::size_t base = t.steps.size() - 1;  // index of src within steps
    int cycle_node = lasso.back().first;
    // locate where the cycle entry first appears after src
    for (std::size_t i = 1; i < lasso.size(); ++i) {
        const auto& [node, edge] = lasso[i];
        t.steps.push_back(step_of(eng, gr.nodes[node], edge->action, edge->fired));
        if (node == cycle_node && i + 1 < lasso.size() && !t.loop_start)
            t.loop_start = base + i;
    }
    if (!t.loop_start) {
        // self-loop or cycle entry is the last node: find its earlier occurrence
        for (std::size_t i = 0; i + 1 < lasso.size(); ++i)
            if (lasso[i].first == cycle_node) {
                t.loop_start = base + i;
                break;
            }
    }
    return t;
}

}  // namespace

Verdict check(const fsm::Model& m, const AdversaryConfig& cfg, const LtlProperty& p,
              const CheckOptions& opts) {
    cfg.validate();
    Engine eng(m, cfg);
    int bound = p.bound.value_or(opts.bound);
    Graph gr = build_graph(eng, bound, opts.memory_cap_states);

    Verdict v;
    v.property = p.name;

    auto holds = [&](const logic::ExprPtr& e, int node) {
        return logic::eval_expr(e, eng.property_env(gr.nodes[node]));
    };
    auto conclude_no_violation = [&]() {
        v.kind = gr.complete ? Verdict::Kind::Proven : Verdict::Kind::HoldsWithinBound;
        return v;
    };
    auto violated_at = [&](int node) {
        v.kind = Verdict::Kind::Violated;
        CounterexampleTrace t;
        t.property = p.name;
        t.steps = stem_to(eng, gr, node);
        v.trace = std::move(t);
        return v;
    };

    const LtlPtr& f = p.formula;

    // propositional: evaluated at the initial state
    if (is_prop(f)) {
        logic::ExprPtr e = prop_expr(f);
        if (!holds(e, 0)) return violated_at(0);
        v.kind = Verdict::Kind::Proven;
        return v;
    }

    if (f->kind == Ltl::Kind::G) {
        const LtlPtr& body = f->kids[0];
        if (is_prop(body)) {
            // safety: BFS order gives the minimal counterexample
            logic::ExprPtr e = prop_expr(body);
            for (std::size_t i = 0; i < gr.nodes.size(); ++i)
                if (!holds(e, static_cast<int>(i))) return violated_at(static_cast<int>(i));
            return conclude_no_violation();
        }
        if (body->kind == Ltl::Kind::Implies && is_prop(body->kids[0])) {
            const LtlPtr& rhs = body->kids[1];
            logic::ExprPtr pre = prop_expr(body->kids[0]);
            if (rhs->kind == Ltl::Kind::X && is_prop(rhs->kids[0])) {
                logic::ExprPtr post = prop_expr(rhs->kids[0]);
                for (std::size_t u = 0; u < gr.nodes.size(); ++u) {
                    if (!holds(pre, static_cast<int>(u))) continue;
                    for (const auto& e : gr.adj[u]) {
                        if (!holds(post, e.to)) {
                            v.kind = Verdict::Kind::Violated;
                            CounterexampleTrace t;
                            t.property = p.name;
                            t.steps = stem_to(eng, gr, static_cast<int>(u));
                            t.steps.push_back(
                                step_of(eng, gr.nodes[e.to], e.action, e.fired));
                            v.trace = std::move(t);
                            return v;
                        }
                    }
                }
                return conclude_no_violation();
            }
            if (rhs->kind == Ltl::Kind::F && is_prop(rhs->kids[0])) {
                // response: a p-state with a q-avoiding lasso violates
                logic::ExprPtr q = prop_expr(rhs->kids[0]);
                std::vector<char> allowed(gr.nodes.size());
                for (std::size_t i = 0; i < gr.nodes.size(); ++i)
                    allowed[i] = !holds(q, static_cast<int>(i));
                for (std::size_t u = 0; u < gr.nodes.size(); ++u) {
                    if (!holds(pre, static_cast<int>(u)) || !allowed[u]) continue;
                    auto lasso = find_lasso(gr, allowed, static_cast<int>(u));
                    if (!lasso.empty()) {
                        v.kind = Verdict::Kind::Violated;
                        v.trace = lasso_trace(eng, gr, lasso, p.name);
                        return v;
                    }
                }
                return conclude_no_violation();
            }
        }
        throw UnsupportedProperty("unsupported G-body: " + ltl_to_string(f));
    }

    if (f->kind == Ltl::Kind::F && is_prop(f->kids[0])) {
        // liveness: violated by a reachable lasso avoiding the target
        logic::ExprPtr target = prop_expr(f->kids[0]);
        std::vector<char> allowed(gr.nodes.size());
        for (std::size_t i = 0; i < gr.nodes.size(); ++i)
            allowed[i] = !holds(target, static_cast<int>(i));
        auto lasso = find_lasso(gr, allowed, 0);
        if (!lasso.empty()) {
            v.kind = Verdict::Kind::Violated;
            v.trace = lasso_trace(eng, gr, lasso, p.name);
            return v;
        }
        return conclude_no_violation();
    }

    if (f->kind == Ltl::Kind::U && is_prop(f->kids[0]) && is_prop(f->kids[1])) {
        logic::ExprPtr hold = prop_expr(f->kids[0]);
        logic::ExprPtr until = prop_expr(f->kids[1]);
        // violated by: a !q-path on which p fails, or an all-(p & !q) lasso
        std::vector<char> allowed(gr.nodes.size());
        for (std::size_t i = 0; i < gr.nodes.size(); ++i)
            allowed[i] = !holds(until, static_cast<int>(i)) && holds(hold, static_cast<int>(i));
        if (!holds(until, 0) && !holds(hold, 0)) return violated_at(0);
        if (!holds(until, 0)) {
            // BFS within the allowed region for a !p & !q state; the witness
            // path must itself stay inside p & !q, so track local parents
            std::deque<int> q = {0};
            std::vector<char> seen(gr.nodes.size());
            seen[0] = 1;
            std::vector<const Edge*> via(gr.nodes.size(), nullptr);
            std::vector<int> from(gr.nodes.size(), -1);
            while (!q.empty()) {
                int u = q.front();
                q.pop_front();
                for (const auto& e : gr.adj[u]) {
                    if (seen[e.to]) continue;
                    seen[e.to] = 1;
                    via[e.to] = &e;
                    from[e.to] = u;
                    if (!holds(until, e.to) && !holds(hold, e.to)) {
                        std::vector<const Edge*> path;
                        for (int x = e.to; from[x] != -1; x = from[x]) path.push_back(via[x]);
                        std::reverse(path.begin(), path.end());
                        v.kind = Verdict::Kind::Violated;
                        CounterexampleTrace t;
                        t.property = p.name;
                        t.steps.push_back(step_of(eng, gr.nodes[0], "", {}));
                        for (const Edge* pe : path)
                            t.steps.push_back(
                                step_of(eng, gr.nodes[pe->to], pe->action, pe->fired));
                        v.trace = std::move(t);
                        return v;
                    }
                    if (allowed[e.to]) q.push_back(e.to);
                }
            }
            auto lasso = find_lasso(gr, allowed, 0);
            if (!lasso.empty()) {
                v.kind = Verdict::Kind::Violated;
                v.trace = lasso_trace(eng, gr, lasso, p.name);
                return v;
            }
        }
        return conclude_no_violation();
    }

    throw UnsupportedProperty("unsupported property shape: " + ltl_to_string(f));
}

bool validate_trace(const fsm::Model& m, const AdversaryConfig& cfg,
                    const CounterexampleTrace& trace) {
    if (trace.steps.empty()) return false;
    Engine eng(m, cfg);
    GlobalState cur = eng.initial();
    if (cur.fsm_states != trace.steps[0].fsm_states || cur.store != trace.steps[0].store)
        return false;
    for (std::size_t i = 1; i < trace.steps.size(); ++i) {
        const TraceStep& want = trace.steps[i];
        bool found = false;
        for (auto& succ : eng.successors(cur)) {
            if (succ.state.fsm_states == want.fsm_states && succ.state.store == want.store &&
                succ.action == want.adversary_action) {
                cur = succ.state;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Transpiler

namespace {

std::string smv_value(const logic::Value& v) {
    switch (v.kind) {
        case logic::Value::Kind::Bool: return v.bval ? "TRUE" : "FALSE";
        case logic::Value::Kind::Symbol: return v.sym;
        case logic::Value::Kind::Int: return std::to_string(v.ival);
    }
    return "?";
}

void smv_expr(const logic::ExprPtr& e, std::ostream& os) {
    using logic::BoolExpr;
    switch (e->kind) {
        case BoolExpr::Kind::True: os << "TRUE"; return;
        case BoolExpr::Kind::False: os << "FALSE"; return;
        case BoolExpr::Kind::Atom:
            os << e->atom.var;
            if (!(e->atom.cmp == logic::Cmp::Eq &&
                  e->atom.value.kind == logic::Value::Kind::Bool && e->atom.value.bval))
                os << " " << logic::cmp_to_string(e->atom.cmp) << " "
                   << smv_value(e->atom.value);
            return;
        case BoolExpr::Kind::Not:
            os << "!(";
            smv_expr(e->kids[0], os);
            os << ")";
            return;
        case BoolExpr::Kind::And:
        case BoolExpr::Kind::Or: {
            os << "(";
            for (std::size_t i = 0; i < e->kids.size(); ++i) {
                if (i) os << (e->kind == BoolExpr::Kind::And ? " & " : " | ");
                smv_expr(e->kids[i], os);
            }
            os << ")";
            return;
        }
    }
}

std::string state_var(const std::string& participant) {
    std::string name = "state_" + participant;
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return name;
}

}  // namespace

std::string transpile_smv(const fsm::Model& m) {
    if (m.fsms.empty()) throw CheckerError("empty model");
    for (const auto& v : m.vars)
        if (v.kind == fsm::VarDecl::Kind::Int && v.hi < v.lo)
            throw UnboundedDomain("variable " + v.name + " has no finite bounds");

    std::ostringstream os;
    os << "-- synchronous composition; channel consumption handled by the\n"
          "-- built-in checker is approximated here by explicit guards\n";
    os << "MODULE main\n";
    os << "VAR\n";
    for (const auto& f : m.fsms) {
        os << "  " << state_var(f.participant) << " : {";
        for (std::size_t i = 0; i < f.states.size(); ++i) {
            if (i) os << ", ";
            os << f.states[i];
        }
        os << "};\n";
    }
    for (const auto& v : m.vars) {
        os << "  " << v.name << " : ";
        switch (v.kind) {
            case fsm::VarDecl::Kind::Bool: os << "boolean"; break;
            case fsm::VarDecl::Kind::Enum: {
                os << "{";
                for (std::size_t i = 0; i < v.values.size(); ++i) {
                    if (i) os << ", ";
                    os << v.values[i];
                }
                os << "}";
                break;
            }
            case fsm::VarDecl::Kind::Int: os << v.lo << ".." << v.hi; break;
        }
        os << ";\n";
    }
    os << "ASSIGN\n";
    for (const auto& f : m.fsms)
        if (!f.initial.empty())
            os << "  init(" << state_var(f.participant) << ") := " << f.initial << ";\n";
    for (const auto& v : m.vars) {
        if (v.nondet) continue;  // unconstrained input: no init, no next
        os << "  init(" << v.name << ") := " << smv_value(v.init) << ";\n";
    }
    // next-state relations
    for (const auto& f : m.fsms) {
        os << "  next(" << state_var(f.participant) << ") := case\n";
        for (const auto& t : f.transitions) {
            os << "    ";
            if (t.s_i != fsm::kWildcardState)
                os << state_var(f.participant) << " = " << t.s_i << " & ";
            smv_expr(t.condition, os);
            os << " : "
               << (t.s_f == fsm::kWildcardState ? state_var(f.participant) : t.s_f) << ";\n";
        }
        os << "    TRUE : " << state_var(f.participant) << ";\n";
        os << "  esac;\n";
    }
    // per-variable next from the actions that write it, in model order
    for (const auto& v : m.vars) {
        if (v.nondet) continue;
        std::ostringstream arms;
        for (const auto& f : m.fsms) {
            for (const auto& t : f.transitions) {
                for (const auto& a : t.actions) {
                    if (a.var != v.name) continue;
                    arms << "    ";
                    if (t.s_i != fsm::kWildcardState)
                        arms << state_var(f.participant) << " = " << t.s_i << " & ";
                    smv_expr(t.condition, arms);
                    arms << " : ";
                    switch (a.rhs) {
                        case dsl::Assignment::Rhs::Value: arms << smv_value(a.value); break;
                        case dsl::Assignment::Rhs::Increment:
                            arms << "min(" << v.name << " + 1, " << v.hi << ")";
                            break;
                        case dsl::Assignment::Rhs::Decrement:
                            arms << "max(" << v.name << " - 1, " << v.lo << ")";
                            break;
                    }
                    arms << ";\n";
                }
            }
        }
        std::string body = arms.str();
        if (body.empty()) continue;
        os << "  next(" << v.name << ") := case\n"
           << body << "    TRUE : " << v.name << ";\n  esac;\n";
    }
    os << "-- LTLSPEC properties are supplied separately\n";
    return os.str();
}

std::string render_trace(const CounterexampleTrace& t, bool full_state) {
    std::ostringstream os;
    os << "property " << t.property << " violated; trace (" << t.steps.size() << " steps";
    if (t.loop_start) os << ", loop at step " << *t.loop_start;
    os << "):\n";
    const TraceStep* prev = nullptr;
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const TraceStep& s = t.steps[i];
        os << "step " << i;
        if (!s.adversary_action.empty()) os << " [" << s.adversary_action << "]";
        os << ":";
        for (std::size_t k = 0; k < s.fsm_states.size(); ++k) {
            if (!prev || prev->fsm_states[k] != s.fsm_states[k] || full_state)
                os << " @" << s.fsm_states[k];
        }
        for (const auto& [name, val] : s.store) {
            if (full_state || !prev || !prev->store.count(name) ||
                !(prev->store.at(name) == val))
                os << " " << name << "=" << val.to_string();
        }
        os << "\n";
        for (const auto& fired : s.fired) os << "    fired: " << fired << "\n";
        prev = &s;
    }
    return os.str();
}

}  // namespace specfsm::checker
