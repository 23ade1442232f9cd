#include "specfsm/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

namespace specfsm::dsl {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string part;
    while (std::getline(in, part, sep)) {
        part = trim(part);
        if (!part.empty()) out.push_back(part);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// RuleSet

void RuleSet::add(DslRule rule) {
    if (by_command_.count(rule.command))
        throw DuplicateCommand("duplicate DSL command: " + rule.command);
    if (rule.trigger_forms.empty())
        throw DslError("rule '" + rule.command + "' names no trigger verbs");
    by_command_[rule.command] = rules_.size();
    const std::string lemma = rule.trigger_forms.front();
    by_lemma_[lemma].push_back(rules_.size());
    rules_.push_back(std::move(rule));
}

const DslRule* RuleSet::find(const std::string& command) const {
    auto it = by_command_.find(command);
    return it == by_command_.end() ? nullptr : &rules_[it->second];
}

std::vector<const DslRule*> RuleSet::rules_for_lemma(const std::string& lemma) const {
    std::vector<const DslRule*> out;
    auto it = by_lemma_.find(lemma);
    if (it != by_lemma_.end())
        for (auto i : it->second) out.push_back(&rules_[i]);
    return out;
}

deptree::VerbLexicon RuleSet::verb_lexicon() const {
    deptree::VerbLexicon vl;
    for (const auto& r : rules_) {
        const std::string& lemma = r.trigger_forms.front();
        for (const auto& form : r.trigger_forms) vl.form_to_lemma[lower(form)] = lemma;
    }
    return vl;
}

RuleSet load_dsl_rules(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DslError("cannot open DSL rules file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_dsl_rules(ss.str(), path);
}

namespace {

SlotSpec parse_slot_spec(const std::string& text, const std::string& origin) {
    // name:type[@rel][:optional][:actor]
    SlotSpec spec;
    std::vector<std::string> parts = split(text, ':');
    if (parts.size() < 2) throw UnknownSlotType(origin + ": bad slot spec '" + text + "'");
    spec.name = parts[0];
    std::string type_part = parts[1];
    std::size_t at = type_part.find('@');
    if (at != std::string::npos) {
        std::string rel = type_part.substr(at + 1);
        type_part = type_part.substr(0, at);
        static const std::map<std::string, deptree::Rel> rels = {
            {"subject", deptree::Rel::Subject}, {"object", deptree::Rel::Object},
            {"prep", deptree::Rel::Prep},       {"modifier", deptree::Rel::Modifier},
            {"operand", deptree::Rel::Operand},
        };
        auto it = rels.find(rel);
        if (it == rels.end()) throw UnknownSlotType(origin + ": unknown relation '" + rel + "'");
        spec.preferred_rel = it->second;
    }
    if (type_part == "number" || type_part == "expression") {
        spec.type.is_number = true;
    } else {
        auto kt = lexicon::type_from_name(type_part);
        if (!kt) throw UnknownSlotType(origin + ": unknown slot type '" + type_part + "'");
        spec.type.keyword_type = kt;
    }
    for (std::size_t i = 2; i < parts.size(); ++i) {
        if (parts[i] == "optional") spec.optional = true;
        else if (parts[i] == "actor") spec.is_actor = true;
        else throw UnknownSlotType(origin + ": unknown slot flag '" + parts[i] + "'");
    }
    return spec;
}

}  // namespace

RuleSet parse_dsl_rules(const std::string& text, const std::string& origin) {
    RuleSet rs;
    std::istringstream in(text);
    std::string line;
    DslRule cur;
    bool open = false;
    auto flush = [&]() {
        if (open) rs.add(std::move(cur));
        cur = DslRule{};
        open = false;
    };
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t = trim(line);
        if (t.empty()) {
            flush();
            continue;
        }
        if (t[0] == '#') continue;
        std::size_t colon = t.find(':');
        if (colon == std::string::npos)
            throw DslError(origin + ":" + std::to_string(lineno) + ": expected 'key: value'");
        std::string key = trim(t.substr(0, colon));
        std::string value = trim(t.substr(colon + 1));
        std::string where = origin + ":" + std::to_string(lineno);
        if (key == "command") {
            flush();
            cur.command = value;
            open = true;
        } else if (!open) {
            throw DslError(where + ": '" + key + "' outside a command stanza");
        } else if (key == "verbs") {
            cur.trigger_forms = split(value, ',');
        } else if (key == "requires") {
            cur.requires_words = split(value, ',');
        } else if (key == "slots") {
            for (const auto& s : split(value, ',')) cur.slots.push_back(parse_slot_spec(s, where));
        } else if (key == "mode") {
            if (value == "condition") cur.condition_capable = true;
            else if (value == "action") cur.action_capable = true;
            else if (value == "both") cur.condition_capable = cur.action_capable = true;
            else throw DslError(where + ": unknown mode '" + value + "'");
        } else if (key == "condition") {
            cur.condition_template = value;
        } else if (key == "action") {
            cur.action_template = value;
        } else {
            throw DslError(where + ": unknown key '" + key + "'");
        }
    }
    flush();
    return rs;
}

// ---------------------------------------------------------------------------
// Slot values and AST

SlotValuePtr SlotValue::of(const lexicon::Keyword* kw) {
    auto v = std::make_shared<SlotValue>();
    v->kind = Kind::Keyword;
    v->keyword = kw;
    return v;
}

SlotValuePtr SlotValue::of_number(int n) {
    auto v = std::make_shared<SlotValue>();
    v->kind = Kind::Number;
    v->number = n;
    return v;
}

std::string SlotValue::to_string() const {
    switch (kind) {
        case Kind::Keyword: return keyword->id;
        case Kind::Number: return std::to_string(number);
        case Kind::And:
        case Kind::Or:
        case Kind::Not: {
            std::string out = kind == Kind::And ? "and(" : kind == Kind::Or ? "or(" : "not(";
            for (std::size_t i = 0; i < kids.size(); ++i) {
                if (i) out += ", ";
                out += kids[i]->to_string();
            }
            return out + ")";
        }
    }
    return "?";
}

std::string DslAst::to_string() const {
    std::string out = rule->command + "(";
    bool first = true;
    for (const auto& slot : rule->slots) {
        auto it = bindings.find(slot.name);
        if (it == bindings.end() || it->second->from_context) continue;
        if (!first) out += ", ";
        out += it->second->to_string();
        first = false;
    }
    return out + ")";
}

// ---------------------------------------------------------------------------
// Dependency tree -> AST

namespace {

struct Bindable {
    SlotValuePtr value;
    std::optional<lexicon::KeywordType> type;  // nullopt for numbers
    deptree::Rel rel = deptree::Rel::Object;
    bool used = false;
};

// first keyword type among descendants; groups are homogeneous in practice
std::optional<lexicon::KeywordType> group_type(const deptree::DepNode& n) {
    if (n.keyword) return n.keyword->type;
    for (const auto& c : n.children) {
        auto t = group_type(c);
        if (t) return t;
    }
    return std::nullopt;
}

SlotValuePtr node_to_value(const deptree::DepNode& n) {
    using deptree::Pos;
    if (n.pos == Pos::Connective || n.pos == Pos::Negation) {
        auto v = std::make_shared<SlotValue>();
        v->kind = n.pos == Pos::Negation ? SlotValue::Kind::Not
                  : n.token == "and"     ? SlotValue::Kind::And
                                         : SlotValue::Kind::Or;
        for (const auto& c : n.children) v->kids.push_back(node_to_value(c));
        return v;
    }
    if (n.keyword) return SlotValue::of(n.keyword);
    return nullptr;
}

void collect_bindables(const deptree::DepNode& n, std::vector<Bindable>& out, bool root) {
    using deptree::Pos;
    if (!root) {
        if (n.pos == Pos::Connective || n.pos == Pos::Negation) {
            if (!n.children.empty()) {
                Bindable b;
                b.value = node_to_value(n);
                b.type = group_type(n);
                b.rel = n.rel;
                out.push_back(std::move(b));
            }
            return;  // operands live inside the group
        }
        if (n.keyword) {
            Bindable b;
            b.value = SlotValue::of(n.keyword);
            b.type = n.keyword->type;
            b.rel = n.rel;
            out.push_back(std::move(b));
            // fall through: prepositional children may carry more keywords
        }
        if (n.number >= 0) {
            Bindable b;
            b.value = SlotValue::of_number(n.number);
            b.rel = n.rel;
            out.push_back(std::move(b));
        }
    }
    for (const auto& c : n.children) collect_bindables(c, out, false);
}

bool type_matches(const SlotSpec& spec, const Bindable& b) {
    if (spec.type.is_number) return !b.type.has_value() && b.value->kind == SlotValue::Kind::Number;
    if (!b.type) return false;
    if (*spec.type.keyword_type == *b.type) return true;
    // misc keywords satisfy variable/counter slots: mined candidates start as misc
    if (*b.type == lexicon::KeywordType::Misc &&
        (*spec.type.keyword_type == lexicon::KeywordType::Variable ||
         *spec.type.keyword_type == lexicon::KeywordType::Counter))
        return true;
    return false;
}

}  // namespace

DslAst map_to_ast(const deptree::DepNode& tree, const RuleSet& rules,
                  const std::vector<std::string>& span_words) {
    if (tree.pos != deptree::Pos::Verb)
        throw NoRuleForVerb("span root is not a verb: " + tree.token);

    std::vector<const DslRule*> candidates = rules.rules_for_lemma(tree.token);
    if (candidates.empty()) throw NoRuleForVerb("no DSL rule for verb '" + tree.token + "'");

    std::vector<std::string> words;
    words.reserve(span_words.size());
    for (const auto& w : span_words) words.push_back(lower(w));

    const DslRule* chosen = nullptr;
    std::size_t chosen_requires = 0;
    for (const DslRule* r : candidates) {
        bool ok = true;
        for (const auto& req : r->requires_words)
            if (std::find(words.begin(), words.end(), lower(req)) == words.end()) {
                ok = false;
                break;
            }
        if (!ok) continue;
        if (!chosen || r->requires_words.size() > chosen_requires) {
            chosen = r;
            chosen_requires = r->requires_words.size();
        }
    }
    if (!chosen) throw NoRuleForVerb("no DSL rule matches span for verb '" + tree.token + "'");

    std::vector<Bindable> bindables;
    // prepositional wrappers are flattened, keeping the Prep relation on the keyword
    std::function<void(const deptree::DepNode&)> walk = [&](const deptree::DepNode& n) {
        for (const auto& c : n.children) {
            if (c.pos == deptree::Pos::Preposition) {
                std::size_t before = bindables.size();
                for (const auto& gc : c.children) collect_bindables(gc, bindables, false);
                for (std::size_t i = before; i < bindables.size(); ++i)
                    bindables[i].rel = deptree::Rel::Prep;
                continue;
            }
            if (c.pos == deptree::Pos::Verb) {
                walk(c);  // secondary verb: its arguments stay available
                continue;
            }
            collect_bindables(c, bindables, false);
        }
    };
    walk(tree);
    if (tree.keyword) {
        Bindable b;
        b.value = SlotValue::of(tree.keyword);
        b.type = tree.keyword->type;
        b.rel = deptree::Rel::Root;
        bindables.push_back(std::move(b));
    }

    DslAst ast;
    ast.rule = chosen;
    // pass 1: preferred relation; pass 2: any position (position independence)
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& spec : chosen->slots) {
            if (ast.bindings.count(spec.name)) continue;
            for (auto& b : bindables) {
                if (b.used || !type_matches(spec, b)) continue;
                if (pass == 0 && spec.preferred_rel && b.rel != *spec.preferred_rel) continue;
                if (pass == 1 && spec.preferred_rel.has_value() &&
                    std::any_of(chosen->slots.begin(), chosen->slots.end(),
                                [&](const SlotSpec& other) {
                                    return other.name != spec.name && !ast.bindings.count(other.name) &&
                                           other.preferred_rel && b.rel == *other.preferred_rel &&
                                           type_matches(other, b);
                                }))
                    continue;  // leave it for the slot that prefers this relation
                ast.bindings[spec.name] = b.value;
                b.used = true;
                break;
            }
        }
    }
    return ast;
}

// ---------------------------------------------------------------------------
// Context resolution

std::string Context::channel_name(const std::string& src, const std::string& dst) const {
    auto key = std::make_pair(lower(src), lower(dst));
    auto it = channel_names.find(key);
    if (it != channel_names.end()) return it->second;
    return "chan_" + key.first + "_" + key.second;
}

const lexicon::Keyword* Context::other_agent(const lexicon::Lexicon& lex,
                                             const std::string& than) const {
    const lexicon::Keyword* found = nullptr;
    for (const auto* kw : lex.of_type(lexicon::KeywordType::Agent)) {
        if (lower(kw->id) == lower(than)) continue;
        if (found) return nullptr;  // ambiguous
        found = kw;
    }
    return found;
}

void resolve_context(DslAst& ast, const Context& ctx, const lexicon::Lexicon& lex,
                     std::vector<ResolutionLogEntry>* log) {
    auto already_bound = [&](const lexicon::Keyword* kw) {
        for (const auto& [name, v] : ast.bindings)
            if (v->kind == SlotValue::Kind::Keyword && v->keyword == kw) return true;
        return false;
    };
    auto note = [&](const SlotSpec& spec, const lexicon::Keyword* kw, const std::string& where) {
        if (log) log->push_back({ast.rule->command, spec.name, kw->id, where});
    };

    for (const auto& spec : ast.rule->slots) {
        if (ast.bindings.count(spec.name)) continue;
        if (spec.type.is_number) continue;  // numbers are never context-resolved
        const lexicon::Keyword* found = nullptr;
        std::string where;
        auto scan = [&](const std::vector<const lexicon::Keyword*>& kws) {
            for (const auto* kw : kws)
                if (kw->type == *spec.type.keyword_type && !already_bound(kw)) return kw;
            return static_cast<const lexicon::Keyword*>(nullptr);
        };
        if ((found = scan(ctx.block_keywords))) where = "block";
        if (!found && (found = scan(ctx.paragraph_keywords))) where = "paragraph";
        if (!found) {
            std::size_t depth = std::min(ctx.history.size(), ctx.backtrack_depth);
            for (std::size_t i = 0; i < depth && !found; ++i) {
                found = scan(ctx.history[i]);
                if (found) where = "history[" + std::to_string(i) + "]";
            }
        }
        if (!found && *spec.type.keyword_type == lexicon::KeywordType::Agent) {
            // an unbound agent slot usually means "the peer"
            for (const auto& [name, v] : ast.bindings) {
                if (v->kind != SlotValue::Kind::Keyword || !v->keyword) continue;
                if (v->keyword->type != lexicon::KeywordType::Agent) continue;
                found = ctx.other_agent(lex, v->keyword->id);
                if (found) {
                    where = "peer";
                    break;
                }
            }
            if (!found && !ctx.default_participant.empty()) {
                found = lex.find(ctx.default_participant);
                where = "default";
            }
        }
        if (!found) {
            if (spec.optional) continue;
            throw Unresolvable("slot '" + spec.name + "' of '" + ast.rule->command +
                               "' has no binding in context");
        }
        auto v = std::make_shared<SlotValue>();
        v->kind = SlotValue::Kind::Keyword;
        v->keyword = found;
        v->from_context = true;
        ast.bindings[spec.name] = v;
        note(spec, found, where);
    }
}

// ---------------------------------------------------------------------------
// Interpretation

bool Assignment::operator==(const Assignment& o) const {
    return var == o.var && rhs == o.rhs && value == o.value;
}

std::string Assignment::to_string() const {
    switch (rhs) {
        case Rhs::Value: return var + " = " + value.to_string();
        case Rhs::Increment: return var + " = " + var + " + 1";
        case Rhs::Decrement: return var + " = " + var + " - 1";
    }
    return "?";
}

std::string Assignment::to_ir_dump() const {
    switch (rhs) {
        case Rhs::Value: return var + " := " + value.to_string();
        case Rhs::Increment: return var + " := " + var + " + 1";
        case Rhs::Decrement: return var + " := " + var + " - 1";
    }
    return "?";
}

Assignment Assignment::parse(const std::string& text) {
    std::size_t op = text.find(":=");
    std::size_t skip = 2;
    if (op == std::string::npos) {
        op = text.find('=');
        skip = 1;
    }
    if (op == std::string::npos) throw DslError("bad assignment: " + text);
    Assignment a;
    a.var = trim(text.substr(0, op));
    std::string rhs = trim(text.substr(op + skip));
    if (rhs == a.var + " + 1" || rhs == "+1") {
        a.rhs = Rhs::Increment;
    } else if (rhs == a.var + " - 1" || rhs == "-1") {
        a.rhs = Rhs::Decrement;
    } else if (rhs == "TRUE") {
        a.value = logic::Value::boolean(true);
    } else if (rhs == "FALSE") {
        a.value = logic::Value::boolean(false);
    } else if (!rhs.empty() &&
               std::all_of(rhs.begin(), rhs.end(), [](unsigned char c) { return std::isdigit(c); })) {
        a.value = logic::Value::integer(std::stoll(rhs));
    } else if (!rhs.empty()) {
        a.value = logic::Value::symbol(rhs);
    } else {
        throw DslError("bad assignment rhs: " + text);
    }
    return a;
}

std::string IrFormula::to_string() const {
    std::string out;
    if (condition) out += logic::to_string(condition);
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (!out.empty() || i) out += i || condition ? ", " : "";
        out += actions[i].to_string();
    }
    return out;
}

namespace {

void dump_expr(const logic::ExprPtr& e, std::ostream& os, int parent_prec) {
    using logic::BoolExpr;
    switch (e->kind) {
        case BoolExpr::Kind::True: os << "TRUE"; return;
        case BoolExpr::Kind::False: os << "FALSE"; return;
        case BoolExpr::Kind::Atom: {
            const auto& a = e->atom;
            os << "assert \xCF\x83[" << a.var << "]";
            if (!(a.cmp == logic::Cmp::Eq && a.value.kind == logic::Value::Kind::Bool &&
                  a.value.bval))
                os << " " << logic::cmp_to_string(a.cmp) << " " << a.value.to_string();
            return;
        }
        case BoolExpr::Kind::Not:
            os << "!(";
            dump_expr(e->kids[0], os, 0);
            os << ")";
            return;
        case BoolExpr::Kind::And:
        case BoolExpr::Kind::Or: {
            int prec = e->kind == BoolExpr::Kind::And ? 2 : 1;
            bool paren = prec < parent_prec;
            if (paren) os << "(";
            for (std::size_t i = 0; i < e->kids.size(); ++i) {
                if (i) os << (e->kind == BoolExpr::Kind::And ? " & " : " | ");
                dump_expr(e->kids[i], os, prec);
            }
            if (paren) os << ")";
            return;
        }
    }
}

}  // namespace

std::string IrFormula::to_ir_dump() const {
    std::ostringstream os;
    if (condition) dump_expr(condition, os, 0);
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (condition || i) os << ", ";
        os << actions[i].to_ir_dump();
    }
    return os.str();
}

namespace {

std::string value_text(const SlotValuePtr& v, bool lowercase) {
    if (v->kind == SlotValue::Kind::Keyword)
        return lowercase ? lower(v->keyword->id) : v->keyword->id;
    if (v->kind == SlotValue::Kind::Number) return std::to_string(v->number);
    throw DslError("logical slot group where a single value is required");
}

// Substitutes {slot} placeholders; drops [...] sections containing unbound
// slots; resolves chan_{a}_{b} through the channel naming table.
std::string instantiate(const std::string& tmpl,
                        const std::map<std::string, SlotValuePtr>& bindings,
                        const Context& ctx, const DslRule& rule) {
    std::string out;
    std::size_t i = 0;
    while (i < tmpl.size()) {
        char c = tmpl[i];
        if (c == '[') {
            std::size_t close = tmpl.find(']', i);
            if (close == std::string::npos) throw DslError("unbalanced '[' in template");
            std::string section = tmpl.substr(i + 1, close - i - 1);
            bool complete = true;
            std::size_t p = 0;
            while ((p = section.find('{', p)) != std::string::npos) {
                std::size_t q = section.find('}', p);
                if (q == std::string::npos) break;
                if (!bindings.count(section.substr(p + 1, q - p - 1))) {
                    complete = false;
                    break;
                }
                p = q + 1;
            }
            if (complete) out += instantiate(section, bindings, ctx, rule);
            i = close + 1;
            continue;
        }
        if (tmpl.compare(i, 6, "chan_{") == 0) {
            std::size_t e1 = tmpl.find('}', i + 6);
            if (e1 != std::string::npos && tmpl.compare(e1 + 1, 2, "_{") == 0) {
                std::size_t e2 = tmpl.find('}', e1 + 3);
                if (e2 != std::string::npos) {
                    std::string s1 = tmpl.substr(i + 6, e1 - i - 6);
                    std::string s2 = tmpl.substr(e1 + 3, e2 - e1 - 3);
                    auto i1 = bindings.find(s1);
                    auto i2 = bindings.find(s2);
                    if (i1 == bindings.end())
                        throw MissingRequiredSlot(rule.command, s1);
                    if (i2 == bindings.end())
                        throw MissingRequiredSlot(rule.command, s2);
                    out += ctx.channel_name(value_text(i1->second, true),
                                            value_text(i2->second, true));
                    i = e2 + 1;
                    continue;
                }
            }
        }
        if (c == '{') {
            std::size_t close = tmpl.find('}', i);
            if (close == std::string::npos) throw DslError("unbalanced '{' in template");
            std::string name = tmpl.substr(i + 1, close - i - 1);
            auto it = bindings.find(name);
            if (it == bindings.end()) throw MissingRequiredSlot(rule.command, name);
            out += value_text(it->second, false);
            i = close + 1;
            continue;
        }
        out += c;
        i++;
    }
    return out;
}

// expands logical slot groups into formula-level connectives
logic::ExprPtr interpret_condition(const std::string& tmpl,
                                   std::map<std::string, SlotValuePtr> bindings,
                                   const Context& ctx, const DslRule& rule) {
    for (const auto& [name, v] : bindings) {
        if (v->kind == SlotValue::Kind::Keyword || v->kind == SlotValue::Kind::Number) continue;
        std::vector<logic::ExprPtr> parts;
        for (const auto& kid : v->kids) {
            auto sub = bindings;
            sub[name] = kid;
            parts.push_back(interpret_condition(tmpl, sub, ctx, rule));
        }
        switch (v->kind) {
            case SlotValue::Kind::And: return logic::mk_and(std::move(parts));
            case SlotValue::Kind::Or: return logic::mk_or(std::move(parts));
            case SlotValue::Kind::Not: return logic::mk_not(parts.at(0));
            default: break;
        }
    }
    return logic::parse_expr(instantiate(tmpl, bindings, ctx, rule));
}

}  // namespace

IrFormula interpret_ast(const DslAst& ast, Mode mode, const Context& ctx) {
    const DslRule& rule = *ast.rule;
    IrFormula ir;
    if (mode == Mode::Condition) {
        if (!rule.condition_capable || rule.condition_template.empty())
            throw ModeUnsupported("rule '" + rule.command + "' is not condition-capable");
        ir.condition = interpret_condition(rule.condition_template, ast.bindings, ctx, rule);
    } else {
        if (!rule.action_capable || rule.action_template.empty())
            throw ModeUnsupported("rule '" + rule.command + "' is not action-capable");
        std::string text = instantiate(rule.action_template, ast.bindings, ctx, rule);
        for (const auto& part : split(text, ','))
            ir.actions.push_back(Assignment::parse(part));
    }
    return ir;
}

logic::ExprPtr apply_directives(const std::vector<std::string>& span_tokens,
                                logic::ExprPtr condition,
                                const deptree::VerbLexicon& verbs,
                                DirectiveCounter& counter) {
    for (const auto& tok : span_tokens) {
        if (verbs.weak_modals.count(lower(tok))) {
            std::string name = "nd_b" + std::to_string(counter.block_index) + "_" +
                               std::to_string(counter.next++);
            counter.declared.push_back(name);
            logic::ExprPtr nd = logic::mk_bool_var(name);
            return condition ? logic::mk_and(condition, nd) : nd;
        }
    }
    return condition;
}

}  // namespace specfsm::dsl
