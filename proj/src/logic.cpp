#include "specfsm/logic.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace specfsm::logic {

std::string cmp_to_string(Cmp c) {
    switch (c) {
        case Cmp::Eq: return "=";
        case Cmp::Lt: return "<";
        case Cmp::Le: return "<=";
        case Cmp::Gt: return ">";
        case Cmp::Ge: return ">=";
    }
    return "?";
}

bool Value::operator==(const Value& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
        case Kind::Bool: return bval == o.bval;
        case Kind::Symbol: return sym == o.sym;
        case Kind::Int: return ival == o.ival;
    }
    return false;
}

bool Value::operator<(const Value& o) const {
    if (kind != o.kind) return kind < o.kind;
    switch (kind) {
        case Kind::Bool: return bval < o.bval;
        case Kind::Symbol: return sym < o.sym;
        case Kind::Int: return ival < o.ival;
    }
    return false;
}

std::string Value::to_string() const {
    switch (kind) {
        case Kind::Bool: return bval ? "TRUE" : "FALSE";
        case Kind::Symbol: return sym;
        case Kind::Int: return std::to_string(ival);
    }
    return "?";
}

bool Atom::operator==(const Atom& o) const {
    return var == o.var && cmp == o.cmp && value == o.value;
}

bool Atom::operator<(const Atom& o) const {
    if (var != o.var) return var < o.var;
    if (cmp != o.cmp) return cmp < o.cmp;
    return value < o.value;
}

std::string Atom::canonical() const {
    return var + " " + cmp_to_string(cmp) + " " + value.to_string();
}

std::string Atom::to_string() const {
    if (cmp == Cmp::Eq && value.kind == Value::Kind::Bool && value.bval) return var;
    return var + " " + cmp_to_string(cmp) + " " + value.to_string();
}

std::string Literal::to_string() const {
    if (!negated) return atom.to_string();
    if (atom.cmp == Cmp::Eq && atom.value.kind == Value::Kind::Bool && atom.value.bval)
        return "!" + atom.var;
    return "!(" + atom.to_string() + ")";
}

ExprPtr mk_true() {
    static ExprPtr t = std::make_shared<BoolExpr>(BoolExpr{BoolExpr::Kind::True, {}, {}});
    return t;
}

ExprPtr mk_false() {
    static ExprPtr f = std::make_shared<BoolExpr>(BoolExpr{BoolExpr::Kind::False, {}, {}});
    return f;
}

ExprPtr mk_atom(Atom a) {
    return std::make_shared<BoolExpr>(BoolExpr{BoolExpr::Kind::Atom, std::move(a), {}});
}

ExprPtr mk_bool_var(const std::string& name) {
    return mk_atom(Atom{name, Cmp::Eq, Value::boolean(true)});
}

ExprPtr mk_eq(const std::string& var, Value v) {
    return mk_atom(Atom{var, Cmp::Eq, std::move(v)});
}

ExprPtr mk_not(ExprPtr e) {
    return std::make_shared<BoolExpr>(BoolExpr{BoolExpr::Kind::Not, {}, {std::move(e)}});
}

ExprPtr mk_and(std::vector<ExprPtr> kids) {
    if (kids.empty()) return mk_true();
    if (kids.size() == 1) return kids.front();
    return std::make_shared<BoolExpr>(BoolExpr{BoolExpr::Kind::And, {}, std::move(kids)});
}

ExprPtr mk_or(std::vector<ExprPtr> kids) {
    if (kids.empty()) return mk_false();
    if (kids.size() == 1) return kids.front();
    return std::make_shared<BoolExpr>(BoolExpr{BoolExpr::Kind::Or, {}, std::move(kids)});
}

ExprPtr mk_and(ExprPtr a, ExprPtr b) { return mk_and(std::vector<ExprPtr>{std::move(a), std::move(b)}); }
ExprPtr mk_or(ExprPtr a, ExprPtr b) { return mk_or(std::vector<ExprPtr>{std::move(a), std::move(b)}); }

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    if (a->kind == BoolExpr::Kind::Atom && !(a->atom == b->atom)) return false;
    if (a->kids.size() != b->kids.size()) return false;
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (!expr_equal(a->kids[i], b->kids[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Lexer {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) pos++;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            pos++;
            return true;
        }
        return false;
    }

    bool eat_word(std::string_view w) {
        skip_ws();
        if (text.substr(pos, w.size()) == w) {
            pos += w.size();
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    // identifiers may contain letters, digits, '_', '.', '#'
    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size()) {
            char c = text[pos];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '#')
                pos++;
            else
                break;
        }
        if (start == pos) throw ParseError("expected identifier at offset " + std::to_string(pos));
        return std::string(text.substr(start, pos - start));
    }
};

Value parse_value(Lexer& lx) {
    lx.skip_ws();
    bool neg = false;
    std::size_t save = lx.pos;
    if (lx.pos < lx.text.size() && lx.text[lx.pos] == '-') {
        neg = true;
        lx.pos++;
    }
    if (lx.pos < lx.text.size() && std::isdigit(static_cast<unsigned char>(lx.text[lx.pos]))) {
        std::int64_t v = 0;
        while (lx.pos < lx.text.size() && std::isdigit(static_cast<unsigned char>(lx.text[lx.pos])))
            v = v * 10 + (lx.text[lx.pos++] - '0');
        return Value::integer(neg ? -v : v);
    }
    lx.pos = save;
    std::string id = lx.ident();
    if (id == "TRUE") return Value::boolean(true);
    if (id == "FALSE") return Value::boolean(false);
    return Value::symbol(id);
}

ExprPtr parse_or(Lexer& lx);

ExprPtr parse_primary(Lexer& lx) {
    if (lx.eat('!')) return mk_not(parse_primary(lx));
    if (lx.eat('(')) {
        ExprPtr e = parse_or(lx);
        if (!lx.eat(')')) throw ParseError("missing ')'");
        return e;
    }
    // "assert" prefix and the sigma store accessor are dump decoration.
    std::string var;
    if (lx.eat_word("\xCF\x83[") || lx.eat_word("sigma[")) {
        var = lx.ident();
        if (!lx.eat(']')) throw ParseError("missing ']'");
    } else {
        var = lx.ident();
        if (var == "assert") return parse_primary(lx);
    }
    if (var == "TRUE") return mk_true();
    if (var == "FALSE") return mk_false();
    Cmp cmp;
    if (lx.eat_word("<=")) cmp = Cmp::Le;
    else if (lx.eat_word(">=")) cmp = Cmp::Ge;
    else if (lx.eat('<')) cmp = Cmp::Lt;
    else if (lx.eat('>')) cmp = Cmp::Gt;
    else if (lx.eat('=')) cmp = Cmp::Eq;
    else return mk_bool_var(var);
    return mk_atom(Atom{var, cmp, parse_value(lx)});
}

ExprPtr parse_and(Lexer& lx) {
    std::vector<ExprPtr> kids{parse_primary(lx)};
    while (lx.eat('&')) kids.push_back(parse_primary(lx));
    return mk_and(std::move(kids));
}

ExprPtr parse_or(Lexer& lx) {
    std::vector<ExprPtr> kids{parse_and(lx)};
    while (lx.eat('|')) kids.push_back(parse_and(lx));
    return mk_or(std::move(kids));
}

}  // namespace

ExprPtr parse_expr(const std::string& text) {
    Lexer lx{text};
    ExprPtr e = parse_or(lx);
    lx.skip_ws();
    if (lx.pos != lx.text.size())
        throw ParseError("trailing input at offset " + std::to_string(lx.pos) + " in: " + text);
    return e;
}

namespace {

void print_expr(const ExprPtr& e, std::ostream& os, int parent_prec) {
    // precedence: or=1, and=2, not/atom=3
    switch (e->kind) {
        case BoolExpr::Kind::True: os << "TRUE"; return;
        case BoolExpr::Kind::False: os << "FALSE"; return;
        case BoolExpr::Kind::Atom: os << e->atom.to_string(); return;
        case BoolExpr::Kind::Not:
            os << "!";
            if (e->kids[0]->kind == BoolExpr::Kind::Atom &&
                e->kids[0]->atom.to_string() == e->kids[0]->atom.var) {
                os << e->kids[0]->atom.var;
            } else {
                os << "(";
                print_expr(e->kids[0], os, 0);
                os << ")";
            }
            return;
        case BoolExpr::Kind::And:
        case BoolExpr::Kind::Or: {
            int prec = e->kind == BoolExpr::Kind::And ? 2 : 1;
            bool paren = prec < parent_prec;
            if (paren) os << "(";
            for (std::size_t i = 0; i < e->kids.size(); ++i) {
                if (i) os << (e->kind == BoolExpr::Kind::And ? " & " : " | ");
                print_expr(e->kids[i], os, prec);
            }
            if (paren) os << ")";
            return;
        }
    }
}

}  // namespace

std::string to_string(const ExprPtr& e) {
    std::ostringstream os;
    print_expr(e, os, 0);
    return os.str();
}

// ---------------------------------------------------------------------------
// Finite-domain enumeration

void Alphabet::observe_atom(const Atom& a) {
    auto& dom = domains_[a.var];
    dom.insert(a.value);
    if (a.value.kind == Value::Kind::Int) {
        // neighbours so every comparison region has a representative
        dom.insert(Value::integer(a.value.ival - 1));
        dom.insert(Value::integer(a.value.ival + 1));
    }
}

void Alphabet::observe(const ExprPtr& e) {
    if (!e) return;
    if (e->kind == BoolExpr::Kind::Atom) observe_atom(e->atom);
    for (const auto& k : e->kids) observe(k);
}

std::vector<std::pair<std::string, std::vector<Value>>> domain_table(const Alphabet& a) {
    std::vector<std::pair<std::string, std::vector<Value>>> table;
    for (const auto& [var, dom] : a.domains_) {
        std::vector<Value> values;
        bool has_bool = false, has_sym = false, has_int = false;
        for (const auto& v : dom) {
            has_bool |= v.kind == Value::Kind::Bool;
            has_sym |= v.kind == Value::Kind::Symbol;
            has_int |= v.kind == Value::Kind::Int;
        }
        if (has_bool && !has_sym && !has_int) {
            values = {Value::boolean(false), Value::boolean(true)};
        } else {
            for (const auto& v : dom)
                if (v.kind != Value::Kind::Bool) values.push_back(v);
            // "none of the mentioned values" representative
            values.push_back(Value::symbol("\x01other"));
            if (has_bool) {
                // mixed use (e.g. x and x = msg) -- booleans fold into symbols
                values.push_back(Value::boolean(true));
                values.push_back(Value::boolean(false));
            }
        }
        table.emplace_back(var, std::move(values));
    }
    return table;
}

void Alphabet::enumerate(const std::function<bool(const std::map<std::string, Value>&)>& fn) const {
    auto table = domain_table(*this);
    std::map<std::string, Value> assignment;
    std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
        if (i == table.size()) return fn(assignment);
        for (const auto& v : table[i].second) {
            assignment[table[i].first] = v;
            if (!rec(i + 1)) return false;
        }
        return true;
    };
    rec(0);
}

void Alphabet::check_limit(std::size_t max_atoms) const {
    if (domains_.size() > max_atoms)
        throw BlowupLimit("expression references " + std::to_string(domains_.size()) +
                          " variables, limit " + std::to_string(max_atoms));
}

namespace {

bool eval_atom(const Atom& a, const std::map<std::string, Value>& assignment) {
    auto it = assignment.find(a.var);
    if (it == assignment.end()) return false;
    const Value& v = it->second;
    switch (a.cmp) {
        case Cmp::Eq: return v == a.value;
        case Cmp::Lt: return v.kind == Value::Kind::Int && a.value.kind == Value::Kind::Int && v.ival < a.value.ival;
        case Cmp::Le: return v.kind == Value::Kind::Int && a.value.kind == Value::Kind::Int && v.ival <= a.value.ival;
        case Cmp::Gt: return v.kind == Value::Kind::Int && a.value.kind == Value::Kind::Int && v.ival > a.value.ival;
        case Cmp::Ge: return v.kind == Value::Kind::Int && a.value.kind == Value::Kind::Int && v.ival >= a.value.ival;
    }
    return false;
}

}  // namespace

bool eval_expr(const ExprPtr& e, const std::map<std::string, Value>& assignment) {
    switch (e->kind) {
        case BoolExpr::Kind::True: return true;
        case BoolExpr::Kind::False: return false;
        case BoolExpr::Kind::Atom: return eval_atom(e->atom, assignment);
        case BoolExpr::Kind::Not: return !eval_expr(e->kids[0], assignment);
        case BoolExpr::Kind::And:
            for (const auto& k : e->kids)
                if (!eval_expr(k, assignment)) return false;
            return true;
        case BoolExpr::Kind::Or:
            for (const auto& k : e->kids)
                if (eval_expr(k, assignment)) return true;
            return false;
    }
    return false;
}

// ---------------------------------------------------------------------------
// DNF

bool term_satisfiable(const Term& t) {
    Alphabet alpha;
    for (const auto& lit : t) alpha.observe_atom(lit.atom);
    bool sat = false;
    alpha.enumerate([&](const std::map<std::string, Value>& a) {
        bool all = true;
        for (const auto& lit : t)
            if (eval_atom(lit.atom, a) == lit.negated) {
                all = false;
                break;
            }
        if (all) {
            sat = true;
            return false;
        }
        return true;
    });
    return sat;
}

namespace {

Term normalize_term(Term t) {
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

bool term_subset(const Term& a, const Term& b) {
    // true if every literal of a appears in b (then a subsumes b)
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<Term> dnf_rec(const ExprPtr& e, bool negated, const Limits& limits) {
    switch (e->kind) {
        case BoolExpr::Kind::True:
            return negated ? std::vector<Term>{} : std::vector<Term>{Term{}};
        case BoolExpr::Kind::False:
            return negated ? std::vector<Term>{Term{}} : std::vector<Term>{};
        case BoolExpr::Kind::Atom:
            return {Term{Literal{e->atom, negated}}};
        case BoolExpr::Kind::Not:
            return dnf_rec(e->kids[0], !negated, limits);
        case BoolExpr::Kind::And:
        case BoolExpr::Kind::Or: {
            bool conj = (e->kind == BoolExpr::Kind::And) != negated;
            if (!conj) {
                std::vector<Term> result;
                for (const auto& k : e->kids) {
                    auto part = dnf_rec(k, negated, limits);
                    result.insert(result.end(), part.begin(), part.end());
                    if (result.size() > limits.max_terms)
                        throw BlowupLimit("DNF term count exceeds cap");
                }
                return result;
            }
            std::vector<Term> result{Term{}};
            for (const auto& k : e->kids) {
                auto part = dnf_rec(k, negated, limits);
                std::vector<Term> next;
                for (const auto& t1 : result)
                    for (const auto& t2 : part) {
                        Term merged = t1;
                        merged.insert(merged.end(), t2.begin(), t2.end());
                        next.push_back(std::move(merged));
                        if (next.size() > limits.max_terms)
                            throw BlowupLimit("DNF term count exceeds cap");
                    }
                result = std::move(next);
            }
            return result;
        }
    }
    return {};
}

}  // namespace

std::vector<Term> to_dnf(const ExprPtr& e, const Limits& limits) {
    Alphabet alpha;
    alpha.observe(e);
    alpha.check_limit(limits.max_atoms);

    std::vector<Term> raw = dnf_rec(e, false, limits);
    std::vector<Term> terms;
    for (auto& t : raw) {
        Term n = normalize_term(std::move(t));
        if (!term_satisfiable(n)) continue;
        if (std::find(terms.begin(), terms.end(), n) == terms.end()) terms.push_back(std::move(n));
    }
    // drop subsumed terms: a proper subset-term is more general and covers it
    std::vector<Term> kept;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        bool subsumed = false;
        for (std::size_t j = 0; j < terms.size() && !subsumed; ++j)
            subsumed = i != j && terms[j].size() < terms[i].size() && term_subset(terms[j], terms[i]);
        if (!subsumed) kept.push_back(terms[i]);
    }
    return kept;
}

ExprPtr dnf_to_expr(const std::vector<Term>& terms) {
    std::vector<ExprPtr> disjuncts;
    for (const auto& t : terms) {
        std::vector<ExprPtr> lits;
        for (const auto& lit : t) {
            ExprPtr a = mk_atom(lit.atom);
            lits.push_back(lit.negated ? mk_not(a) : a);
        }
        disjuncts.push_back(mk_and(std::move(lits)));
    }
    return mk_or(std::move(disjuncts));
}

bool satisfiable(const ExprPtr& e, const Limits& limits) {
    Alphabet alpha;
    alpha.observe(e);
    alpha.check_limit(limits.max_atoms);
    bool sat = false;
    alpha.enumerate([&](const std::map<std::string, Value>& a) {
        if (eval_expr(e, a)) {
            sat = true;
            return false;
        }
        return true;
    });
    return sat;
}

bool implies(const ExprPtr& a, const ExprPtr& b, const Limits& limits) {
    Alphabet alpha;
    alpha.observe(a);
    alpha.observe(b);
    alpha.check_limit(limits.max_atoms);
    bool holds = true;
    alpha.enumerate([&](const std::map<std::string, Value>& asn) {
        if (eval_expr(a, asn) && !eval_expr(b, asn)) {
            holds = false;
            return false;
        }
        return true;
    });
    return holds;
}

bool equivalent(const ExprPtr& a, const ExprPtr& b, const Limits& limits) {
    Alphabet alpha;
    alpha.observe(a);
    alpha.observe(b);
    alpha.check_limit(limits.max_atoms);
    bool holds = true;
    alpha.enumerate([&](const std::map<std::string, Value>& asn) {
        if (eval_expr(a, asn) != eval_expr(b, asn)) {
            holds = false;
            return false;
        }
        return true;
    });
    return holds;
}

}  // namespace specfsm::logic
