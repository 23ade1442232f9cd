#ifndef SPECFSM_LOGIC_HPP
#define SPECFSM_LOGIC_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

// Propositional engine over finite-domain atoms. Enumeration variables obey
// at-most-one semantics: x = A and x = B cannot hold together for A != B.

namespace specfsm::logic {

class BlowupLimit : public std::runtime_error {
public:
    explicit BlowupLimit(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

enum class Cmp { Eq, Lt, Le, Gt, Ge };

std::string cmp_to_string(Cmp c);

// Atom value: boolean literal, enumeration symbol, or integer.
struct Value {
    enum class Kind { Bool, Symbol, Int };
    Kind kind = Kind::Bool;
    bool bval = true;
    std::string sym;
    std::int64_t ival = 0;

    static Value boolean(bool b) { return Value{Kind::Bool, b, "", 0}; }
    static Value symbol(std::string s) { return Value{Kind::Symbol, true, std::move(s), 0}; }
    static Value integer(std::int64_t i) { return Value{Kind::Int, true, "", i}; }

    bool operator==(const Value& o) const;
    bool operator<(const Value& o) const;
    std::string to_string() const;
};

struct Atom {
    std::string var;
    Cmp cmp = Cmp::Eq;
    Value value = Value::boolean(true);

    bool operator==(const Atom& o) const;
    bool operator<(const Atom& o) const;
    // Canonical key used for metric matching: "var cmp value" with x ==
    // "x = TRUE" and !x handled by the caller as "x = FALSE".
    std::string canonical() const;
    std::string to_string() const;
};

struct BoolExpr;
using ExprPtr = std::shared_ptr<const BoolExpr>;

struct BoolExpr {
    enum class Kind { True, False, Atom, And, Or, Not };
    Kind kind = Kind::True;
    logic::Atom atom;
    std::vector<ExprPtr> kids;
};

ExprPtr mk_true();
ExprPtr mk_false();
ExprPtr mk_atom(Atom a);
ExprPtr mk_bool_var(const std::string& name);
ExprPtr mk_eq(const std::string& var, Value v);
ExprPtr mk_not(ExprPtr e);
ExprPtr mk_and(std::vector<ExprPtr> kids);
ExprPtr mk_or(std::vector<ExprPtr> kids);
ExprPtr mk_and(ExprPtr a, ExprPtr b);
ExprPtr mk_or(ExprPtr a, ExprPtr b);

bool expr_equal(const ExprPtr& a, const ExprPtr& b);  // structural

// Text syntax: atoms `x`, `x = v`, `x < 3`, `x <= 3`, `x > 3`, `x >= 3`,
// operators `!`, `&`, `|`, parentheses, constants TRUE/FALSE.
// `σ[x]` and `assert` are accepted and ignored so IR dumps parse back.
ExprPtr parse_expr(const std::string& text);
std::string to_string(const ExprPtr& e);

struct Literal {
    Atom atom;
    bool negated = false;
    bool operator==(const Literal& o) const { return negated == o.negated && atom == o.atom; }
    bool operator<(const Literal& o) const {
        if (atom < o.atom) return true;
        if (o.atom < atom) return false;
        return negated < o.negated;
    }
    std::string to_string() const;
};

using Term = std::vector<Literal>;  // conjunction, kept sorted and deduplicated

struct Limits {
    std::size_t max_atoms = 24;   // N_max
    std::size_t max_terms = 4096; // DNF term cap
};

// Finite-domain assignment enumeration. Each variable gets one multi-valued
// assignment drawn from the values observed in the expressions plus a
// fresh "other" representative.
class Alphabet {
public:
    void observe(const ExprPtr& e);
    void observe_atom(const Atom& a);
    std::size_t var_count() const { return domains_.size(); }
    // Enumerates every assignment; callback returns false to stop early.
    void enumerate(const std::function<bool(const std::map<std::string, Value>&)>& fn) const;
    void check_limit(std::size_t max_atoms) const;

private:
    std::map<std::string, std::set<Value>> domains_;
    friend std::vector<std::pair<std::string, std::vector<Value>>> domain_table(const Alphabet&);
};

bool eval_expr(const ExprPtr& e, const std::map<std::string, Value>& assignment);

// Observed per-variable domains, including the synthetic "none of the
// mentioned values" representative (a symbol starting with '\x01').
std::vector<std::pair<std::string, std::vector<Value>>> domain_table(const Alphabet&);

std::vector<Term> to_dnf(const ExprPtr& e, const Limits& limits = {});
ExprPtr dnf_to_expr(const std::vector<Term>& terms);
bool term_satisfiable(const Term& t);

bool satisfiable(const ExprPtr& e, const Limits& limits = {});
bool implies(const ExprPtr& a, const ExprPtr& b, const Limits& limits = {});
bool equivalent(const ExprPtr& a, const ExprPtr& b, const Limits& limits = {});

}  // namespace specfsm::logic

#endif
