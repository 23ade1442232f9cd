#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "specfsm/logic.hpp"

using namespace specfsm::logic;

namespace {

// Independent reference: evaluate a DNF term list directly against an
// assignment, without going through BoolExpr machinery.
bool eval_terms(const std::vector<Term>& terms, const std::map<std::string, Value>& asg) {
    for (const auto& t : terms) {
        bool all = true;
        for (const auto& lit : t) {
            auto it = asg.find(lit.atom.var);
            bool holds = false;
            if (it != asg.end()) {
                const Value& v = it->second;
                if (lit.atom.cmp == Cmp::Eq) {
                    holds = v == lit.atom.value;
                } else if (v.kind == Value::Kind::Int && lit.atom.value.kind == Value::Kind::Int) {
                    switch (lit.atom.cmp) {
                        case Cmp::Lt: holds = v.ival < lit.atom.value.ival; break;
                        case Cmp::Le: holds = v.ival <= lit.atom.value.ival; break;
                        case Cmp::Gt: holds = v.ival > lit.atom.value.ival; break;
                        case Cmp::Ge: holds = v.ival >= lit.atom.value.ival; break;
                        default: break;
                    }
                }
            }
            if (lit.negated) holds = !holds;
            if (!holds) {
                all = false;
                break;
            }
        }
        if (all) return true;
    }
    return false;
}

// Random expression generator over a small mixed-domain variable pool.
ExprPtr random_expr(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 4);
    switch (pick(rng)) {
        case 0: {  // boolean atom
            std::uniform_int_distribution<int> v(0, 2);
            std::uniform_int_distribution<int> b(0, 1);
            Atom a;
            a.var = std::string("b") + char('0' + v(rng));
            a.value = Value::boolean(b(rng) != 0);
            return mk_atom(a);
        }
        case 1: {  // enumeration atom
            std::uniform_int_distribution<int> v(0, 1);
            std::uniform_int_distribution<int> s(0, 2);
            Atom a;
            a.var = std::string("e") + char('0' + v(rng));
            a.value = Value::symbol(std::string("sym") + char('0' + s(rng)));
            return mk_atom(a);
        }
        case 2: return mk_not(random_expr(rng, depth - 1));
        case 3: return mk_and(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        default: return mk_or(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    }
}

bool agree_everywhere(const ExprPtr& e, const std::vector<Term>& terms) {
    Alphabet ab;
    ab.observe(e);
    for (const auto& t : terms)
        for (const auto& lit : t) ab.observe_atom(lit.atom);
    bool ok = true;
    ab.enumerate([&](const std::map<std::string, Value>& asg) {
        if (eval_expr(e, asg) != eval_terms(terms, asg)) {
            ok = false;
            return false;
        }
        return true;
    });
    return ok;
}

}  // namespace

TEST_CASE("parse and print round trip") {
    const char* cases[] = {
        "timer_t3460_started",
        "chan_ue_amf = deregistration_accept",
        "timer_t3460_started & timer_t3460_expired & timer_t3460_expire_counter = 1",
        "a = x | b = y & !c",
        "counter >= 5 & counter < 9",
        "(a | b) & c",
    };
    for (const char* text : cases) {
        ExprPtr e = parse_expr(text);
        CHECK(to_string(e) == text);
    }
}

TEST_CASE("parser accepts IR dump decoration") {
    ExprPtr a = parse_expr("assert \xCF\x83[chan_ue_mme] = auth_reject");
    ExprPtr b = parse_expr("chan_ue_mme = auth_reject");
    CHECK(expr_equal(a, b));
    ExprPtr c = parse_expr("sigma[x] = v & assert sigma[y]");
    CHECK(to_string(c) == "x = v & y");
}

TEST_CASE("parser rejects malformed input") {
    CHECK_THROWS_AS(parse_expr(""), ParseError);
    CHECK_THROWS_AS(parse_expr("a &"), ParseError);
    CHECK_THROWS_AS(parse_expr("(a"), ParseError);
    CHECK_THROWS_AS(parse_expr("a = "), ParseError);
    CHECK_THROWS_AS(parse_expr("a b"), ParseError);
}

TEST_CASE("DNF agrees with a truth-table oracle on random expressions") {
    std::mt19937 rng(20240817);
    for (int i = 0; i < 400; ++i) {
        ExprPtr e = random_expr(rng, 4);
        std::vector<Term> dnf;
        try {
            dnf = to_dnf(e);
        } catch (const BlowupLimit&) {
            continue;  // cap is exercised in its own test
        }
        CAPTURE(to_string(e));
        REQUIRE(agree_everywhere(e, dnf));
    }
}

TEST_CASE("DNF removes unsatisfiable and subsumed terms") {
    // x = a & x = b is contradictory under at-most-one enumeration semantics
    auto contradiction = to_dnf(parse_expr("x = a & x = b"));
    CHECK(contradiction.empty());

    // a | a & b: the longer term is subsumed
    auto subsumed = to_dnf(parse_expr("a | a & b"));
    REQUIRE(subsumed.size() == 1);
    CHECK(subsumed[0].size() == 1);
    CHECK(subsumed[0][0].atom.var == "a");

    // !x with x boolean stays a single negated literal
    auto neg = to_dnf(parse_expr("!a"));
    REQUIRE(neg.size() == 1);
    REQUIRE(neg[0].size() == 1);
    CHECK(neg[0][0].negated);
}

TEST_CASE("boolean negation is equivalent to = FALSE") {
    CHECK(equivalent(parse_expr("!a"), parse_expr("a = FALSE")));
    CHECK(!satisfiable(parse_expr("a & a = FALSE")));
}

TEST_CASE("implies and equivalent behave on enumeration domains") {
    CHECK(implies(parse_expr("x = a"), parse_expr("!(x = b)")));
    CHECK(!implies(parse_expr("!(x = b)"), parse_expr("x = a")));
    CHECK(equivalent(parse_expr("a & (b | c)"), parse_expr("a & b | a & c")));
    CHECK(!equivalent(parse_expr("a | b"), parse_expr("a & b")));
    CHECK(implies(parse_expr("k = 1"), parse_expr("k >= 1")));
    CHECK(implies(parse_expr("k > 3"), parse_expr("k >= 2")));
    CHECK(!implies(parse_expr("k >= 2"), parse_expr("k > 3")));
}

TEST_CASE("atom count limit raises BlowupLimit") {
    std::vector<ExprPtr> big;
    for (int i = 0; i < 30; ++i) big.push_back(mk_bool_var("v" + std::to_string(i)));
    Limits tight;
    tight.max_atoms = 24;
    CHECK_THROWS_AS((void)satisfiable(mk_and(big), tight), BlowupLimit);

    std::vector<ExprPtr> small;
    for (int i = 0; i < 18; ++i) small.push_back(mk_bool_var("v" + std::to_string(i)));
    CHECK(satisfiable(mk_and(small), tight));
}

TEST_CASE("DNF term cap raises BlowupLimit") {
    // (a0|b0)&(a1|b1)&... doubles the term count per clause
    ExprPtr e = mk_true();
    for (int i = 0; i < 14; ++i) {
        ExprPtr clause = mk_or(mk_bool_var("a" + std::to_string(i)),
                               mk_bool_var("b" + std::to_string(i)));
        e = expr_equal(e, mk_true()) ? clause : mk_and(e, clause);
    }
    Limits tight;
    tight.max_terms = 1024;
    tight.max_atoms = 64;
    CHECK_THROWS_AS((void)to_dnf(e, tight), BlowupLimit);
}

TEST_CASE("canonical atom keys") {
    Atom a{"x", Cmp::Eq, Value::symbol("v")};
    CHECK(a.canonical() == "x = v");
    Atom b{"x", Cmp::Eq, Value::boolean(true)};
    CHECK(b.canonical() == "x = TRUE");
    Atom c{"n", Cmp::Ge, Value::integer(2)};
    CHECK(c.canonical() == "n >= 2");
}
