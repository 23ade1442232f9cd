#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "specfsm/fsm.hpp"

using namespace specfsm;
using namespace specfsm::fsm;

namespace {

dsl::Assignment assign_bool(const std::string& var, bool v) {
    dsl::Assignment a;
    a.var = var;
    a.value = logic::Value::boolean(v);
    return a;
}

Transition make_t(const std::string& si, const std::string& sf, const std::string& cond,
                  std::vector<dsl::Assignment> actions, const std::string& who = "UE") {
    Transition t;
    t.s_i = si;
    t.s_f = sf;
    t.condition = logic::parse_expr(cond);
    t.actions = std::move(actions);
    t.participant = who;
    return t;
}

// ---------------------------------------------------------------------------
// Independent oracle: fire-all-enabled exploration. Input variables are
// revalued nondeterministically each step; the reachable set collects
// (state, output-store) pairs.

struct Exploration {
    std::set<std::pair<std::string, std::string>> reachable;  // (state, store key)
};

std::string store_key(const std::map<std::string, logic::Value>& store,
                      const std::set<std::string>& outputs) {
    std::string key;
    for (const auto& [k, v] : store)
        if (outputs.count(k)) key += k + "=" + v.to_string() + ";";
    return key;
}

Exploration explore(const Fsm& f, const std::vector<std::string>& inputs,
                    const std::set<std::string>& outputs, int depth) {
    // all input valuations (booleans only, enough for the oracle)
    std::vector<std::map<std::string, logic::Value>> valuations;
    std::size_t n = inputs.size();
    for (std::size_t bits = 0; bits < (std::size_t(1) << n); ++bits) {
        std::map<std::string, logic::Value> v;
        for (std::size_t i = 0; i < n; ++i)
            v[inputs[i]] = logic::Value::boolean((bits >> i) & 1);
        valuations.push_back(std::move(v));
    }

    std::map<std::string, logic::Value> init;
    for (const auto& o : outputs) init[o] = logic::Value::boolean(false);

    Exploration ex;
    std::set<std::pair<std::string, std::string>> visited;
    std::vector<std::pair<std::string, std::map<std::string, logic::Value>>> frontier;
    frontier.push_back({f.initial, init});
    visited.insert({f.initial, store_key(init, outputs)});
    ex.reachable.insert({f.initial, store_key(init, outputs)});

    for (int d = 0; d < depth; ++d) {
        decltype(frontier) next;
        for (const auto& [state, store] : frontier) {
            for (const auto& inputs_val : valuations) {
                auto env = store;
                for (const auto& [k, v] : inputs_val) env[k] = v;
                // fire-all-enabled: every enabled transition's actions apply
                // in list order; the first enabled one picks the next state
                std::string next_state = state;
                bool first = true;
                auto out_store = store;
                for (const auto& t : f.transitions) {
                    if (t.s_i != state && t.s_i != kWildcardState) continue;
                    if (!logic::eval_expr(t.condition, env)) continue;
                    if (first) {
                        next_state = t.s_f == kWildcardState ? state : t.s_f;
                        first = false;
                    }
                    for (const auto& a : t.actions)
                        if (a.rhs == dsl::Assignment::Rhs::Value) out_store[a.var] = a.value;
                }
                auto key = std::make_pair(next_state, store_key(out_store, outputs));
                ex.reachable.insert(key);
                if (visited.insert(key).second) next.push_back({next_state, out_store});
            }
        }
        frontier = std::move(next);
        if (frontier.empty()) break;
    }
    return ex;
}

}  // namespace

TEST_CASE("combine: Figure 2 shape — (c1 or c2) and c3 with start state") {
    BlockIr b;
    b.block_index = 1;
    b.participant = "UE";
    using annotation::TagLabel;
    b.components.resize(5);
    b.components[0].label = TagLabel::StartState;
    b.components[0].state = "S1";
    b.components[1].label = TagLabel::Condition;
    b.components[1].condition = logic::parse_expr("c1");
    b.components[2].label = TagLabel::Condition;
    b.components[2].condition = logic::parse_expr("c2");
    b.components[3].label = TagLabel::Condition;
    b.components[3].condition = logic::parse_expr("c3");
    b.components[4].label = TagLabel::Action;
    b.components[4].actions = {assign_bool("done", true)};
    b.connective_tokens = {{"in", "state"}, {"if"}, {"or"}, {"and"}, {}, {}};

    auto ts = combine_block(b);
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].s_i == "S1");
    CHECK(ts[0].s_f == "S1");  // no end state: stays put
    CHECK(logic::equivalent(ts[0].condition, logic::parse_expr("(c1 | c2) & c3")));
    CHECK(ts[0].actions.size() == 1);
}

TEST_CASE("combine: action-only block becomes a wildcard self-loop") {
    BlockIr b;
    b.components.resize(1);
    b.components[0].label = annotation::TagLabel::Action;
    b.components[0].actions = {assign_bool("x", false)};
    b.connective_tokens = {{}, {}};
    b.participant = "UE";
    auto ts = combine_block(b);
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].s_i == std::string(kWildcardState));
    CHECK(ts[0].s_f == std::string(kWildcardState));
    CHECK(logic::to_string(ts[0].condition) == "TRUE");
}

TEST_CASE("combine: condition-only block yields no transition") {
    BlockIr b;
    b.components.resize(1);
    b.components[0].label = annotation::TagLabel::Condition;
    b.components[0].condition = logic::parse_expr("c");
    b.connective_tokens = {{}, {}};
    CHECK(combine_block(b).empty());
}

TEST_CASE("combine: unsatisfiable condition dropped with diagnostic") {
    BlockIr b;
    b.components.resize(2);
    b.components[0].label = annotation::TagLabel::Condition;
    b.components[0].condition = logic::parse_expr("x = a & x = b");
    b.components[1].label = annotation::TagLabel::Action;
    b.components[1].actions = {assign_bool("y", true)};
    b.connective_tokens = {{}, {}, {}};
    std::vector<std::string> diags;
    CHECK(combine_block(b, &diags).empty());
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].find("unsatisfiable") != std::string::npos);
}

TEST_CASE("combine: or over end states duplicates the transition") {
    BlockIr b;
    b.components.resize(3);
    b.components[0].label = annotation::TagLabel::Condition;
    b.components[0].condition = logic::parse_expr("c");
    b.components[1].label = annotation::TagLabel::EndState;
    b.components[1].state = "S1";
    b.components[2].label = annotation::TagLabel::EndState;
    b.components[2].state = "S2";
    b.connective_tokens = {{}, {}, {"or"}, {}};
    auto ts = combine_block(b);
    REQUIRE(ts.size() == 2);
    CHECK(ts[0].s_f == "S1");
    CHECK(ts[1].s_f == "S2");

    // a negated end state is flagged, not silently mis-handled
    b.connective_tokens = {{}, {}, {"and", "not"}, {}};
    CHECK_THROWS_AS(combine_block(b), UnsupportedStateConnective);
}

TEST_CASE("combine: inherited condition from enclosing block conjoins first") {
    BlockIr b;
    b.inherited_condition = logic::parse_expr("outer");
    b.components.resize(2);
    b.components[0].label = annotation::TagLabel::Condition;
    b.components[0].condition = logic::parse_expr("inner");
    b.components[1].label = annotation::TagLabel::Action;
    b.components[1].actions = {assign_bool("y", true)};
    b.connective_tokens = {{}, {}, {}};
    auto ts = combine_block(b);
    REQUIRE(ts.size() == 1);
    CHECK(logic::to_string(ts[0].condition) == "outer & inner");
}

TEST_CASE("compile: participants, channels, and inferred domains") {
    dsl::Context ctx;
    std::vector<Transition> ts = {
        make_t("A", "B", "chan_amf_ue = auth_request & k = 3", {assign_bool("ok", true)}, "UE"),
        make_t("X", "X", "ok", {dsl::Assignment::parse("k := k + 1")}, "AMF"),
    };
    Model m = compile_model(ts, ctx);
    CHECK(m.participants == std::vector<std::string>{"UE", "AMF"});
    REQUIRE(m.channels.size() == 2);
    CHECK(m.channels[0].name == "chan_ue_amf");
    CHECK(m.channels[1].name == "chan_amf_ue");
    REQUIRE(m.fsm_for("UE") != nullptr);
    CHECK(m.fsm_for("UE")->initial == "A");

    const VarDecl* chan = m.var("chan_amf_ue");
    REQUIRE(chan != nullptr);
    CHECK(chan->kind == VarDecl::Kind::Enum);
    CHECK(chan->is_channel);
    CHECK(chan->values.front() == "none");

    // integer domain: max literal seen + 1 headroom
    const VarDecl* k = m.var("k");
    REQUIRE(k != nullptr);
    CHECK(k->kind == VarDecl::Kind::Int);
    CHECK(k->hi == 4);

    const VarDecl* ok = m.var("ok");
    REQUIRE(ok != nullptr);
    CHECK(ok->kind == VarDecl::Kind::Bool);

    CHECK_THROWS_AS(compile_model({}, ctx), EmptyModel);
    auto orphan = make_t("A", "B", "x", {}, "");
    CHECK_THROWS_AS(compile_model({orphan}, ctx), UnknownParticipant);
}

TEST_CASE("compile: nd_ variables are nondeterministic inputs") {
    dsl::Context ctx;
    Model m = compile_model({make_t("A", "A", "nd_b1_1", {assign_bool("x", true)})}, ctx);
    const VarDecl* nd = m.var("nd_b1_1");
    REQUIRE(nd != nullptr);
    CHECK(nd->nondet);
}

TEST_CASE("merge: the worked implication example") {
    Fsm f;
    f.participant = "UE";
    f.states = {"S"};
    f.initial = "S";
    f.transitions = {
        make_t("S", "S", "x & y", {assign_bool("a1", true)}),
        make_t("S", "S", "x", {assign_bool("a2", true)}),
    };
    Fsm merged = merge_split_transitions(f);
    REQUIRE(merged.transitions.size() == 2);
    // T1 gains T2's actions
    CHECK(merged.transitions[0].actions.size() == 2);
    // T2's condition is rewritten to x & !(x & y)
    CHECK(logic::equivalent(merged.transitions[1].condition,
                            logic::parse_expr("x & !(x & y)")));
    // mutual exclusion and coverage invariants
    CHECK(!logic::satisfiable(logic::mk_and(merged.transitions[0].condition,
                                            merged.transitions[1].condition)));
    CHECK(logic::equivalent(logic::mk_or(merged.transitions[0].condition,
                                         merged.transitions[1].condition),
                            logic::parse_expr("x")));
}

TEST_CASE("merge: equivalent conditions collapse into one transition") {
    Fsm f;
    f.participant = "UE";
    f.states = {"S"};
    f.initial = "S";
    f.transitions = {
        make_t("S", "S", "a | b", {assign_bool("x", true)}),
        make_t("S", "S", "b | a", {assign_bool("y", true), assign_bool("x", true)}),
    };
    Fsm merged = merge_split_transitions(f);
    REQUIRE(merged.transitions.size() == 1);
    CHECK(merged.transitions[0].actions.size() == 2);  // duplicates dropped
}

TEST_CASE("merge soundness on random split FSMs (fire-all-enabled oracle)") {
    std::mt19937 rng(424242);
    std::vector<std::string> inputs = {"i0", "i1", "i2"};
    std::set<std::string> outputs = {"o0", "o1", "o2"};
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> pick_in(0, 2);
    std::uniform_int_distribution<int> pick_out(0, 2);
    std::uniform_int_distribution<int> n_states(1, 3);
    std::uniform_int_distribution<int> n_trans(2, 6);

    auto random_cond = [&]() {
        std::string c = inputs[pick_in(rng)];
        if (coin(rng)) c += std::string(coin(rng) ? " & " : " | ") + inputs[pick_in(rng)];
        return c;
    };

    for (int iter = 0; iter < 50; ++iter) {
        Fsm f;
        f.participant = "UE";
        int ns = n_states(rng);
        for (int s = 0; s < ns; ++s) f.states.push_back("S" + std::to_string(s));
        f.initial = "S0";
        int nt = n_trans(rng);
        for (int k = 0; k < nt; ++k) {
            std::string si = f.states[std::uniform_int_distribution<int>(0, ns - 1)(rng)];
            std::string cond = random_cond();
            // plant implication pairs: a strict conjunction of the same guard
            f.transitions.push_back(make_t(
                si, si, cond, {assign_bool("o" + std::to_string(pick_out(rng)), true)}));
            if (coin(rng))
                f.transitions.push_back(
                    make_t(si, si, cond + " & " + inputs[pick_in(rng)],
                           {assign_bool("o" + std::to_string(pick_out(rng)), true)}));
        }
        Fsm merged = merge_split_transitions(f);
        auto before = explore(f, inputs, outputs, 8);
        auto after = explore(merged, inputs, outputs, 8);
        CAPTURE(iter);
        REQUIRE(before.reachable == after.reachable);
    }
}

TEST_CASE("graph emission round trips") {
    Fsm f;
    f.participant = "UE";
    f.states = {"S0", "S1"};
    f.initial = "S0";
    f.transitions = {
        make_t("S0", "S1", "chan_mme_ue = auth_request",
               {assign_bool("timer_t3460_started", true)}),
        make_t("*", "*", "nd_b1_1", {dsl::Assignment::parse("k := k + 1")}),
    };
    std::string dot = emit_graph(f);
    CHECK(dot.find("digraph") == 0);
    CHECK(dot.find("S0") != std::string::npos);
    CHECK(dot.find("chan_mme_ue = auth_request / timer_t3460_started = TRUE") !=
          std::string::npos);

    Fsm back = parse_graph(dot);
    CHECK(fsm_equal(f, back));
    CHECK_THROWS_AS(parse_graph("not a graph"), GraphParseError);
}

TEST_CASE("model JSON round trips") {
    dsl::Context ctx;
    std::vector<Transition> ts = {
        make_t("A", "B", "chan_amf_ue = auth_request", {assign_bool("ok", true)}, "UE"),
        make_t("X", "X", "ok & k >= 2", {dsl::Assignment::parse("k := k + 1")}, "AMF"),
    };
    Model m = compile_model(ts, ctx);
    auto j = model_to_json(m);
    Model back = model_from_json(j);
    CHECK(model_to_json(back) == j);
    CHECK(back.participants == m.participants);
    CHECK(back.vars.size() == m.vars.size());
}
