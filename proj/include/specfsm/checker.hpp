#ifndef SPECFSM_CHECKER_HPP
#define SPECFSM_CHECKER_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "specfsm/fsm.hpp"
#include "specfsm/logic.hpp"

// Dolev-Yao channel instrumentation, an SMV-like transpiler, and an
// explicit-state bounded checker for temporal properties with
// counterexample traces.

namespace specfsm::checker {

class CheckerError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class PropertyParseError : public CheckerError {
    using CheckerError::CheckerError;
};
class UnsupportedProperty : public CheckerError {
    using CheckerError::CheckerError;
};
class UnboundedDomain : public CheckerError {
    using CheckerError::CheckerError;
};
class MemoryCap : public CheckerError {
    using CheckerError::CheckerError;
};

struct AdversaryConfig {
    std::set<std::string> capabilities;  // subset of {drop, modify, inject, replay}
    int replay_buffer_size = 1;
    std::vector<std::string> injectable_messages;  // plaintext-craftable only

    void validate() const;  // replay needs buffer >= 1; modify/inject need the set
};

// ---------------------------------------------------------------------------
// LTL

struct Ltl;
using LtlPtr = std::shared_ptr<const Ltl>;

struct Ltl {
    enum class Kind { Atom, Not, And, Or, Implies, G, F, X, U };
    Kind kind = Kind::Atom;
    logic::ExprPtr atom;  // Kind::Atom only: a propositional state predicate
    std::vector<LtlPtr> kids;
};

// Syntax: `G`, `F`, `X` prefix, `U` infix, `!`, `&`, `|`, `->`, parentheses;
// atoms use the IR dump atom syntax (`var`, `var = value`, `var >= n`).
LtlPtr parse_ltl(const std::string& text);
std::string ltl_to_string(const LtlPtr& p);

struct LtlProperty {
    std::string name;
    LtlPtr formula;
    std::optional<int> bound;  // per-property override
};

// One property per line: `name: formula`, or `name@bound: formula`;
// '#' starts a comment.
std::vector<LtlProperty> parse_property_file(const std::string& text);

// ---------------------------------------------------------------------------
// Traces and verdicts

struct TraceStep {
    std::vector<std::string> fsm_states;  // model participant order
    std::map<std::string, logic::Value> store;
    std::string adversary_action;     // "" for step 0, "pass" when idle
    std::vector<std::string> fired;   // transition labels fired this step
};

struct CounterexampleTrace {
    std::string property;
    std::vector<TraceStep> steps;
    std::optional<std::size_t> loop_start;  // liveness lassos: cycle entry index
};

struct Verdict {
    enum class Kind {
        Proven,            // full reachable space explored, no violation
        HoldsWithinBound,  // no violation up to the bound; space not exhausted
        Violated
    };
    Kind kind = Kind::Proven;
    std::string property;
    std::optional<CounterexampleTrace> trace;
};

// ---------------------------------------------------------------------------
// Operations

// Marks the model's channels as adversary-controlled under cfg. The adversary
// stage itself lives in the checker's transition relation: per step, one
// nondeterministic choice of pass-through, drop, inject/modify with an
// injectable message, or replay from the channel's send buffer. Fields named
// `<channel>_integrity` are forced false on injected and modified messages.
fsm::Model instrument_adversary(const fsm::Model& m, const AdversaryConfig& cfg);

struct CheckOptions {
    int bound = 40;                        // BFS depth layers
    std::size_t memory_cap_states = 500000;
};

Verdict check(const fsm::Model& m, const AdversaryConfig& cfg, const LtlProperty& p,
              const CheckOptions& opts = {});

// Independent validator: replays the trace step-by-step against the composed
// transition relation; returns false on the first illegal step.
bool validate_trace(const fsm::Model& m, const AdversaryConfig& cfg,
                    const CounterexampleTrace& trace);

// Deterministic SMV-like text: variable declarations, initial assignments,
// guarded-case next-state relations per FSM (wildcards materialized), and
// nondet variables as unconstrained inputs.
std::string transpile_smv(const fsm::Model& m);

std::string render_trace(const CounterexampleTrace& t, bool full_state = false);

}  // namespace specfsm::checker

#endif
