#ifndef SPECFSM_FSM_HPP
#define SPECFSM_FSM_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "specfsm/annotation.hpp"
#include "specfsm/dsl.hpp"
#include "specfsm/logic.hpp"

// Transition assembly from per-block IRs, per-participant FSM compilation,
// split-transition merging, missed-action recovery, and graph emission.

namespace specfsm::fsm {

class FsmError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class UnknownParticipant : public FsmError {
    using FsmError::FsmError;
};
class EmptyModel : public FsmError {
    using FsmError::FsmError;
};
class GraphParseError : public FsmError {
    using FsmError::FsmError;
};
class UnsupportedStateConnective : public FsmError {
    using FsmError::FsmError;
};

// Wildcard start state: applies in every state; kept symbolic until the
// transpiler materializes it.
inline const char* kWildcardState = "*";

struct Transition {
    std::string s_i;  // kWildcardState when unspecified
    std::string s_f;  // equals s_i when the block names no end state
    logic::ExprPtr condition;  // never null; TRUE when unconditioned
    std::vector<dsl::Assignment> actions;
    std::string participant;
    std::vector<int> provenance;  // source block indices

    std::string label() const;  // `C / A1; A2; ...`
};

struct Fsm {
    std::string participant;
    std::vector<std::string> states;  // declaration order; excludes the wildcard
    std::string initial;
    std::vector<Transition> transitions;
};

struct VarDecl {
    enum class Kind { Bool, Enum, Int };
    std::string name;
    Kind kind = Kind::Bool;
    std::vector<std::string> values;  // Enum: observed symbols, "none" first
    long lo = 0, hi = 1;              // Int bounds, inclusive
    logic::Value init = logic::Value::boolean(false);
    bool nondet = false;    // unconstrained input, revalued every step
    bool is_channel = false;
};

struct Channel {
    std::string name, src, dst;
};

struct Model {
    std::vector<std::string> participants;
    std::vector<Fsm> fsms;          // one per participant, same order
    std::vector<Channel> channels;  // every ordered distinct pair
    std::vector<VarDecl> vars;

    const Fsm* fsm_for(const std::string& participant) const;
    const VarDecl* var(const std::string& name) const;
};

// One control block's interpreted components, in document order, with the
// connective tokens separating them (from CtlBlock).
struct BlockIr {
    struct Component {
        annotation::TagLabel label = annotation::TagLabel::Condition;
        logic::ExprPtr condition;                // Condition spans
        std::vector<dsl::Assignment> actions;    // Action spans
        std::string state;                       // StartState / EndState spans
    };
    int block_index = 0;
    std::string participant;
    logic::ExprPtr inherited_condition;  // enclosing blocks' conjoined conditions
    std::vector<Component> components;
    std::vector<std::vector<std::string>> connective_tokens;  // size components+1
};

// Combines the block's spans into transitions: conditions joined by the
// recovered and/or structure, start state as S_i, end state(s) as S_f
// ("or" over end states duplicates the transition). Blocks with neither
// actions nor an end state yield nothing. Unsatisfiable conditions are
// dropped with a diagnostic.
// The block's condition spans joined per the connective gaps (or/and),
// conjoined with the inherited condition; null when there are none.
logic::ExprPtr combined_condition(const BlockIr& block);

std::vector<Transition> combine_block(const BlockIr& block,
                                      std::vector<std::string>* diagnostics = nullptr,
                                      const logic::Limits& limits = {});

// Partitions transitions per participant, infers variable domains from
// usage, and builds channels for every ordered participant pair.
Model compile_model(const std::vector<Transition>& transitions, const dsl::Context& ctx);

// Same-start-state pairs: equivalent conditions merge into one transition;
// strict implication extends the stronger transition's actions and rewrites
// the weaker condition to C2 & !C1. Applied to a fixed point.
Fsm merge_split_transitions(const Fsm& fsm, std::vector<std::string>* diagnostics = nullptr,
                            const logic::Limits& limits = {});

// Scans a block's untagged token runs for DSL trigger verbs and interprets
// any match in action mode. No match means no recovery.
std::vector<dsl::IrFormula> recover_missing_actions(
    const annotation::CtlBlock& block, const dsl::RuleSet& rules,
    const lexicon::Lexicon& lex, const dsl::Context& ctx);

// DOT text, one node per state and one labeled edge per transition, with
// machine-readable edge attributes so the graph parses back losslessly.
std::string emit_graph(const Fsm& fsm);
Fsm parse_graph(const std::string& text);
bool fsm_equal(const Fsm& a, const Fsm& b);  // structural, conditions by string

nlohmann::json model_to_json(const Model& m);
Model model_from_json(const nlohmann::json& j);

}  // namespace specfsm::fsm

#endif
