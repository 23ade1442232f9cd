#ifndef SPECFSM_DSL_HPP
#define SPECFSM_DSL_HPP

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "specfsm/deptree.hpp"
#include "specfsm/lexicon.hpp"
#include "specfsm/logic.hpp"

// DSL rule registry, dependency-tree-to-AST mapping, and AST interpretation
// into logical intermediate representations.

namespace specfsm::dsl {

class DslError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class DuplicateCommand : public DslError {
    using DslError::DslError;
};
class UnknownSlotType : public DslError {
    using DslError::DslError;
};
class NoRuleForVerb : public DslError {
    using DslError::DslError;
};
class MissingRequiredSlot : public DslError {
public:
    MissingRequiredSlot(const std::string& command, const std::string& slot)
        : DslError("rule '" + command + "' missing required slot '" + slot + "'"),
          command(command),
          slot(slot) {}
    std::string command, slot;
};
class TypeMismatch : public DslError {
    using DslError::DslError;
};
class ModeUnsupported : public DslError {
    using DslError::DslError;
};
class Unresolvable : public DslError {
    using DslError::DslError;
};

enum class Mode { Condition, Action };

struct SlotType {
    // a keyword type, or the catch-all expression slot (numbers, ordinals)
    std::optional<lexicon::KeywordType> keyword_type;
    bool is_number = false;
};

struct SlotSpec {
    std::string name;
    SlotType type;
    bool optional = false;
    // preferred dependency relation when several candidates share the type
    std::optional<deptree::Rel> preferred_rel;
    bool is_actor = false;  // participant attribution slot
};

struct DslRule {
    std::string command;
    std::vector<std::string> trigger_forms;  // verb surface forms (single tokens)
    std::vector<std::string> requires_words; // extra words that must appear in the span
    std::vector<SlotSpec> slots;
    bool condition_capable = false;
    bool action_capable = false;
    std::string condition_template;  // expression text with {slot} placeholders
    std::string action_template;     // `var := rhs` list, comma separated
};

class RuleSet {
public:
    void add(DslRule rule);
    const DslRule* find(const std::string& command) const;
    std::vector<const DslRule*> rules_for_lemma(const std::string& lemma) const;
    const std::vector<DslRule>& rules() const { return rules_; }
    deptree::VerbLexicon verb_lexicon() const;

private:
    std::vector<DslRule> rules_;
    std::map<std::string, std::size_t> by_command_;
    std::map<std::string, std::vector<std::size_t>> by_lemma_;
};

// Rules file: one stanza per command, blank-line separated:
//   command: receive
//   verbs: receive, receives, receiving, received, receipt
//   requires: <words>            (optional)
//   slots: dst:agent@subject, msg:message, src:agent:optional
//   mode: condition | action | both
//   condition: chan_{src}_{dst} = {msg}
//   action: chan_{src}_{dst} := {msg}
RuleSet load_dsl_rules(const std::string& path);
RuleSet parse_dsl_rules(const std::string& text, const std::string& origin = "<string>");

// Slot binding: either a single keyword, a number, or a logical combination.
struct SlotValue;
using SlotValuePtr = std::shared_ptr<const SlotValue>;

struct SlotValue {
    enum class Kind { Keyword, Number, And, Or, Not };
    Kind kind = Kind::Keyword;
    const lexicon::Keyword* keyword = nullptr;
    int number = 0;
    std::vector<SlotValuePtr> kids;
    bool from_context = false;  // bound by the resolver, not the span

    static SlotValuePtr of(const lexicon::Keyword* kw);
    static SlotValuePtr of_number(int n);
    std::string to_string() const;
};

struct DslAst {
    const DslRule* rule = nullptr;
    std::map<std::string, SlotValuePtr> bindings;
    std::string to_string() const;  // command(slot values in declaration order)
};

// Document context consumed by the heuristic backtracking resolver.
struct Context {
    // keywords visible in the current control block (all spans + loose tokens)
    std::vector<const lexicon::Keyword*> block_keywords;
    // keywords in the rest of the current paragraph
    std::vector<const lexicon::Keyword*> paragraph_keywords;
    // previous paragraphs, newest first, each a keyword list
    std::vector<std::vector<const lexicon::Keyword*>> history;
    std::size_t backtrack_depth = 5;  // K

    std::vector<std::string> participants;   // agent ids, document order
    std::string default_participant;
    // channel naming: chan_<src>_<dst> lowercased, unless overridden
    std::map<std::pair<std::string, std::string>, std::string> channel_names;

    std::string channel_name(const std::string& src, const std::string& dst) const;
    const lexicon::Keyword* other_agent(const lexicon::Lexicon& lex,
                                        const std::string& than) const;
};

struct ResolutionLogEntry {
    std::string command, slot, keyword;
    std::string provenance;  // block | paragraph | history[n] | peer | default
};

DslAst map_to_ast(const deptree::DepNode& tree, const RuleSet& rules,
                  const std::vector<std::string>& span_words);

// Fills missing required slots from context; appends to the log.
void resolve_context(DslAst& ast, const Context& ctx, const lexicon::Lexicon& lex,
                     std::vector<ResolutionLogEntry>* log = nullptr);

struct Assignment {
    std::string var;
    enum class Rhs { Value, Increment, Decrement };
    Rhs rhs = Rhs::Value;
    logic::Value value = logic::Value::boolean(true);

    bool operator==(const Assignment& o) const;
    std::string to_string() const;      // `var = value` (model surface form)
    std::string to_ir_dump() const;     // `var := value`
    static Assignment parse(const std::string& text);
};

struct IrFormula {
    logic::ExprPtr condition;         // null unless condition mode
    std::vector<Assignment> actions;  // empty unless action mode

    std::string to_string() const;
    std::string to_ir_dump() const;   // store-assertion form `assert σ[x] = v`
};

IrFormula interpret_ast(const DslAst& ast, Mode mode, const Context& ctx);

// Weak modal directives: conjoins a fresh nondeterministic boolean.
struct DirectiveCounter {
    int block_index = 0;
    int next = 1;
    std::vector<std::string> declared;  // nd variable names, document order
};

logic::ExprPtr apply_directives(const std::vector<std::string>& span_tokens,
                                logic::ExprPtr condition,
                                const deptree::VerbLexicon& verbs,
                                DirectiveCounter& counter);

}  // namespace specfsm::dsl

#endif
