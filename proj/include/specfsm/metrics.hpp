#ifndef SPECFSM_METRICS_HPP
#define SPECFSM_METRICS_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "specfsm/fsm.hpp"
#include "specfsm/logic.hpp"

// FSM comparison: condition/action match scoring over DNF-split transitions,
// and a per-start-state behavioral diff over the finite condition alphabet.

namespace specfsm::metrics {

// One conjunctive term of a transition's DNF, with the start-state match
// appended as a condition term and the reaching of an end state as an action.
struct SplitTransition {
    int origin = -1;                    // index into the source transition list
    std::set<std::string> condition;    // canonical conjunctive terms
    std::vector<std::string> actions;   // canonical actions, order preserved
};

// - a negated boolean atom and `x = FALSE` share one canonical form
// - enumeration/integer atoms keep their comparator and value
std::string canonical_literal(const logic::Literal& l);
std::string canonical_action(const dsl::Assignment& a);

std::vector<SplitTransition> split_for_scoring(const std::vector<fsm::Transition>& ts,
                                               const logic::Limits& limits = {});

struct MatchReport {
    struct ConditionEntry {
        int gt_origin = -1;       // index of the ground-truth split
        double best = 0.0;
        int best_inferred = -1;   // index of the maximizing inferred split
    };
    struct ActionEntry {
        std::string action;
        double best = 0.0;
        int best_inferred = -1;
    };
    std::vector<ConditionEntry> conditions;
    std::vector<ActionEntry> actions;
    double condition_accuracy = 1.0;
    double action_accuracy = 1.0;

    std::string to_table() const;
    std::string to_json() const;
};

// match score |m_GT,I| / |c_GT| between one ground-truth split and one
// inferred split: ground-truth terms present with identical canonical value
double match_score(const SplitTransition& gt, const SplitTransition& inf);

double score_conditions(const std::vector<SplitTransition>& gt,
                        const std::vector<SplitTransition>& inf);
double score_actions(const std::vector<SplitTransition>& gt,
                     const std::vector<SplitTransition>& inf);
MatchReport match_report(const std::vector<SplitTransition>& gt,
                         const std::vector<SplitTransition>& inf);

struct Deviation {
    enum class Kind { MissingState, ExtraState, Behavior };
    Kind kind = Kind::Behavior;
    std::string state;                               // start state examined
    std::string transition;                          // subject transition label
    std::map<std::string, logic::Value> assignment;  // distinguishing assignment
    std::string detail;
};

// Exhaustive comparison over the finite condition alphabet: lists subject
// transitions whose satisfying assignments lead to different fired actions
// or end states than the reference, one distinguishing assignment each.
std::vector<Deviation> diff_fsm(const fsm::Fsm& reference, const fsm::Fsm& subject,
                                const logic::Limits& limits = {});

std::string deviations_to_json(const std::vector<Deviation>& ds);

}  // namespace specfsm::metrics

#endif
