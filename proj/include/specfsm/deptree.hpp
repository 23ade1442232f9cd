#ifndef SPECFSM_DEPTREE_HPP
#define SPECFSM_DEPTREE_HPP

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "specfsm/lexicon.hpp"

// Deterministic dependency parsing over the constrained specification
// sublanguage (subject-modal-verb-arguments, passives, "upon VERBing X"),
// plus logical-operator restructuring into internal nodes.

namespace specfsm::deptree {

class NoVerbFound : public std::runtime_error {
public:
    explicit NoVerbFound(const std::string& span)
        : std::runtime_error("no recognizable action verb in span: " + span) {}
};

class DanglingConnective : public std::runtime_error {
public:
    explicit DanglingConnective(const std::string& what) : std::runtime_error(what) {}
};

enum class Pos { Verb, Noun, AgentNoun, Modal, Negation, Connective, Preposition, Other };
enum class Rel { Root, Subject, Object, Modifier, Conjunct, Operand, Prep };

std::string pos_name(Pos p);
std::string rel_name(Rel r);

struct DepNode {
    std::string token;                      // lemma for verbs, keyword id for links
    const lexicon::Keyword* keyword = nullptr;
    Pos pos = Pos::Other;
    Rel rel = Rel::Root;
    int number = -1;                        // bound ordinal/numeral, if any
    std::vector<DepNode> children;
};

// Verb knowledge shared with the DSL rule file: every recognizable trigger
// form mapped to its lemma, plus the weak/strong modal split.
struct VerbLexicon {
    std::map<std::string, std::string> form_to_lemma;
    std::set<std::string> weak_modals{"may", "should", "can"};
    std::set<std::string> strong_modals{"shall", "must", "will"};

    bool is_verb_form(const std::string& tok) const { return form_to_lemma.count(tok) > 0; }
    std::string lemma(const std::string& tok) const {
        auto it = form_to_lemma.find(tok);
        return it == form_to_lemma.end() ? tok : it->second;
    }
};

DepNode parse_dependencies(const lexicon::LinkedText& text, const VerbLexicon& verbs);
DepNode restructure_logical(const DepNode& tree);

// Multiset of keyword ids in the tree (for the leaf-preservation property).
std::vector<std::string> keyword_leaves(const DepNode& tree);

std::string to_text(const DepNode& tree);  // indented debug form
std::string to_dot(const DepNode& tree);

}  // namespace specfsm::deptree

#endif
