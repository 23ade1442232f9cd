#ifndef SPECFSM_LEXICON_HPP
#define SPECFSM_LEXICON_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Typed lexicon of protocol identifiers and fuzzy longest-match linking of
// multi-token surface mentions to single canonical keywords.

namespace specfsm::lexicon {

class LexiconError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class DuplicateId : public LexiconError {
    using LexiconError::LexiconError;
};
class TypelessSeedEntry : public LexiconError {
    using LexiconError::LexiconError;
};

enum class KeywordType {
    Agent, Message, State, Timer, Counter, Variable, Procedure, Mode, Service, Cause, Misc
};

std::string type_name(KeywordType t);
std::optional<KeywordType> type_from_name(const std::string& name);

struct Keyword {
    std::string id;  // canonical single token, no whitespace
    KeywordType type = KeywordType::Misc;
    std::vector<std::vector<std::string>> surface_forms;  // token sequences
};

std::size_t levenshtein(const std::string& a, const std::string& b);
// Levenshtein over lowercased characters divided by max length.
double normalized_distance(const std::string& a, const std::string& b);

// Lowercase, spaces to underscores, abbreviation table applied
// (request -> req, authentication -> auth, ...).
std::string canonical_id(const std::vector<std::string>& tokens);

class Lexicon {
public:
    const Keyword& add(Keyword kw);  // throws DuplicateId
    const Keyword* find(const std::string& id) const;
    const std::vector<Keyword>& entries() const { return entries_; }
    std::vector<const Keyword*> of_type(KeywordType t) const;
    std::size_t max_surface_len() const { return max_surface_len_; }

    // File format: `id<TAB>type<TAB>surface form 1|surface form 2|...`,
    // '#' starts a comment line.
    static Lexicon load(const std::string& path);
    static Lexicon parse(const std::string& text, const std::string& origin = "<string>");
    std::string serialize() const;

private:
    std::vector<Keyword> entries_;
    std::map<std::string, std::size_t> by_id_;
    std::size_t max_surface_len_ = 0;
};

// Deterministic noun-phrase mining: all-caps message names, "timer Tnnnn",
// "... counter" phrases, quoted IE names. Candidates come back typed where
// the pattern implies a type, misc otherwise.
std::vector<Keyword> mine_candidates(const std::vector<std::string>& paragraph_tokens,
                                     const Lexicon& seed);

struct LinkedToken {
    std::string text;            // raw token, or keyword id when linked
    const Keyword* keyword = nullptr;
    std::vector<std::string> matched;  // consumed source tokens when linked
};

struct LinkedText {
    std::vector<LinkedToken> tokens;
    std::string to_string() const;
};

LinkedText link_keywords(const std::vector<std::string>& tokens, const Lexicon& lexicon,
                         double threshold = 0.2);

}  // namespace specfsm::lexicon

#endif
