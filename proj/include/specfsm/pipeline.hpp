#ifndef SPECFSM_PIPELINE_HPP
#define SPECFSM_PIPELINE_HPP

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "specfsm/dsl.hpp"
#include "specfsm/fsm.hpp"
#include "specfsm/lexicon.hpp"
#include "specfsm/logic.hpp"

// End-to-end extraction: annotated corpus text in, compiled and merged
// model out, with diagnostics for every span the pipeline could not use.

namespace specfsm::pipeline {

class PipelineError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class ConfigError : public PipelineError {
    using PipelineError::PipelineError;
};

struct PipelineConfig {
    std::string lexicon_path;
    std::string rules_path;
    double link_threshold = 0.2;
    std::size_t context_depth = 5;  // paragraphs searched by the resolver
    std::size_t max_atoms = 24;
    std::size_t max_terms = 4096;
    int checker_bound = 40;
    std::size_t memory_cap_states = 500000;
    std::set<std::string> adversary_capabilities;
    std::vector<std::string> injectable_messages;
    int replay_buffer_size = 1;
    std::string default_participant = "UE";
    // channel naming overrides: (src, dst) -> channel variable name
    std::map<std::pair<std::string, std::string>, std::string> channel_names;

    // Text format, one `key = value` per line, '#' comments. Keys match the
    // field names above; capabilities and messages are comma-separated;
    // channel overrides are `channel <src> <dst> = <name>` lines.
    static PipelineConfig parse(const std::string& text,
                                const std::string& origin = "<string>");
    static PipelineConfig load(const std::string& path);  // parse + env + validate

    // Environment overrides: SPECFSM_<UPPERCASED_KEY> replaces the file value.
    void apply_env_overrides();
    void validate() const;  // paths exist, numeric knobs positive

    logic::Limits limits() const { return {max_atoms, max_terms}; }
};

struct Diagnostic {
    std::string kind;  // skipped-span | recovered-action | dropped-transition |
                       // merge-skip | unresolved-slot
    int paragraph = -1;
    int block = -1;
    std::string detail;
};

struct TransitionIr {
    int block = -1;
    std::string participant;
    std::string condition;             // printed form (`chan_a_b = msg & ...`)
    std::vector<std::string> actions;  // printed forms (`x = v`)
};

struct ExtractResult {
    fsm::Model model;
    std::vector<Diagnostic> diagnostics;
    std::vector<dsl::ResolutionLogEntry> resolutions;
    std::vector<TransitionIr> irs;  // pre-merge transitions, document order
};

ExtractResult extract(const std::string& corpus_text, const lexicon::Lexicon& lex,
                      const dsl::RuleSet& rules, const PipelineConfig& cfg);
// Loads the lexicon and rules from the config's paths.
ExtractResult extract_file(const std::string& corpus_path, const PipelineConfig& cfg);

// Deterministic human-readable report; one line per diagnostic, sorted by
// (paragraph, block, kind, detail).
std::string diagnostics_report(const std::vector<Diagnostic>& ds);

std::string read_text_file(const std::string& path);  // throws PipelineError

}  // namespace specfsm::pipeline

#endif
