#include "specfsm/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "specfsm/annotation.hpp"
#include "specfsm/deptree.hpp"

namespace specfsm::pipeline {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw PipelineError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void apply_key(PipelineConfig& c, const std::string& key, const std::string& value,
               const std::string& origin) {
    try {
        if (key == "lexicon_path") c.lexicon_path = value;
        else if (key == "rules_path") c.rules_path = value;
        else if (key == "link_threshold") c.link_threshold = std::stod(value);
        else if (key == "context_depth") c.context_depth = std::stoul(value);
        else if (key == "max_atoms") c.max_atoms = std::stoul(value);
        else if (key == "max_terms") c.max_terms = std::stoul(value);
        else if (key == "checker_bound") c.checker_bound = std::stoi(value);
        else if (key == "memory_cap_states") c.memory_cap_states = std::stoul(value);
        else if (key == "adversary_capabilities") {
            c.adversary_capabilities.clear();
            for (const auto& s : split_list(value)) c.adversary_capabilities.insert(s);
        } else if (key == "injectable_messages") c.injectable_messages = split_list(value);
        else if (key == "replay_buffer_size") c.replay_buffer_size = std::stoi(value);
        else if (key == "default_participant") c.default_participant = value;
        else throw ConfigError(origin + ": unknown config key: " + key);
    } catch (const std::invalid_argument&) {
        throw ConfigError(origin + ": bad value for " + key + ": " + value);
    } catch (const std::out_of_range&) {
        throw ConfigError(origin + ": bad value for " + key + ": " + value);
    }
}

const char* kScalarKeys[] = {
    "lexicon_path",     "rules_path",       "link_threshold",
    "context_depth",    "max_atoms",        "max_terms",
    "checker_bound",    "memory_cap_states", "adversary_capabilities",
    "injectable_messages", "replay_buffer_size", "default_participant"};

}  // namespace

PipelineConfig PipelineConfig::parse(const std::string& text, const std::string& origin) {
    PipelineConfig c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected `key = value`");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.rfind("channel ", 0) == 0) {
            std::istringstream ks(key.substr(8));
            std::string src, dst;
            ks >> src >> dst;
            if (src.empty() || dst.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": expected `channel <src> <dst> = <name>`");
            auto lower = [](std::string s) {
                std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) {
                    return std::tolower(ch);
                });
                return s;
            };
            c.channel_names[{lower(src), lower(dst)}] = value;
            continue;
        }
        apply_key(c, key, value, origin + ":" + std::to_string(lineno));
    }
    return c;
}

void PipelineConfig::apply_env_overrides() {
    for (const char* key : kScalarKeys) {
        std::string env = "SPECFSM_";
        for (const char* p = key; *p; ++p)
            env += static_cast<char>(std::toupper(static_cast<unsigned char>(*p)));
        if (const char* v = std::getenv(env.c_str())) apply_key(*this, key, v, env);
    }
}

void PipelineConfig::validate() const {
    for (const auto& [what, path] :
         {std::pair<const char*, const std::string&>{"lexicon_path", lexicon_path},
          {"rules_path", rules_path}}) {
        if (path.empty()) throw ConfigError(std::string(what) + " not set");
        if (!std::filesystem::exists(path))
            throw ConfigError(std::string(what) + " does not exist: " + path);
    }
    if (link_threshold <= 0 || link_threshold >= 1)
        throw ConfigError("link_threshold must be in (0, 1)");
    if (max_atoms == 0 || max_terms == 0 || checker_bound <= 0 ||
        memory_cap_states == 0 || replay_buffer_size <= 0)
        throw ConfigError("numeric knobs must be positive");
    if (default_participant.empty()) throw ConfigError("default_participant not set");
}

PipelineConfig PipelineConfig::load(const std::string& path) {
    PipelineConfig c = parse(read_text_file(path), path);
    c.apply_env_overrides();
    // relative paths resolve against the config file's directory
    std::filesystem::path base = std::filesystem::path(path).parent_path();
    for (std::string* p : {&c.lexicon_path, &c.rules_path})
        if (!p->empty() && std::filesystem::path(*p).is_relative())
            *p = (base / *p).string();
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Extraction

namespace {

std::string state_name(const std::string& span_text) {
    std::string out;
    for (char ch : trim(span_text)) {
        if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_')
            out += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        else if (ch == ' ')
            out += '_';
    }
    return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

// the bound agent of the rule's actor slot, if any
std::string actor_of(const dsl::DslAst& ast) {
    for (const auto& slot : ast.rule->slots) {
        if (!slot.is_actor) continue;
        auto it = ast.bindings.find(slot.name);
        if (it != ast.bindings.end() && it->second->keyword &&
            it->second->keyword->type == lexicon::KeywordType::Agent)
            return it->second->keyword->id;
    }
    return "";
}

}  // namespace

ExtractResult extract(const std::string& corpus_text, const lexicon::Lexicon& lex,
                      const dsl::RuleSet& rules, const PipelineConfig& cfg) {
    auto trees = annotation::parse_annotated(corpus_text);
    deptree::VerbLexicon verbs = rules.verb_lexicon();
    ExtractResult res;

    std::vector<std::vector<const lexicon::Keyword*>> para_history;
    std::vector<std::string> participants_seen;
    std::vector<fsm::Transition> transitions;
    int global_block = 0;
    bool any_block = false;

    for (std::size_t pi = 0; pi < trees.size(); ++pi) {
        const annotation::AnnotationTree& tree = trees[pi];
        auto para_linked =
            lexicon::link_keywords(annotation::leaf_tokens(tree), lex, cfg.link_threshold);
        std::vector<const lexicon::Keyword*> para_kws;
        for (const auto& tok : para_linked.tokens) {
            if (!tok.keyword) continue;
            para_kws.push_back(tok.keyword);
            if (tok.keyword->type == lexicon::KeywordType::Agent &&
                std::find(participants_seen.begin(), participants_seen.end(),
                          tok.keyword->id) == participants_seen.end())
                participants_seen.push_back(tok.keyword->id);
        }

        auto blocks = annotation::extract_ctl_blocks(tree);
        std::vector<logic::ExprPtr> full_condition(blocks.size());
        std::vector<std::string> block_participant(blocks.size());

        for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
            const annotation::CtlBlock& block = blocks[bi];
            any_block = true;
            int b = global_block++;

            dsl::Context ctx;
            auto block_linked = lexicon::link_keywords(
                annotation::leaf_tokens(*block.tree), lex, cfg.link_threshold);
            for (const auto& tok : block_linked.tokens)
                if (tok.keyword) ctx.block_keywords.push_back(tok.keyword);
            ctx.paragraph_keywords = para_kws;
            for (auto it = para_history.rbegin(); it != para_history.rend(); ++it)
                ctx.history.push_back(*it);
            ctx.backtrack_depth = cfg.context_depth;
            ctx.participants = participants_seen;
            ctx.default_participant = cfg.default_participant;
            ctx.channel_names = cfg.channel_names;

            dsl::DirectiveCounter dc;
            dc.block_index = b;

            fsm::BlockIr bir;
            bir.block_index = b;
            if (block.parent >= 0)
                bir.inherited_condition = full_condition[block.parent];
            std::string actor;
            std::string condition_actor;
            std::vector<logic::ExprPtr> directive_conditions;

            bir.connective_tokens.push_back(block.connective_tokens[0]);
            auto merge_gap = [&](const std::vector<std::string>& gap) {
                auto& last = bir.connective_tokens.back();
                last.insert(last.end(), gap.begin(), gap.end());
            };
            for (std::size_t ci = 0; ci < block.components.size(); ++ci) {
                const annotation::AnnotationTree* comp = block.components[ci];
                const auto& gap_after = block.connective_tokens[ci + 1];
                if (comp->label == annotation::TagLabel::Control) {
                    merge_gap(gap_after);  // nested blocks are their own units
                    continue;
                }
                fsm::BlockIr::Component c;
                c.label = comp->label;
                bool ok = true;
                if (comp->label == annotation::TagLabel::StartState ||
                    comp->label == annotation::TagLabel::EndState) {
                    c.state = state_name(annotation::plain_text(*comp));
                    ok = !c.state.empty();
                } else {
                    auto tokens = annotation::leaf_tokens(*comp);
                    try {
                        auto linked = lexicon::link_keywords(tokens, lex, cfg.link_threshold);
                        auto dep = deptree::restructure_logical(
                            deptree::parse_dependencies(linked, verbs));
                        dsl::DslAst ast = dsl::map_to_ast(dep, rules, tokens);
                        dsl::resolve_context(ast, ctx, lex, &res.resolutions);
                        if (comp->label == annotation::TagLabel::Condition) {
                            dsl::IrFormula ir =
                                dsl::interpret_ast(ast, dsl::Mode::Condition, ctx);
                            c.condition = ir.condition;
                            // a condition's actor (e.g. the receiver) names the
                            // participant when no action span does
                            if (condition_actor.empty())
                                condition_actor = actor_of(ast);
                        } else {
                            dsl::IrFormula ir =
                                dsl::interpret_ast(ast, dsl::Mode::Action, ctx);
                            c.actions = ir.actions;
                            if (actor.empty()) actor = actor_of(ast);
                            // weak modals ("may", "should", "can") governing an
                            // action make the whole transition nondeterministic;
                            // the modal usually sits just before the span
                            std::vector<std::string> modal_scope =
                                bir.connective_tokens.back();
                            modal_scope.insert(modal_scope.end(), tokens.begin(),
                                               tokens.end());
                            logic::ExprPtr directive = dsl::apply_directives(
                                modal_scope, logic::mk_true(), verbs, dc);
                            if (directive->kind != logic::BoolExpr::Kind::True)
                                directive_conditions.push_back(directive);
                        }
                    } catch (const std::exception& e) {
                        ok = false;
                        res.diagnostics.push_back({"skipped-span", static_cast<int>(pi), b,
                                                   join_tokens(tokens) + ": " + e.what()});
                    }
                }
                if (ok) {
                    bir.components.push_back(std::move(c));
                    bir.connective_tokens.push_back(gap_after);
                } else {
                    merge_gap(gap_after);
                }
            }

            for (const logic::ExprPtr& d : directive_conditions) {
                fsm::BlockIr::Component c;
                c.label = annotation::TagLabel::Condition;
                c.condition = d;
                bir.components.push_back(std::move(c));
                bir.connective_tokens.push_back({});  // empty gap: conjoined
            }

            for (const dsl::IrFormula& f :
                 fsm::recover_missing_actions(block, rules, lex, ctx)) {
                fsm::BlockIr::Component c;
                c.label = annotation::TagLabel::Action;
                c.actions = f.actions;
                bir.components.push_back(std::move(c));
                bir.connective_tokens.push_back({});
                res.diagnostics.push_back(
                    {"recovered-action", static_cast<int>(pi), b, f.to_ir_dump()});
            }

            full_condition[bi] = fsm::combined_condition(bir);
            bir.participant = !actor.empty()            ? actor
                              : !condition_actor.empty() ? condition_actor
                              : block.parent >= 0        ? block_participant[block.parent]
                                                         : cfg.default_participant;
            block_participant[bi] = bir.participant;

            try {
                std::vector<std::string> combine_diags;
                auto ts = fsm::combine_block(bir, &combine_diags, cfg.limits());
                for (const auto& d : combine_diags)
                    res.diagnostics.push_back(
                        {"dropped-transition", static_cast<int>(pi), b, d});
                for (auto& t : ts) {
                    TransitionIr ir;
                    ir.block = b;
                    ir.participant = t.participant;
                    ir.condition = logic::to_string(t.condition);
                    for (const auto& a : t.actions) ir.actions.push_back(a.to_string());
                    res.irs.push_back(std::move(ir));
                    transitions.push_back(std::move(t));
                }
            } catch (const fsm::FsmError& e) {
                res.diagnostics.push_back(
                    {"dropped-transition", static_cast<int>(pi), b, e.what()});
            }
        }
        para_history.push_back(std::move(para_kws));
    }

    if (!any_block) throw PipelineError("corpus contains no control blocks");

    dsl::Context doc_ctx;
    doc_ctx.participants = participants_seen;
    doc_ctx.default_participant = cfg.default_participant;
    doc_ctx.channel_names = cfg.channel_names;
    res.model = fsm::compile_model(transitions, doc_ctx);

    for (auto& f : res.model.fsms) {
        std::vector<std::string> merge_diags;
        f = fsm::merge_split_transitions(f, &merge_diags, cfg.limits());
        for (const auto& d : merge_diags)
            res.diagnostics.push_back({"merge-skip", -1, -1, f.participant + ": " + d});
    }
    return res;
}

ExtractResult extract_file(const std::string& corpus_path, const PipelineConfig& cfg) {
    lexicon::Lexicon lex = lexicon::Lexicon::load(cfg.lexicon_path);
    dsl::RuleSet rules = dsl::load_dsl_rules(cfg.rules_path);
    return extract(read_text_file(corpus_path), lex, rules, cfg);
}

std::string diagnostics_report(const std::vector<Diagnostic>& ds) {
    std::vector<const Diagnostic*> sorted;
    for (const auto& d : ds) sorted.push_back(&d);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Diagnostic* a, const Diagnostic* b) {
                         return std::tie(a->paragraph, a->block, a->kind, a->detail) <
                                std::tie(b->paragraph, b->block, b->kind, b->detail);
                     });
    std::ostringstream os;
    for (const Diagnostic* d : sorted) {
        os << d->kind;
        if (d->paragraph >= 0) os << " paragraph=" << d->paragraph;
        if (d->block >= 0) os << " block=" << d->block;
        os << ": " << d->detail << "\n";
    }
    return os.str();
}

}  // namespace specfsm::pipeline
