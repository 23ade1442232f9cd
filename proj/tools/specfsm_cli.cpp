// Command-line driver: extract models from annotated corpora, check
// properties under an adversary, score against gold models, diff models,
// and mine lexicon candidates.
//
// Exit codes: 0 success, 2 input parsing failed (config, corpus, model,
// or property files), 3 extraction/translation failed, 4 checking failed,
// 5 scoring or diffing failed.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "specfsm/checker.hpp"
#include "specfsm/fsm.hpp"
#include "specfsm/metrics.hpp"
#include "specfsm/pipeline.hpp"

using namespace specfsm;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitTranslate = 3;
constexpr int kExitCheck = 4;
constexpr int kExitScore = 5;

int fail(int code, const std::string& what) {
    std::cerr << "error: " << what << "\n";
    return code;
}

fsm::Model load_model(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw pipeline::PipelineError("cannot open model file: " + path);
    nlohmann::json j;
    f >> j;
    return fsm::model_from_json(j);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw pipeline::PipelineError("cannot write " + path.string());
    f << text;
}

std::vector<fsm::Transition> all_transitions(const fsm::Model& m) {
    std::vector<fsm::Transition> out;
    for (const auto& f : m.fsms)
        out.insert(out.end(), f.transitions.begin(), f.transitions.end());
    return out;
}

struct CheckFlags {
    std::string capabilities;
    std::string injectable;
    int replay_buffer = 1;
    int bound = 40;
    std::size_t memory_cap = 500000;
    bool full_state = false;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s + ",") {
        if (c == ',') {
            std::size_t b = cur.find_first_not_of(" \t");
            std::size_t e = cur.find_last_not_of(" \t");
            if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

int run_extract(const std::string& corpus, const std::string& config_path,
                const std::string& out_dir) {
    pipeline::PipelineConfig cfg;
    try {
        cfg = pipeline::PipelineConfig::load(config_path);
    } catch (const std::exception& e) {
        return fail(kExitParse, e.what());
    }
    pipeline::ExtractResult res;
    try {
        res = pipeline::extract_file(corpus, cfg);
    } catch (const annotation::AnnotationError& e) {
        return fail(kExitParse, e.what());
    } catch (const std::exception& e) {
        return fail(kExitTranslate, e.what());
    }
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "model.json", fsm::model_to_json(res.model).dump(2) + "\n");
    for (const auto& f : res.model.fsms) {
        std::string name = f.participant;
        for (auto& c : name) c = std::tolower(static_cast<unsigned char>(c));
        write_file(dir / (name + ".dot"), fsm::emit_graph(f));
    }
    // diagnostics are part of the contract even on a clean run
    write_file(dir / "diagnostics.txt", pipeline::diagnostics_report(res.diagnostics));
    std::string irs;
    for (const auto& ir : res.irs) {
        irs += "[" + std::to_string(ir.block) + "] " + ir.participant + " | " +
               ir.condition + " / ";
        for (std::size_t i = 0; i < ir.actions.size(); ++i)
            irs += (i ? ", " : "") + ir.actions[i];
        irs += "\n";
    }
    write_file(dir / "transitions.txt", irs);
    std::cout << "extracted " << res.irs.size() << " transitions, "
              << res.diagnostics.size() << " diagnostics -> " << out_dir << "\n";
    return 0;
}

int run_check(const std::string& model_path, const std::string& props_path,
              const CheckFlags& flags) {
    fsm::Model model;
    std::vector<checker::LtlProperty> props;
    checker::AdversaryConfig adv;
    try {
        model = load_model(model_path);
        props = checker::parse_property_file(pipeline::read_text_file(props_path));
        for (const auto& c : split_list(flags.capabilities)) adv.capabilities.insert(c);
        adv.injectable_messages = split_list(flags.injectable);
        adv.replay_buffer_size = flags.replay_buffer;
        adv.validate();
    } catch (const std::exception& e) {
        return fail(kExitParse, e.what());
    }
    try {
        for (const auto& p : props) {
            checker::CheckOptions opt;
            opt.bound = p.bound.value_or(flags.bound);
            opt.memory_cap_states = flags.memory_cap;
            checker::Verdict v = checker::check(model, adv, p, opt);
            switch (v.kind) {
                case checker::Verdict::Kind::Proven:
                    std::cout << p.name << ": proven\n";
                    break;
                case checker::Verdict::Kind::HoldsWithinBound:
                    std::cout << p.name << ": holds within bound " << opt.bound << "\n";
                    break;
                case checker::Verdict::Kind::Violated:
                    std::cout << p.name << ": violated\n"
                              << checker::render_trace(*v.trace, flags.full_state) << "\n";
                    break;
            }
        }
    } catch (const std::exception& e) {
        return fail(kExitCheck, e.what());
    }
    return 0;
}

int run_score(const std::string& gold_path, const std::string& subject_path) {
    fsm::Model gold, subject;
    try {
        gold = load_model(gold_path);
        subject = load_model(subject_path);
    } catch (const std::exception& e) {
        return fail(kExitParse, e.what());
    }
    try {
        logic::Limits limits;
        auto rep = metrics::match_report(
            metrics::split_for_scoring(all_transitions(gold), limits),
            metrics::split_for_scoring(all_transitions(subject), limits));
        std::cout << rep.to_table();
    } catch (const std::exception& e) {
        return fail(kExitScore, e.what());
    }
    return 0;
}

int run_diff(const std::string& reference_path, const std::string& subject_path) {
    fsm::Model reference, subject;
    try {
        reference = load_model(reference_path);
        subject = load_model(subject_path);
    } catch (const std::exception& e) {
        return fail(kExitParse, e.what());
    }
    try {
        logic::Limits limits;
        bool any = false;
        for (const auto& rf : reference.fsms) {
            for (const auto& sf : subject.fsms) {
                if (rf.participant != sf.participant) continue;
                auto devs = metrics::diff_fsm(rf, sf, limits);
                if (!devs.empty()) any = true;
                std::cout << metrics::deviations_to_json(devs) << "\n";
            }
        }
        if (!any) std::cout << "no behavioral deviations\n";
    } catch (const std::exception& e) {
        return fail(kExitScore, e.what());
    }
    return 0;
}

int run_lexicon_candidates(const std::string& corpus_path, const std::string& seed_path) {
    try {
        lexicon::Lexicon seed;
        if (!seed_path.empty()) seed = lexicon::Lexicon::load(seed_path);
        auto text = pipeline::read_text_file(corpus_path);
        std::vector<std::string> tokens;
        for (const auto& tree : annotation::parse_annotated(text)) {
            auto para = annotation::leaf_tokens(tree);
            tokens.insert(tokens.end(), para.begin(), para.end());
        }
        for (const auto& kw : lexicon::mine_candidates(tokens, seed)) {
            std::cout << kw.id << "\t" << lexicon::type_name(kw.type) << "\t";
            for (std::size_t i = 0; i < kw.surface_forms.size(); ++i) {
                if (i) std::cout << "|";
                for (std::size_t j = 0; j < kw.surface_forms[i].size(); ++j)
                    std::cout << (j ? " " : "") << kw.surface_forms[i][j];
            }
            std::cout << "\n";
        }
    } catch (const std::exception& e) {
        return fail(kExitParse, e.what());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FSM extraction, checking, and scoring for protocol specifications"};
    app.require_subcommand(1);

    std::string corpus, config_path, out_dir = "out";
    auto* extract = app.add_subcommand("extract", "Extract a model from an annotated corpus");
    extract->add_option("corpus", corpus, "annotated corpus file")->required();
    extract->add_option("--config", config_path, "pipeline config file")->required();
    extract->add_option("--out-dir", out_dir, "output directory");

    std::string model_path, props_path;
    CheckFlags flags;
    auto* check = app.add_subcommand("check", "Check LTL properties under an adversary");
    check->add_option("model", model_path, "model JSON file")->required();
    check->add_option("properties", props_path, "property file")->required();
    check->add_option("--capabilities", flags.capabilities,
                      "comma list: drop,modify,inject,replay");
    check->add_option("--injectable", flags.injectable, "comma list of messages");
    check->add_option("--replay-buffer", flags.replay_buffer, "replay buffer size");
    check->add_option("--bound", flags.bound, "exploration bound");
    check->add_option("--memory-cap", flags.memory_cap, "state count cap");
    check->add_flag("--full-state", flags.full_state, "print full stores in traces");

    std::string gold_path, subject_path;
    auto* score = app.add_subcommand("score", "Score a model against a gold model");
    score->add_option("gold", gold_path, "gold model JSON")->required();
    score->add_option("subject", subject_path, "model JSON to score")->required();

    std::string ref_path, diff_subject;
    auto* diff = app.add_subcommand("diff", "Behavioral diff of two models");
    diff->add_option("reference", ref_path, "reference model JSON")->required();
    diff->add_option("subject", diff_subject, "subject model JSON")->required();

    std::string mine_corpus, seed_path;
    auto* mine = app.add_subcommand("lexicon-candidates", "Mine keyword candidates");
    mine->add_option("corpus", mine_corpus, "annotated corpus file")->required();
    mine->add_option("--lexicon", seed_path, "existing lexicon to extend");

    CLI11_PARSE(app, argc, argv);

    if (extract->parsed()) return run_extract(corpus, config_path, out_dir);
    if (check->parsed()) return run_check(model_path, props_path, flags);
    if (score->parsed()) return run_score(gold_path, subject_path);
    if (diff->parsed()) return run_diff(ref_path, diff_subject);
    if (mine->parsed()) return run_lexicon_candidates(mine_corpus, seed_path);
    return 1;
}
