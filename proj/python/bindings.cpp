// Python bindings. The C++ side exchanges JSON strings; the `specfsm`
// package wraps them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>
#include <set>
#include <string>
#include <vector>

#include "specfsm/checker.hpp"
#include "specfsm/fsm.hpp"
#include "specfsm/metrics.hpp"
#include "specfsm/pipeline.hpp"

namespace py = pybind11;
using namespace specfsm;

namespace {

fsm::Model model_of(const std::string& json_text) {
    return fsm::model_from_json(nlohmann::json::parse(json_text));
}

std::vector<fsm::Transition> all_transitions(const fsm::Model& m) {
    std::vector<fsm::Transition> out;
    for (const auto& f : m.fsms)
        out.insert(out.end(), f.transitions.begin(), f.transitions.end());
    return out;
}

nlohmann::ordered_json extract_to_json(const pipeline::ExtractResult& res) {
    nlohmann::ordered_json j;
    j["model"] = fsm::model_to_json(res.model);
    j["diagnostics"] = nlohmann::ordered_json::array();
    for (const auto& d : res.diagnostics)
        j["diagnostics"].push_back({{"kind", d.kind},
                                    {"paragraph", d.paragraph},
                                    {"block", d.block},
                                    {"detail", d.detail}});
    j["transitions"] = nlohmann::ordered_json::array();
    for (const auto& ir : res.irs)
        j["transitions"].push_back({{"block", ir.block},
                                    {"participant", ir.participant},
                                    {"condition", ir.condition},
                                    {"actions", ir.actions}});
    j["graphs"] = nlohmann::ordered_json::object();
    for (const auto& f : res.model.fsms) j["graphs"][f.participant] = fsm::emit_graph(f);
    return j;
}

std::string py_extract_file(const std::string& corpus_path, const std::string& config_path) {
    auto cfg = pipeline::PipelineConfig::load(config_path);
    return extract_to_json(pipeline::extract_file(corpus_path, cfg)).dump(2);
}

std::string py_extract_text(const std::string& corpus_text, const std::string& config_path) {
    auto cfg = pipeline::PipelineConfig::load(config_path);
    auto lex = lexicon::Lexicon::load(cfg.lexicon_path);
    auto rules = dsl::load_dsl_rules(cfg.rules_path);
    return extract_to_json(pipeline::extract(corpus_text, lex, rules, cfg)).dump(2);
}

std::string py_check(const std::string& model_json, const std::string& properties_text,
                     const std::vector<std::string>& capabilities,
                     const std::vector<std::string>& injectable, int replay_buffer,
                     int bound, std::size_t memory_cap) {
    fsm::Model model = model_of(model_json);
    checker::AdversaryConfig adv;
    adv.capabilities = std::set<std::string>(capabilities.begin(), capabilities.end());
    adv.injectable_messages = injectable;
    adv.replay_buffer_size = replay_buffer;
    adv.validate();

    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& p : checker::parse_property_file(properties_text)) {
        checker::CheckOptions opt;
        opt.bound = p.bound.value_or(bound);
        opt.memory_cap_states = memory_cap;
        checker::Verdict v = checker::check(model, adv, p, opt);
        nlohmann::ordered_json jv;
        jv["property"] = p.name;
        jv["verdict"] = v.kind == checker::Verdict::Kind::Proven ? "proven"
                        : v.kind == checker::Verdict::Kind::HoldsWithinBound
                            ? "holds_within_bound"
                            : "violated";
        jv["bound"] = opt.bound;
        if (v.trace) {
            jv["trace"] = checker::render_trace(*v.trace, true);
            jv["trace_steps"] = v.trace->steps.size();
        }
        out.push_back(std::move(jv));
    }
    return out.dump(2);
}

std::string py_score(const std::string& gold_json, const std::string& subject_json) {
    logic::Limits limits;
    auto rep = metrics::match_report(
        metrics::split_for_scoring(all_transitions(model_of(gold_json)), limits),
        metrics::split_for_scoring(all_transitions(model_of(subject_json)), limits));
    return rep.to_json();
}

std::string py_diff(const std::string& reference_json, const std::string& subject_json) {
    fsm::Model reference = model_of(reference_json);
    fsm::Model subject = model_of(subject_json);
    logic::Limits limits;
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& rf : reference.fsms)
        for (const auto& sf : subject.fsms) {
            if (rf.participant != sf.participant) continue;
            nlohmann::ordered_json entry;
            entry["participant"] = rf.participant;
            entry["deviations"] =
                nlohmann::json::parse(metrics::deviations_to_json(metrics::diff_fsm(rf, sf, limits)));
            out.push_back(std::move(entry));
        }
    return out.dump(2);
}

std::string py_transpile(const std::string& model_json) {
    return checker::transpile_smv(model_of(model_json));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "FSM extraction, checking, and scoring for protocol specifications";
    m.def("extract_file", &py_extract_file, py::arg("corpus_path"), py::arg("config_path"),
          "Extract a model from an annotated corpus file; returns JSON text.");
    m.def("extract_text", &py_extract_text, py::arg("corpus_text"), py::arg("config_path"),
          "Extract a model from annotated corpus text; returns JSON text.");
    m.def("check", &py_check, py::arg("model_json"), py::arg("properties_text"),
          py::arg("capabilities") = std::vector<std::string>{},
          py::arg("injectable") = std::vector<std::string>{}, py::arg("replay_buffer") = 1,
          py::arg("bound") = 40, py::arg("memory_cap") = std::size_t(500000),
          "Check LTL properties under an adversary; returns JSON text.");
    m.def("score", &py_score, py::arg("gold_json"), py::arg("subject_json"),
          "Score a model against a gold model; returns JSON text.");
    m.def("diff", &py_diff, py::arg("reference_json"), py::arg("subject_json"),
          "Behavioral diff between models sharing participants; returns JSON text.");
    m.def("transpile", &py_transpile, py::arg("model_json"),
          "Render a model as SMV-like text.");
}
