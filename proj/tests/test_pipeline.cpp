#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "specfsm/pipeline.hpp"

using namespace specfsm;
using pipeline::PipelineConfig;

namespace {

const std::string kFixtureDir = std::string(SPECFSM_SOURCE_DIR) + "/data/fixtures";

pipeline::ExtractResult extract_table5() {
    auto cfg = PipelineConfig::load(kFixtureDir + "/table5/config.cfg");
    return pipeline::extract_file(kFixtureDir + "/table5/corpus.txt", cfg);
}

}  // namespace

TEST_CASE("config: parse basics") {
    auto c = PipelineConfig::parse(
        "# comment\n"
        "lexicon_path = lex.tsv\n"
        "rules_path = rules.txt\n"
        "link_threshold = 0.3\n"
        "context_depth = 7\n"
        "max_atoms = 12\n"
        "checker_bound = 10\n"
        "adversary_capabilities = drop, replay\n"
        "injectable_messages = ping, pong\n"
        "replay_buffer_size = 2\n"
        "default_participant = AMF\n"
        "channel MME UE = chan_ue_mme\n");
    CHECK(c.lexicon_path == "lex.tsv");
    CHECK(c.rules_path == "rules.txt");
    CHECK(c.link_threshold == doctest::Approx(0.3));
    CHECK(c.context_depth == 7);
    CHECK(c.max_atoms == 12);
    CHECK(c.checker_bound == 10);
    CHECK(c.adversary_capabilities == std::set<std::string>{"drop", "replay"});
    CHECK(c.injectable_messages == std::vector<std::string>{"ping", "pong"});
    CHECK(c.replay_buffer_size == 2);
    CHECK(c.default_participant == "AMF");
    REQUIRE(c.channel_names.count({"mme", "ue"}) == 1);
    CHECK(c.channel_names.at({"mme", "ue"}) == "chan_ue_mme");
}

TEST_CASE("config: parse errors carry location") {
    CHECK_THROWS_AS(PipelineConfig::parse("nonsense line\n"), pipeline::ConfigError);
    CHECK_THROWS_AS(PipelineConfig::parse("unknown_key = 1\n"), pipeline::ConfigError);
    CHECK_THROWS_AS(PipelineConfig::parse("link_threshold = abc\n"), pipeline::ConfigError);
    try {
        PipelineConfig::parse("\nbad\n", "f.cfg");
        FAIL("expected ConfigError");
    } catch (const pipeline::ConfigError& e) {
        CHECK(std::string(e.what()).find("f.cfg:2") != std::string::npos);
    }
}

TEST_CASE("config: validate rejects bad knobs and missing paths") {
    auto c = PipelineConfig::parse("lexicon_path = /nonexistent.tsv\nrules_path = /nonexistent.txt\n");
    CHECK_THROWS_AS(c.validate(), pipeline::ConfigError);
    c.lexicon_path = kFixtureDir + "/table5/lexicon.tsv";
    c.rules_path = std::string(SPECFSM_SOURCE_DIR) + "/data/dsl_rules.txt";
    CHECK_NOTHROW(c.validate());
    auto bad = c;
    bad.link_threshold = 1.5;
    CHECK_THROWS_AS(bad.validate(), pipeline::ConfigError);
    bad = c;
    bad.checker_bound = 0;
    CHECK_THROWS_AS(bad.validate(), pipeline::ConfigError);
}

TEST_CASE("config: environment overrides file values") {
    setenv("SPECFSM_LINK_THRESHOLD", "0.45", 1);
    setenv("SPECFSM_DEFAULT_PARTICIPANT", "MME", 1);
    auto c = PipelineConfig::parse("link_threshold = 0.2\n");
    c.apply_env_overrides();
    CHECK(c.link_threshold == doctest::Approx(0.45));
    CHECK(c.default_participant == "MME");
    unsetenv("SPECFSM_LINK_THRESHOLD");
    unsetenv("SPECFSM_DEFAULT_PARTICIPANT");
}

TEST_CASE("config: load resolves relative paths against the config directory") {
    auto c = PipelineConfig::load(kFixtureDir + "/table5/config.cfg");
    CHECK(c.lexicon_path.find("table5") != std::string::npos);
    std::ifstream lex(c.lexicon_path), rules(c.rules_path);
    CHECK(lex.good());
    CHECK(rules.good());
}

TEST_CASE("extract: excerpt rows produce the expected transition IRs") {
    auto res = extract_table5();
    REQUIRE(res.irs.size() == 4);

    CHECK(res.irs[0].condition == "chan_ue_amf = deregistration_accept");
    CHECK(res.irs[0].actions == std::vector<std::string>{"timer_t3522_started = FALSE"});
    CHECK(res.irs[0].participant == "AMF");

    CHECK(res.irs[1].condition ==
          "timer_t3460_started & timer_t3460_expired & timer_t3460_expire_counter = 1");
    CHECK(res.irs[1].actions == std::vector<std::string>{"chan_amf_ue = auth_request"});
    CHECK(res.irs[1].participant == "AMF");

    CHECK(res.irs[2].condition == "accept_sm_command");
    CHECK(res.irs[2].actions ==
          std::vector<std::string>{"nas_security_context_update = TRUE",
                                   "nas_security_context_valid = TRUE"});
    CHECK(res.irs[2].participant == "UE");

    CHECK(res.irs[3].condition == "chan_amf_ue = deregistration_accept & timer_t3519_started");
    CHECK(res.irs[3].actions == std::vector<std::string>{"timer_t3519_started = FALSE"});
    CHECK(res.irs[3].participant == "UE");
}

TEST_CASE("extract: untagged action spans are recovered and reported") {
    auto res = extract_table5();
    bool saw_recovery = false;
    for (const auto& d : res.diagnostics)
        if (d.kind == "recovered-action") saw_recovery = true;
    CHECK(saw_recovery);
}

TEST_CASE("extract: model carries channels, vars, and participants") {
    auto res = extract_table5();
    const auto& m = res.model;
    // Participants appear in document order; the network acts first.
    CHECK(m.participants == std::vector<std::string>{"AMF", "UE"});
    bool has_ue_amf = false, has_amf_ue = false;
    for (const auto& c : m.channels) {
        if (c.name == "chan_ue_amf") has_ue_amf = true;
        if (c.name == "chan_amf_ue") has_amf_ue = true;
    }
    CHECK(has_ue_amf);
    CHECK(has_amf_ue);
    bool has_timer = false;
    for (const auto& v : m.vars)
        if (v.name == "timer_t3522_started") has_timer = true;
    CHECK(has_timer);
}

TEST_CASE("extract: sentences outside the templates are skipped with a diagnostic") {
    auto cfg = PipelineConfig::load(kFixtureDir + "/table5/config.cfg");
    auto lex = lexicon::Lexicon::load(cfg.lexicon_path);
    auto rules = dsl::load_dsl_rules(cfg.rules_path);
    auto res = pipeline::extract(
        "<control><condition>upon receipt of the DEREGISTRATION ACCEPT message,"
        "</condition> <action>the network shall stop timer T3522</action></control>\n\n"
        "<control><condition>If the moon is full,</condition> "
        "<action>the UE shall dance quietly</action></control>\n",
        lex, rules, cfg);
    CHECK(res.irs.size() == 1);
    bool skipped = false;
    for (const auto& d : res.diagnostics)
        if (d.kind == "skipped-span") skipped = true;
    CHECK(skipped);
}

TEST_CASE("extract: nested blocks inherit the parent condition") {
    auto cfg = PipelineConfig::load(kFixtureDir + "/table5/config.cfg");
    auto lex = lexicon::Lexicon::load(cfg.lexicon_path);
    auto rules = dsl::load_dsl_rules(cfg.rules_path);
    auto res = pipeline::extract(
        "<control><condition>If timer T3460 is running,</condition> "
        "<control><condition>upon receipt of the DEREGISTRATION ACCEPT message,"
        "</condition> <action>the network shall stop timer T3522</action>"
        "</control></control>\n",
        lex, rules, cfg);
    REQUIRE(res.irs.size() == 1);
    CHECK(res.irs[0].condition ==
          "timer_t3460_started & chan_ue_amf = deregistration_accept");
}

TEST_CASE("extract: weak modals in action spans introduce a nondeterministic guard") {
    auto cfg = PipelineConfig::load(kFixtureDir + "/table5/config.cfg");
    auto lex = lexicon::Lexicon::load(cfg.lexicon_path);
    auto rules = dsl::load_dsl_rules(cfg.rules_path);
    auto res = pipeline::extract(
        "<control><condition>upon receipt of the DEREGISTRATION ACCEPT message,"
        "</condition> <action>the network may stop timer T3522</action></control>\n",
        lex, rules, cfg);
    REQUIRE(res.irs.size() == 1);
    CHECK(res.irs[0].condition.find("nd_") != std::string::npos);
    bool has_nondet = false;
    for (const auto& v : res.model.vars)
        if (v.nondet) has_nondet = true;
    CHECK(has_nondet);
    // A weak modal inside a condition span must not add a guard (row 3's
    // "can be accepted" stays a plain predicate).
    auto res2 = extract_table5();
    CHECK(res2.irs[2].condition == "accept_sm_command");
}

TEST_CASE("extract: empty corpus is rejected") {
    auto cfg = PipelineConfig::load(kFixtureDir + "/table5/config.cfg");
    auto lex = lexicon::Lexicon::load(cfg.lexicon_path);
    auto rules = dsl::load_dsl_rules(cfg.rules_path);
    CHECK_THROWS_AS(pipeline::extract("Just prose, no tags.\n", lex, rules, cfg),
                    pipeline::PipelineError);
}

TEST_CASE("extract: two runs are byte-identical") {
    auto a = extract_table5();
    auto b = extract_table5();
    CHECK(fsm::model_to_json(a.model) == fsm::model_to_json(b.model));
    CHECK(pipeline::diagnostics_report(a.diagnostics) ==
          pipeline::diagnostics_report(b.diagnostics));
    REQUIRE(a.irs.size() == b.irs.size());
    for (std::size_t i = 0; i < a.irs.size(); ++i) {
        CHECK(a.irs[i].condition == b.irs[i].condition);
        CHECK(a.irs[i].actions == b.irs[i].actions);
    }
}

TEST_CASE("diagnostics_report: sorted and stable") {
    std::vector<pipeline::Diagnostic> ds = {
        {"skipped-span", 2, 0, "beta"},
        {"recovered-action", 1, 0, "alpha"},
        {"skipped-span", 2, 0, "alpha"},
    };
    auto rep = pipeline::diagnostics_report(ds);
    auto p1 = rep.find("recovered-action");
    auto p2 = rep.find("alpha", p1 + 1);
    auto p3 = rep.find("beta");
    CHECK(p1 != std::string::npos);
    CHECK(p2 != std::string::npos);
    CHECK(p3 != std::string::npos);
    CHECK(p1 < p2);
    CHECK(p2 < p3);
}
