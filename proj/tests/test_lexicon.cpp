#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "specfsm/lexicon.hpp"

using namespace specfsm::lexicon;

namespace {

// Independent reference: full-matrix edit distance.
std::size_t lev_reference(const std::string& a, const std::string& b) {
    std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                            std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                                d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u)});
    return d[a.size()][b.size()];
}

Lexicon sample_lexicon() {
    return Lexicon::parse(
        "ue\tagent\tUE|the UE\n"
        "amf\tagent\tAMF\n"
        "auth_reject\tmessage\tAUTHENTICATION REJECT|AUTHENTICATION REJECT message\n"
        "auth_request\tmessage\tAUTHENTICATION REQUEST\n"
        "tau_reject\tmessage\tTRACKING AREA UPDATE REJECT|TAU REJECT\n"
        "timer_t3460\ttimer\ttimer T3460|T3460\n"
        "emm_deregistered\tstate\tEMM-DEREGISTERED\n");
}

}  // namespace

TEST_CASE("levenshtein matches a full-matrix reference on random strings") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> len(0, 12);
    std::uniform_int_distribution<int> ch(0, 3);
    for (int i = 0; i < 300; ++i) {
        std::string a, b;
        for (int k = len(rng); k > 0; --k) a += char('a' + ch(rng));
        for (int k = len(rng); k > 0; --k) b += char('a' + ch(rng));
        CAPTURE(a);
        CAPTURE(b);
        CHECK(levenshtein(a, b) == lev_reference(a, b));
    }
}

TEST_CASE("normalized distance is case insensitive and scaled") {
    CHECK(normalized_distance("REJECT", "reject") == doctest::Approx(0.0));
    CHECK(normalized_distance("rejct", "reject") == doctest::Approx(1.0 / 6.0));
    CHECK(normalized_distance("", "") == doctest::Approx(0.0));
}

TEST_CASE("canonical ids are snake case with abbreviations applied") {
    CHECK(canonical_id({"AUTHENTICATION", "REQUEST"}) == "auth_req");
    CHECK(canonical_id({"Tracking", "Area", "Update"}) == "tracking_area_update");
    CHECK(canonical_id({"timer", "T3460"}) == "timer_t3460");
    CHECK(canonical_id({"service", "request", ",", "attempt"}) == "service_req_attempt");
}

TEST_CASE("lexicon file round trip and duplicate rejection") {
    Lexicon lex = sample_lexicon();
    CHECK(lex.entries().size() == 7);
    CHECK(lex.find("auth_reject") != nullptr);
    CHECK(lex.find("auth_reject")->type == KeywordType::Message);
    CHECK(lex.of_type(KeywordType::Agent).size() == 2);

    Lexicon again = Lexicon::parse(lex.serialize());
    CHECK(again.serialize() == lex.serialize());

    Keyword dup;
    dup.id = "ue";
    CHECK_THROWS_AS(Lexicon(lex).add(dup), DuplicateId);
    CHECK_THROWS_AS(Lexicon::parse("x\tnosuchtype\tX\n"), TypelessSeedEntry);
}

TEST_CASE("linking prefers the longest window") {
    Lexicon lex = sample_lexicon();
    auto toks = std::vector<std::string>{"the",  "AUTHENTICATION", "REJECT",
                                         "message", "was", "sent"};
    auto linked = link_keywords(toks, lex);
    REQUIRE(linked.tokens.size() == 4);
    CHECK(linked.tokens[0].text == "the");
    CHECK(linked.tokens[1].text == "auth_reject");
    CHECK(linked.tokens[1].matched.size() == 3);  // three-token surface beats two
    CHECK(linked.tokens[2].text == "was");
}

TEST_CASE("linking tolerates small typos under the threshold") {
    Lexicon lex = sample_lexicon();
    auto linked = link_keywords({"AUTHENTCATION", "REJECT"}, lex);  // one deletion
    REQUIRE(linked.tokens.size() == 1);
    CHECK(linked.tokens[0].text == "auth_reject");

    // far beyond 20%: stays unlinked
    auto unlinked = link_keywords({"AXXXXNTICATION", "RXJXCT"}, lex);
    CHECK(unlinked.tokens.size() == 2);
    CHECK(unlinked.tokens[0].keyword == nullptr);
}

TEST_CASE("linking distinguishes close message names") {
    Lexicon lex = sample_lexicon();
    auto linked = link_keywords({"AUTHENTICATION", "REQUEST"}, lex);
    REQUIRE(linked.tokens.size() == 1);
    CHECK(linked.tokens[0].text == "auth_request");
}

TEST_CASE("links never span punctuation boundaries at the edges") {
    Lexicon lex = sample_lexicon();
    auto linked = link_keywords({",", "AMF", ","}, lex);
    REQUIRE(linked.tokens.size() == 3);
    CHECK(linked.tokens[0].keyword == nullptr);
    CHECK(linked.tokens[1].text == "amf");
    CHECK(linked.tokens[2].keyword == nullptr);
}

TEST_CASE("candidate mining finds caps runs, timers, and counters") {
    Lexicon seed = sample_lexicon();
    auto cands = mine_candidates({"the", "SERVICE", "REJECT", "message", "starts", "timer",
                                  "T3417", "and", "the", "service", "request", "attempt",
                                  "counter", "."},
                                 seed);
    REQUIRE(cands.size() == 3);
    CHECK(cands[0].id == "service_reject");
    CHECK(cands[0].type == KeywordType::Message);
    CHECK(cands[1].id == "timer_t3417");
    CHECK(cands[1].type == KeywordType::Timer);
    CHECK(cands[2].id == "service_req_attempt_counter");
    CHECK(cands[2].type == KeywordType::Misc);

    // ids already in the seed never come back
    auto none = mine_candidates({"AUTHENTICATION", "REQUEST"}, seed);
    for (const auto& kw : none) CHECK(kw.id != "auth_request");
}
