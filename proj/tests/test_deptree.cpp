#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "specfsm/annotation.hpp"
#include "specfsm/deptree.hpp"

using namespace specfsm::deptree;
using specfsm::lexicon::KeywordType;
using specfsm::lexicon::Lexicon;
using specfsm::lexicon::link_keywords;

namespace {

Lexicon sample_lexicon() {
    return Lexicon::parse(
        "ue\tagent\tUE|the UE\n"
        "mme\tagent\tMME\n"
        "auth_reject\tmessage\tAUTHENTICATION REJECT|AUTHENTICATION REJECT message\n"
        "tau_reject\tmessage\tTRACKING AREA UPDATE REJECT|TAU REJECT\n"
        "timer_t3460\ttimer\ttimer T3460|T3460\n"
        "emm_deregistered\tstate\tEMM-DEREGISTERED\n");
}

VerbLexicon sample_verbs() {
    VerbLexicon vl;
    for (const char* f : {"receive", "receives", "received", "receipt", "receiving"})
        vl.form_to_lemma[f] = "receive";
    for (const char* f : {"send", "sends", "sent", "sending"}) vl.form_to_lemma[f] = "send";
    for (const char* f : {"stop", "stops", "stopped"}) vl.form_to_lemma[f] = "stop";
    for (const char* f : {"start", "starts", "started"}) vl.form_to_lemma[f] = "start";
    for (const char* f : {"expire", "expires", "expired", "expiry"}) vl.form_to_lemma[f] = "expire";
    return vl;
}

DepNode parse(const std::string& text) {
    // keyword pointers in the tree alias the lexicon, so it must outlive them
    static Lexicon lex = sample_lexicon();
    auto linked = link_keywords(specfsm::annotation::tokenize(text), lex);
    return parse_dependencies(linked, sample_verbs());
}

const DepNode* child_with(const DepNode& n, const std::string& token) {
    for (const auto& c : n.children)
        if (c.token == token) return &c;
    return nullptr;
}

}  // namespace

TEST_CASE("active voice: subject before the verb") {
    DepNode t = parse("the UE receives the AUTHENTICATION REJECT message");
    CHECK(t.token == "receive");
    CHECK(t.pos == Pos::Verb);
    const DepNode* subj = child_with(t, "ue");
    REQUIRE(subj != nullptr);
    CHECK(subj->rel == Rel::Subject);
    const DepNode* obj = child_with(t, "auth_reject");
    REQUIRE(obj != nullptr);
    CHECK(obj->rel == Rel::Object);
}

TEST_CASE("passive voice: by-agent is the subject") {
    DepNode t = parse("the AUTHENTICATION REJECT message is received by the UE");
    CHECK(t.token == "receive");
    const DepNode* subj = child_with(t, "ue");
    REQUIRE(subj != nullptr);
    CHECK(subj->rel == Rel::Subject);
    const DepNode* obj = child_with(t, "auth_reject");
    REQUIRE(obj != nullptr);
    CHECK(obj->rel == Rel::Object);
}

TEST_CASE("nominalization heads the tree: upon receipt of X") {
    DepNode t = parse("upon receipt of the AUTHENTICATION REJECT message");
    CHECK(t.token == "receive");
    CHECK(child_with(t, "auth_reject") != nullptr);
}

TEST_CASE("prepositional agent argument: send X to MME") {
    DepNode t = parse("send the TAU REJECT to the MME");
    CHECK(t.token == "send");
    const DepNode* prep = child_with(t, "to");
    REQUIRE(prep != nullptr);
    CHECK(prep->pos == Pos::Preposition);
    REQUIRE(prep->children.size() == 1);
    CHECK(prep->children[0].token == "mme");
}

TEST_CASE("ordinals become numbered modifiers") {
    DepNode t = parse("timer T3460 expires for the first time");
    CHECK(t.token == "expire");
    bool found = false;
    for (const auto& c : t.children)
        if (c.number == 1) found = true;
    CHECK(found);
}

TEST_CASE("bare keyword spans root at the keyword") {
    DepNode t = parse("the EMM-DEREGISTERED");
    CHECK(t.token == "emm_deregistered");
    CHECK(t.pos == Pos::Noun);
    CHECK_THROWS_AS(parse("some words without any verb"), NoVerbFound);
}

TEST_CASE("restructuring folds or over two objects") {
    DepNode t = restructure_logical(
        parse("the UE receives the AUTHENTICATION REJECT or TAU REJECT message"));
    const DepNode* conn = child_with(t, "or");
    REQUIRE(conn != nullptr);
    CHECK(conn->pos == Pos::Connective);
    REQUIRE(conn->children.size() == 2);
    CHECK(conn->children[0].token == "auth_reject");
    CHECK(conn->children[1].token == "tau_reject");
    CHECK(conn->children[0].rel == Rel::Operand);
}

TEST_CASE("restructuring handles negation before a noun") {
    DepNode t = restructure_logical(parse("the UE has not received the TAU REJECT"));
    const DepNode* neg = child_with(t, "not");
    REQUIRE(neg != nullptr);
    CHECK(neg->pos == Pos::Negation);
    REQUIRE(neg->children.size() == 1);
    CHECK(neg->children[0].token == "tau_reject");
}

TEST_CASE("dangling connectives are rejected") {
    CHECK_THROWS_AS(restructure_logical(parse("the UE receives the AUTHENTICATION REJECT or")),
                    DanglingConnective);
}

TEST_CASE("keyword leaves are preserved by restructuring") {
    DepNode before = parse("the UE receives the AUTHENTICATION REJECT or TAU REJECT message");
    DepNode after = restructure_logical(before);
    CHECK(keyword_leaves(before) == keyword_leaves(after));
}

TEST_CASE("debug renderings are total") {
    DepNode t = parse("the UE receives the AUTHENTICATION REJECT message");
    CHECK(to_text(t).find("receive") != std::string::npos);
    CHECK(to_dot(t).rfind("digraph", 0) == 0);
}
