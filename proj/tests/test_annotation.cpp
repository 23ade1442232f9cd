#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "specfsm/annotation.hpp"

using namespace specfsm::annotation;

namespace {

const char* kSample =
    "<control>Upon receipt of the <condition>AUTHENTICATION REJECT message</condition> , "
    "the UE shall <action>abort the procedure</action> and move to state "
    "<end_state>EMM-DEREGISTERED</end_state> .</control>\n"
    "\n"
    "Loose commentary outside any control block.\n";

}  // namespace

TEST_CASE("tokenize detaches punctuation and keeps hyphenated terms whole") {
    auto toks = tokenize("state EMM-DEREGISTERED, then (stop T3460).");
    std::vector<std::string> expected = {"state", "EMM-DEREGISTERED", ",", "then",
                                         "(",     "stop",            "T3460", ")", "."};
    CHECK(toks == expected);
}

TEST_CASE("parse produces one paragraph tree per blank-line block") {
    auto trees = parse_annotated(kSample);
    REQUIRE(trees.size() == 2);
    CHECK(trees[0].label == TagLabel::Paragraph);
    CHECK(trees[0].paragraph == 0);
    CHECK(trees[1].paragraph == 1);
    // paragraph 2 has no tags: all children are leaves
    for (const auto& c : trees[1].children) CHECK(c.is_leaf());
}

TEST_CASE("render then reparse is identity on labels and leaves") {
    auto trees = parse_annotated(kSample);
    std::string rendered = render_annotated(trees);
    auto again = parse_annotated(rendered);
    REQUIRE(again.size() == trees.size());
    for (std::size_t i = 0; i < trees.size(); ++i) CHECK(tree_equal(trees[i], again[i]));
}

TEST_CASE("plain text strips every tag") {
    auto trees = parse_annotated("<control>if <condition>a</condition> then <action>b</action></control>");
    CHECK(plain_text(trees[0]) == "if a then b");
    auto toks = leaf_tokens(trees[0]);
    CHECK(toks == std::vector<std::string>{"if", "a", "then", "b"});
}

TEST_CASE("nested controls and block extraction with parent links") {
    const char* nested =
        "<control>if <condition>x</condition> then <action>y</action> and "
        "<control>if <condition>p</condition> <action>q</action></control></control>";
    auto trees = parse_annotated(nested);
    auto blocks = extract_ctl_blocks(trees[0]);
    REQUIRE(blocks.size() == 2);
    CHECK(blocks[0].parent == -1);
    CHECK(blocks[1].parent == 0);
    // outer block sees three components: condition, action, nested control
    REQUIRE(blocks[0].components.size() == 3);
    CHECK(blocks[0].components[0]->label == TagLabel::Condition);
    CHECK(blocks[0].components[1]->label == TagLabel::Action);
    CHECK(blocks[0].components[2]->label == TagLabel::Control);
    REQUIRE(blocks[0].connective_tokens.size() == 4);
    CHECK(blocks[0].connective_tokens[0] == std::vector<std::string>{"if"});
    CHECK(blocks[0].connective_tokens[1] == std::vector<std::string>{"then"});
    CHECK(blocks[0].connective_tokens[2] == std::vector<std::string>{"and"});
}

TEST_CASE("structural errors are rejected with positions") {
    CHECK_THROWS_AS(parse_annotated("<control><condition>a</condition>"), UnbalancedTag);
    CHECK_THROWS_AS(parse_annotated("<control>a</badTag></control>"), UnknownTag);
    CHECK_THROWS_AS(parse_annotated("<mystery>a</mystery>"), UnknownTag);
    CHECK_THROWS_AS(parse_annotated("<control><condition></condition> <action>a</action></control>"),
                    EmptySpan);
    // control with neither a condition nor an action descendant
    CHECK_THROWS_AS(parse_annotated("<control>to state <end_state>EMM-NULL</end_state></control>"),
                    AnnotationError);
    // condition-only controls are legal (the action may be recovered later)
    CHECK_NOTHROW(parse_annotated("<control>only <condition>c</condition> here</control>"));
    try {
        parse_annotated("first ok\n\n<control><condition>a</condition>");
    } catch (const UnbalancedTag& e) {
        CHECK(e.paragraph == 1);
    }
}

TEST_CASE("json export carries labels and nesting") {
    auto trees = parse_annotated("<control><condition>a</condition> <action>b</action></control>");
    auto j = tree_to_json(trees[0]);
    CHECK(j["label"] == "paragraph");
    CHECK(j["children"][0]["label"] == "control");
    CHECK(j["children"][0]["children"][0]["label"] == "condition");
    CHECK(j["children"][0]["children"][0]["children"][0]["text"] == "a");
}
