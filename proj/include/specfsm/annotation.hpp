#ifndef SPECFSM_ANNOTATION_HPP
#define SPECFSM_ANNOTATION_HPP

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

// Parser for specification text annotated with the transition tag grammar:
// <control>, <condition>, <action>, <start_state>, <end_state> with
// arbitrary nesting; everything untagged becomes token leaves.

namespace specfsm::annotation {

class AnnotationError : public std::runtime_error {
public:
    AnnotationError(const std::string& what, int paragraph, std::size_t offset)
        : std::runtime_error(what + " (paragraph " + std::to_string(paragraph) +
                             ", offset " + std::to_string(offset) + ")"),
          paragraph(paragraph),
          offset(offset) {}
    int paragraph;
    std::size_t offset;
};

class UnbalancedTag : public AnnotationError {
    using AnnotationError::AnnotationError;
};
class UnknownTag : public AnnotationError {
    using AnnotationError::AnnotationError;
};
class EmptySpan : public AnnotationError {
    using AnnotationError::AnnotationError;
};

enum class TagLabel { Paragraph, Control, Condition, Action, StartState, EndState, Token };

std::string label_name(TagLabel l);

struct AnnotationTree {
    TagLabel label = TagLabel::Token;
    std::vector<AnnotationTree> children;
    std::string text;  // token leaves only
    int paragraph = 0;
    std::size_t begin = 0, end = 0;  // character offsets within the paragraph

    bool is_leaf() const { return label == TagLabel::Token; }
};

// Whitespace split with `, . ; : ( )` detached as separate tokens.
// Hyphenated terms stay whole.
std::vector<std::string> tokenize(const std::string& text);

// One Paragraph-rooted tree per blank-line-separated paragraph.
std::vector<AnnotationTree> parse_annotated(const std::string& text);
std::string render_annotated(const std::vector<AnnotationTree>& trees);

bool tree_equal(const AnnotationTree& a, const AnnotationTree& b);  // labels + leaf texts

// Concatenated leaf texts, in order.
std::string plain_text(const AnnotationTree& tree);
std::vector<std::string> leaf_tokens(const AnnotationTree& tree);

struct CtlBlock {
    const AnnotationTree* tree = nullptr;  // control node
    int parent = -1;                       // index of enclosing block, -1 if top level
    // direct children, in document order: tagged spans and nested controls
    std::vector<const AnnotationTree*> components;
    // token leaves sitting directly inside the control node, between components
    std::vector<std::vector<std::string>> connective_tokens;  // size components()+1
};

std::vector<CtlBlock> extract_ctl_blocks(const AnnotationTree& paragraph);

nlohmann::json tree_to_json(const AnnotationTree& tree);

}  // namespace specfsm::annotation

#endif
