#include "specfsm/annotation.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <sstream>

namespace specfsm::annotation {

std::string label_name(TagLabel l) {
    switch (l) {
        case TagLabel::Paragraph: return "paragraph";
        case TagLabel::Control: return "control";
        case TagLabel::Condition: return "condition";
        case TagLabel::Action: return "action";
        case TagLabel::StartState: return "start_state";
        case TagLabel::EndState: return "end_state";
        case TagLabel::Token: return "token";
    }
    return "?";
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&]() {
        if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
    };
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
        } else if (c == ',' || c == '.' || c == ';' || c == ':' || c == '(' || c == ')') {
            flush();
            tokens.push_back(std::string(1, c));
        } else {
            cur += c;
        }
    }
    flush();
    return tokens;
}

namespace {

const std::map<std::string, TagLabel> kTagNames = {
    {"control", TagLabel::Control},
    {"condition", TagLabel::Condition},
    {"action", TagLabel::Action},
    {"start_state", TagLabel::StartState},
    {"end_state", TagLabel::EndState},
};

struct ParagraphParser {
    const std::string& text;
    int paragraph;
    std::size_t pos = 0;

    AnnotationTree parse() {
        AnnotationTree root;
        root.label = TagLabel::Paragraph;
        root.paragraph = paragraph;
        root.begin = 0;
        root.end = text.size();
        parse_children(root, TagLabel::Paragraph, 0);
        if (pos != text.size())
            throw UnbalancedTag("unexpected closing tag", paragraph, pos);
        return root;
    }

    // Consumes content until a closing tag (left for the caller) or EOF.
    void parse_children(AnnotationTree& node, TagLabel open_label, std::size_t open_pos) {
        std::string run;
        std::size_t run_begin = pos;
        auto flush_run = [&]() {
            for (const auto& tok : tokenize(run)) {
                AnnotationTree leaf;
                leaf.label = TagLabel::Token;
                leaf.text = tok;
                leaf.paragraph = paragraph;
                leaf.begin = run_begin;
                leaf.end = pos;
                node.children.push_back(std::move(leaf));
            }
            run.clear();
        };
        while (pos < text.size()) {
            if (text[pos] != '<') {
                if (run.empty()) run_begin = pos;
                run += text[pos++];
                continue;
            }
            std::size_t close = text.find('>', pos);
            if (close == std::string::npos)
                throw UnbalancedTag("unterminated '<'", paragraph, pos);
            std::string body = text.substr(pos + 1, close - pos - 1);
            bool closing = !body.empty() && body[0] == '/';
            std::string name = closing ? body.substr(1) : body;
            if (name.find_first_of(" \t=\"") != std::string::npos)
                throw UnknownTag("tag attributes are not allowed: <" + body + ">", paragraph, pos);
            auto it = kTagNames.find(name);
            if (it == kTagNames.end())
                throw UnknownTag("unknown tag <" + body + ">", paragraph, pos);
            if (closing) {
                if (it->second != open_label)
                    throw UnbalancedTag("</" + name + "> closes <" + label_name(open_label) + ">",
                                        paragraph, pos);
                flush_run();
                return;  // caller consumes the tag
            }
            flush_run();
            std::size_t tag_pos = pos;
            pos = close + 1;
            AnnotationTree child;
            child.label = it->second;
            child.paragraph = paragraph;
            child.begin = tag_pos;
            parse_children(child, it->second, tag_pos);
            // expect matching close here
            if (pos >= text.size() || text[pos] != '<')
                throw UnbalancedTag("<" + name + "> never closed", paragraph, tag_pos);
            std::size_t cclose = text.find('>', pos);
            pos = cclose + 1;
            child.end = pos;
            if (child.children.empty())
                throw EmptySpan("<" + name + "> has no content", paragraph, tag_pos);
            node.children.push_back(std::move(child));
        }
        if (open_label != TagLabel::Paragraph)
            throw UnbalancedTag("<" + label_name(open_label) + "> never closed", paragraph, open_pos);
        flush_run();
    }
};

bool has_label(const AnnotationTree& t, TagLabel l) {
    for (const auto& c : t.children)
        if (c.label == l || has_label(c, l)) return true;
    return false;
}

void validate(const AnnotationTree& node, bool inside_state) {
    bool is_state = node.label == TagLabel::StartState || node.label == TagLabel::EndState;
    if (is_state && inside_state)
        throw UnbalancedTag("state tag nested inside state tag", node.paragraph, node.begin);
    if (node.label == TagLabel::Control &&
        !has_label(node, TagLabel::Condition) && !has_label(node, TagLabel::Action))
        throw EmptySpan("control block lacks condition/action content", node.paragraph, node.begin);
    for (const auto& c : node.children) validate(c, inside_state || is_state);
}

}  // namespace

std::vector<AnnotationTree> parse_annotated(const std::string& text) {
    // split on blank lines
    std::vector<std::string> paragraphs;
    std::string cur;
    std::istringstream in(text);
    std::string line;
    auto flush = [&]() {
        if (cur.find_first_not_of(" \t\r\n") != std::string::npos) paragraphs.push_back(cur);
        cur.clear();
    };
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            flush();
        } else {
            if (!cur.empty()) cur += "\n";
            cur += line;
        }
    }
    flush();

    std::vector<AnnotationTree> trees;
    for (std::size_t i = 0; i < paragraphs.size(); ++i) {
        ParagraphParser p{paragraphs[i], static_cast<int>(i)};
        AnnotationTree t = p.parse();
        validate(t, false);
        trees.push_back(std::move(t));
    }
    return trees;
}

namespace {

void render_node(const AnnotationTree& node, std::ostream& os, bool& need_space) {
    if (node.is_leaf()) {
        if (need_space) os << " ";
        os << node.text;
        need_space = true;
        return;
    }
    if (node.label != TagLabel::Paragraph) {
        if (need_space) os << " ";
        os << "<" << label_name(node.label) << ">";
        need_space = true;
    }
    for (const auto& c : node.children) render_node(c, os, need_space);
    if (node.label != TagLabel::Paragraph) {
        os << " </" << label_name(node.label) << ">";
        need_space = true;
    }
}

}  // namespace

std::string render_annotated(const std::vector<AnnotationTree>& trees) {
    std::ostringstream os;
    for (std::size_t i = 0; i < trees.size(); ++i) {
        if (i) os << "\n\n";
        bool need_space = false;
        render_node(trees[i], os, need_space);
    }
    return os.str();
}

bool tree_equal(const AnnotationTree& a, const AnnotationTree& b) {
    if (a.label != b.label) return false;
    if (a.is_leaf()) return a.text == b.text;
    if (a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!tree_equal(a.children[i], b.children[i])) return false;
    return true;
}

std::string plain_text(const AnnotationTree& tree) {
    std::string out;
    for (const auto& tok : leaf_tokens(tree)) {
        if (!out.empty()) out += " ";
        out += tok;
    }
    return out;
}

std::vector<std::string> leaf_tokens(const AnnotationTree& tree) {
    std::vector<std::string> tokens;
    std::function<void(const AnnotationTree&)> walk = [&](const AnnotationTree& n) {
        if (n.is_leaf()) {
            tokens.push_back(n.text);
            return;
        }
        for (const auto& c : n.children) walk(c);
    };
    walk(tree);
    return tokens;
}

namespace {

void collect_blocks(const AnnotationTree& node, int parent, std::vector<CtlBlock>& out) {
    int self = parent;
    if (node.label == TagLabel::Control) {
        CtlBlock block;
        block.tree = &node;
        block.parent = parent;
        block.connective_tokens.emplace_back();
        for (const auto& c : node.children) {
            if (c.is_leaf()) {
                block.connective_tokens.back().push_back(c.text);
            } else {
                block.components.push_back(&c);
                block.connective_tokens.emplace_back();
            }
        }
        self = static_cast<int>(out.size());
        out.push_back(std::move(block));
    }
    for (const auto& c : node.children) collect_blocks(c, self, out);
}

}  // namespace

std::vector<CtlBlock> extract_ctl_blocks(const AnnotationTree& paragraph) {
    std::vector<CtlBlock> blocks;
    collect_blocks(paragraph, -1, blocks);
    return blocks;
}

nlohmann::json tree_to_json(const AnnotationTree& tree) {
    nlohmann::json j;
    j["label"] = label_name(tree.label);
    j["span"] = {tree.paragraph, tree.begin, tree.end};
    if (tree.is_leaf()) {
        j["text"] = tree.text;
    } else {
        nlohmann::json kids = nlohmann::json::array();
        for (const auto& c : tree.children) kids.push_back(tree_to_json(c));
        j["children"] = std::move(kids);
    }
    return j;
}

}  // namespace specfsm::annotation
