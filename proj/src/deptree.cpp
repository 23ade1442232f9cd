#include "specfsm/deptree.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace specfsm::deptree {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

const std::set<std::string> kAuxiliaries = {
    "is", "are", "was", "were", "be", "been", "being",
    "has", "have", "had", "does", "do", "did",
};

const std::set<std::string> kPrepositions = {
    "of", "to", "from", "by", "in", "on", "upon", "after", "when",
    "while", "if", "with", "into", "for", "at", "during", "before",
};

const std::set<std::string> kDeterminers = {"a", "an", "the", "this", "that", "its", "any", "all"};

int ordinal_value(const std::string& tok) {
    static const std::map<std::string, int> words = {
        {"first", 1}, {"second", 2}, {"third", 3},  {"fourth", 4}, {"fifth", 5},
        {"sixth", 6}, {"seventh", 7}, {"eighth", 8}, {"ninth", 9},  {"tenth", 10},
    };
    auto it = words.find(tok);
    if (it != words.end()) return it->second;
    if (!tok.empty() && std::all_of(tok.begin(), tok.end(),
                                    [](unsigned char c) { return std::isdigit(c); }))
        return std::stoi(tok);
    return -1;
}

bool is_connective(const std::string& tok) { return tok == "and" || tok == "or"; }
bool is_negation(const std::string& tok) {
    return tok == "not" || tok == "never" || tok == "cannot";
}

}  // namespace

std::string pos_name(Pos p) {
    switch (p) {
        case Pos::Verb: return "verb";
        case Pos::Noun: return "noun";
        case Pos::AgentNoun: return "agent-noun";
        case Pos::Modal: return "modal";
        case Pos::Negation: return "negation";
        case Pos::Connective: return "connective";
        case Pos::Preposition: return "preposition";
        case Pos::Other: return "other";
    }
    return "?";
}

std::string rel_name(Rel r) {
    switch (r) {
        case Rel::Root: return "root";
        case Rel::Subject: return "subject";
        case Rel::Object: return "object";
        case Rel::Modifier: return "modifier";
        case Rel::Conjunct: return "conjunct";
        case Rel::Operand: return "operand";
        case Rel::Prep: return "prep";
    }
    return "?";
}

DepNode parse_dependencies(const lexicon::LinkedText& text, const VerbLexicon& verbs) {
    using lexicon::KeywordType;
    const auto& toks = text.tokens;
    if (toks.empty()) throw NoVerbFound("<empty>");

    // locate the main verb: first recognizable verb form outside modals/aux
    int verb_idx = -1;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i].keyword) continue;
        std::string t = lower(toks[i].text);
        if (verbs.weak_modals.count(t) || verbs.strong_modals.count(t)) continue;
        if (kAuxiliaries.count(t)) continue;
        if (verbs.is_verb_form(t)) {
            verb_idx = static_cast<int>(i);
            break;
        }
    }

    if (verb_idx < 0) {
        // a bare keyword span is its own root
        const lexicon::LinkedToken* only = nullptr;
        for (const auto& t : toks) {
            if (t.keyword) {
                if (only) throw NoVerbFound(text.to_string());
                only = &t;
            } else if (!kDeterminers.count(lower(t.text)) && t.text != "," && t.text != ".") {
                throw NoVerbFound(text.to_string());
            }
        }
        if (!only) throw NoVerbFound(text.to_string());
        DepNode root;
        root.token = only->keyword->id;
        root.keyword = only->keyword;
        root.pos = only->keyword->type == KeywordType::Agent ? Pos::AgentNoun : Pos::Noun;
        root.rel = Rel::Root;
        return root;
    }

    DepNode root;
    root.token = verbs.lemma(lower(toks[verb_idx].text));
    root.pos = Pos::Verb;
    root.rel = Rel::Root;

    // passive: auxiliary within the three tokens before the verb
    bool passive = false;
    for (int i = std::max(0, verb_idx - 3); i < verb_idx; ++i)
        if (!toks[i].keyword && kAuxiliaries.count(lower(toks[i].text))) passive = true;

    root.children.reserve(toks.size() + 1);  // keeps current_verb_args stable
    bool have_subject = false;
    DepNode* current_verb_args = &root;      // secondary verbs govern their own arguments
    std::string pending_prep;

    auto add_keyword = [&](const lexicon::LinkedToken& t, bool before_verb) {
        DepNode n;
        n.token = t.keyword->id;
        n.keyword = t.keyword;
        n.pos = t.keyword->type == KeywordType::Agent ? Pos::AgentNoun : Pos::Noun;
        if (t.keyword->type == KeywordType::Agent) {
            if (!have_subject && (pending_prep == "by" || (!passive && before_verb))) {
                n.rel = Rel::Subject;
                have_subject = true;
                root.children.push_back(std::move(n));
                pending_prep.clear();
                return;
            }
            if (!pending_prep.empty() && pending_prep != "by") {
                DepNode prep;
                prep.token = pending_prep;
                prep.pos = Pos::Preposition;
                prep.rel = Rel::Prep;
                n.rel = Rel::Object;
                prep.children.push_back(std::move(n));
                current_verb_args->children.push_back(std::move(prep));
                pending_prep.clear();
                return;
            }
        }
        n.rel = Rel::Object;
        current_verb_args->children.push_back(std::move(n));
        pending_prep.clear();
    };

    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (static_cast<int>(i) == verb_idx) {
            current_verb_args = &root;
            pending_prep.clear();
            continue;
        }
        const auto& t = toks[i];
        bool before = static_cast<int>(i) < verb_idx;
        if (t.keyword) {
            add_keyword(t, before);
            continue;
        }
        std::string w = lower(t.text);
        if (is_connective(w)) {
            DepNode c;
            c.token = w;
            c.pos = Pos::Connective;
            c.rel = Rel::Conjunct;
            current_verb_args->children.push_back(std::move(c));
            continue;
        }
        if (is_negation(w)) {
            DepNode c;
            c.token = "not";
            c.pos = Pos::Negation;
            c.rel = Rel::Conjunct;
            current_verb_args->children.push_back(std::move(c));
            continue;
        }
        int ord = ordinal_value(w);
        if (ord >= 0) {
            DepNode m;
            m.token = w;
            m.pos = Pos::Other;
            m.rel = Rel::Modifier;
            m.number = ord;
            root.children.push_back(std::move(m));
            continue;
        }
        if (!before && verbs.is_verb_form(w) && !kAuxiliaries.count(w) &&
            !verbs.weak_modals.count(w) && !verbs.strong_modals.count(w)) {
            DepNode v;
            v.token = verbs.lemma(w);
            v.pos = Pos::Verb;
            v.rel = Rel::Operand;
            root.children.push_back(std::move(v));
            current_verb_args = &root.children.back();
            pending_prep.clear();
            continue;
        }
        if (kPrepositions.count(w)) {
            pending_prep = w;
            continue;
        }
        if (w == ",") pending_prep.clear();
        // determiners, modals, auxiliaries and filler words fold away
    }
    return root;
}

// ---------------------------------------------------------------------------
// Logical restructuring

namespace {

bool is_connective_leaf(const DepNode& n) {
    return n.pos == Pos::Connective && n.children.empty();
}
bool is_negation_leaf(const DepNode& n) {
    return n.pos == Pos::Negation && n.children.empty();
}
bool is_operand_node(const DepNode& n) {
    return n.pos == Pos::Noun || n.pos == Pos::AgentNoun ||
           (n.pos == Pos::Connective && !n.children.empty()) ||
           (n.pos == Pos::Negation && !n.children.empty());
}

DepNode fold(const DepNode& node) {
    DepNode n = node;
    std::vector<DepNode> kids;
    kids.reserve(n.children.size());
    for (const auto& c : n.children) kids.push_back(fold(c));

    // negation first: !X binds tighter than and/or
    for (std::size_t i = 0; i < kids.size(); ++i) {
        if (!is_negation_leaf(kids[i])) continue;
        if (i + 1 >= kids.size() || !is_operand_node(kids[i + 1]))
            throw DanglingConnective("'not' without an operand");
        DepNode neg = kids[i];
        DepNode operand = kids[i + 1];
        operand.rel = Rel::Operand;
        neg.children.push_back(std::move(operand));
        kids.erase(kids.begin() + i, kids.begin() + i + 2);
        kids.insert(kids.begin() + i, std::move(neg));
    }

    // binary connectives, left-associative over adjacent operands
    for (std::size_t i = 0; i < kids.size();) {
        if (!is_connective_leaf(kids[i])) {
            ++i;
            continue;
        }
        bool has_left = i > 0 && is_operand_node(kids[i - 1]);
        bool has_right = i + 1 < kids.size() && is_operand_node(kids[i + 1]);
        if (has_left && has_right) {
            DepNode conn = kids[i];
            conn.rel = kids[i - 1].rel == Rel::Subject ? Rel::Object : kids[i - 1].rel;
            DepNode l = kids[i - 1], r = kids[i + 1];
            l.rel = Rel::Operand;
            r.rel = Rel::Operand;
            conn.children.push_back(std::move(l));
            conn.children.push_back(std::move(r));
            kids.erase(kids.begin() + i - 1, kids.begin() + i + 2);
            kids.insert(kids.begin() + i - 1, std::move(conn));
            i = i - 1 + 1;
        } else if (has_right && i == 0 &&
                   (node.pos == Pos::Noun || node.pos == Pos::AgentNoun)) {
            // the connective hangs under its left operand (the parent itself):
            // promote so parent and the right sibling become operands
            DepNode conn = kids[i];
            conn.rel = n.rel;
            DepNode left = n;
            left.children.clear();
            left.rel = Rel::Operand;
            DepNode right = kids[i + 1];
            right.rel = Rel::Operand;
            conn.children.push_back(std::move(left));
            conn.children.push_back(std::move(right));
            for (std::size_t j = i + 2; j < kids.size(); ++j)
                conn.children.push_back(kids[j]);
            return conn;
        } else {
            throw DanglingConnective("'" + kids[i].token + "' lacks two operands");
        }
    }
    n.children = std::move(kids);
    return n;
}

}  // namespace

DepNode restructure_logical(const DepNode& tree) { return fold(tree); }

std::vector<std::string> keyword_leaves(const DepNode& tree) {
    std::vector<std::string> out;
    std::function<void(const DepNode&)> walk = [&](const DepNode& n) {
        if (n.keyword) out.push_back(n.keyword->id);
        for (const auto& c : n.children) walk(c);
    };
    walk(tree);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

void print_node(const DepNode& n, std::ostream& os, int depth) {
    for (int i = 0; i < depth; ++i) os << "  ";
    os << n.token << " [" << pos_name(n.pos) << "/" << rel_name(n.rel) << "]";
    if (n.number >= 0) os << " #" << n.number;
    os << "\n";
    for (const auto& c : n.children) print_node(c, os, depth + 1);
}

void dot_node(const DepNode& n, std::ostream& os, int& counter, int parent) {
    int id = counter++;
    os << "  n" << id << " [label=\"" << n.token << "\\n" << rel_name(n.rel) << "\"];\n";
    if (parent >= 0) os << "  n" << parent << " -> n" << id << ";\n";
    for (const auto& c : n.children) dot_node(c, os, counter, id);
}

}  // namespace

std::string to_text(const DepNode& tree) {
    std::ostringstream os;
    print_node(tree, os, 0);
    return os.str();
}

std::string to_dot(const DepNode& tree) {
    std::ostringstream os;
    os << "digraph deptree {\n";
    int counter = 0;
    dot_node(tree, os, counter, -1);
    os << "}\n";
    return os.str();
}

}  // namespace specfsm::deptree
