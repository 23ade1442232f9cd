#include "specfsm/lexicon.hpp"

#include "specfsm/annotation.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace specfsm::lexicon {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool is_punct_token(const std::string& t) {
    return t.size() == 1 && std::string(",.;:()").find(t[0]) != std::string::npos;
}

bool is_determiner(const std::string& t) {
    static const char* kDets[] = {"a", "an", "the", "this", "that", "its"};
    std::string l = t;
    std::transform(l.begin(), l.end(), l.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    for (const char* d : kDets)
        if (l == d) return true;
    return false;
}

const std::vector<std::pair<std::string, std::string>> kAbbreviations = {
    {"request", "req"},
    {"authentication", "auth"},
    {"registration", "reg"},
    {"deregistration", "dereg"},
    {"identification", "ident"},
    {"configuration", "config"},
    {"information", "info"},
    {"security", "sec"},
};

}  // namespace

std::string type_name(KeywordType t) {
    switch (t) {
        case KeywordType::Agent: return "agent";
        case KeywordType::Message: return "message";
        case KeywordType::State: return "state";
        case KeywordType::Timer: return "timer";
        case KeywordType::Counter: return "counter";
        case KeywordType::Variable: return "variable";
        case KeywordType::Procedure: return "procedure";
        case KeywordType::Mode: return "mode";
        case KeywordType::Service: return "service";
        case KeywordType::Cause: return "cause";
        case KeywordType::Misc: return "misc";
    }
    return "?";
}

std::optional<KeywordType> type_from_name(const std::string& name) {
    static const std::map<std::string, KeywordType> table = {
        {"agent", KeywordType::Agent},       {"message", KeywordType::Message},
        {"state", KeywordType::State},       {"timer", KeywordType::Timer},
        {"counter", KeywordType::Counter},   {"variable", KeywordType::Variable},
        {"procedure", KeywordType::Procedure}, {"mode", KeywordType::Mode},
        {"service", KeywordType::Service},   {"cause", KeywordType::Cause},
        {"misc", KeywordType::Misc},
    };
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
            std::size_t next = std::min({row[j] + 1, row[j - 1] + 1, diag + cost});
            diag = row[j];
            row[j] = next;
        }
    }
    return row[b.size()];
}

double normalized_distance(const std::string& a, const std::string& b) {
    std::string la = lower(a), lb = lower(b);
    std::size_t m = std::max(la.size(), lb.size());
    if (m == 0) return 0.0;
    return static_cast<double>(levenshtein(la, lb)) / static_cast<double>(m);
}

std::string canonical_id(const std::vector<std::string>& tokens) {
    std::string id;
    for (const auto& tok : tokens) {
        if (is_punct_token(tok)) continue;
        std::string part = lower(tok);
        for (const auto& [full, abbr] : kAbbreviations)
            if (part == full) part = abbr;
        if (!id.empty()) id += "_";
        id += part;
    }
    return id;
}

const Keyword& Lexicon::add(Keyword kw) {
    if (by_id_.count(kw.id)) throw DuplicateId("duplicate keyword id: " + kw.id);
    if (kw.surface_forms.empty()) kw.surface_forms.push_back({kw.id});
    for (const auto& sf : kw.surface_forms)
        max_surface_len_ = std::max(max_surface_len_, sf.size());
    by_id_[kw.id] = entries_.size();
    entries_.push_back(std::move(kw));
    return entries_.back();
}

const Keyword* Lexicon::find(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &entries_[it->second];
}

std::vector<const Keyword*> Lexicon::of_type(KeywordType t) const {
    std::vector<const Keyword*> out;
    for (const auto& kw : entries_)
        if (kw.type == t) out.push_back(&kw);
    return out;
}

Lexicon Lexicon::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LexiconError("cannot open lexicon file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

Lexicon Lexicon::parse(const std::string& text, const std::string& origin) {
    Lexicon lex;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t"));
        if (trimmed.empty() || trimmed[0] == '#') continue;
        std::size_t t1 = line.find('\t');
        std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos)
            throw LexiconError(origin + ":" + std::to_string(lineno) + ": expected id<TAB>type<TAB>surfaces");
        Keyword kw;
        kw.id = line.substr(0, t1);
        std::string tname = line.substr(t1 + 1, t2 - t1 - 1);
        auto type = type_from_name(tname);
        if (!type)
            throw TypelessSeedEntry(origin + ":" + std::to_string(lineno) + ": unknown type '" + tname + "'");
        kw.type = *type;
        std::string surfaces = line.substr(t2 + 1);
        std::istringstream sin(surfaces);
        std::string form;
        while (std::getline(sin, form, '|')) {
            auto toks = annotation::tokenize(form);
            if (!toks.empty()) kw.surface_forms.push_back(std::move(toks));
        }
        lex.add(std::move(kw));
    }
    return lex;
}

std::string Lexicon::serialize() const {
    std::ostringstream os;
    for (const auto& kw : entries_) {
        os << kw.id << "\t" << type_name(kw.type) << "\t";
        for (std::size_t i = 0; i < kw.surface_forms.size(); ++i) {
            if (i) os << "|";
            for (std::size_t j = 0; j < kw.surface_forms[i].size(); ++j) {
                if (j) os << " ";
                os << kw.surface_forms[i][j];
            }
        }
        os << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Candidate mining

namespace {

bool all_caps(const std::string& t) {
    bool letter = false;
    for (char c : t) {
        if (std::islower(static_cast<unsigned char>(c))) return false;
        if (std::isupper(static_cast<unsigned char>(c))) letter = true;
    }
    return letter && t.size() >= 2;
}

bool timer_name(const std::string& t) {
    if (t.size() < 2 || (t[0] != 'T' && t[0] != 't')) return false;
    return std::all_of(t.begin() + 1, t.end(),
                       [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

std::vector<Keyword> mine_candidates(const std::vector<std::string>& tokens, const Lexicon& seed) {
    std::vector<Keyword> found;
    std::vector<std::string> seen_ids;
    auto emit = [&](std::vector<std::string> surface, KeywordType type) {
        Keyword kw;
        kw.id = canonical_id(surface);
        if (kw.id.empty()) return;
        if (seed.find(kw.id)) return;
        if (std::find(seen_ids.begin(), seen_ids.end(), kw.id) != seen_ids.end()) return;
        kw.type = type;
        kw.surface_forms.push_back(std::move(surface));
        seen_ids.push_back(kw.id);
        found.push_back(std::move(kw));
    };

    for (std::size_t i = 0; i < tokens.size(); ++i) {
        // runs of >=2 all-caps words: message names
        if (all_caps(tokens[i])) {
            std::size_t j = i;
            while (j < tokens.size() && all_caps(tokens[j])) j++;
            if (j - i >= 2) {
                emit({tokens.begin() + i, tokens.begin() + j}, KeywordType::Message);
                i = j - 1;
                continue;
            }
        }
        // "timer Tnnnn"
        if (lower(tokens[i]) == "timer" && i + 1 < tokens.size() && timer_name(tokens[i + 1])) {
            emit({tokens[i], tokens[i + 1]}, KeywordType::Timer);
            i++;
            continue;
        }
        // "<words> counter": up to 4 preceding lowercase words
        if (lower(tokens[i]) == "counter" && i > 0) {
            std::size_t start = i;
            while (start > 0 && i - start < 4 && !is_punct_token(tokens[start - 1]) &&
                   !is_determiner(tokens[start - 1]) &&
                   std::islower(static_cast<unsigned char>(tokens[start - 1][0])))
                start--;
            if (start < i) emit({tokens.begin() + start, tokens.begin() + i + 1}, KeywordType::Misc);
            continue;
        }
        // quoted IE names: "..."
        if (tokens[i].size() > 2 && tokens[i].front() == '"' && tokens[i].back() == '"')
            emit({tokens[i].substr(1, tokens[i].size() - 2)}, KeywordType::Misc);
    }
    return found;
}

// ---------------------------------------------------------------------------
// Linking

namespace {

// punctuation and determiners are transparent for matching
std::string join_for_match(const std::vector<std::string>& toks, std::size_t begin, std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        if (is_punct_token(toks[i]) || is_determiner(toks[i])) continue;
        if (!out.empty()) out += " ";
        out += lower(toks[i]);
    }
    return out;
}

std::string join_surface(const std::vector<std::string>& toks) {
    std::string out;
    for (const auto& t : toks) {
        if (is_punct_token(t) || is_determiner(t)) continue;
        if (!out.empty()) out += " ";
        out += lower(t);
    }
    return out;
}

}  // namespace

std::string LinkedText::to_string() const {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out += " ";
        out += t.text;
    }
    return out;
}

LinkedText link_keywords(const std::vector<std::string>& tokens, const Lexicon& lexicon,
                         double threshold) {
    LinkedText out;
    std::size_t i = 0;
    while (i < tokens.size()) {
        const Keyword* best = nullptr;
        std::size_t best_window = 0;
        std::size_t best_surface_len = 0;
        double best_dist = 0.0;
        // best match = lowest distance, then (longest-match) widest window,
        // then longer surface form, then lexicon order
        std::size_t max_window = std::min(tokens.size() - i, lexicon.max_surface_len() + 1);
        for (std::size_t w = max_window; w >= 1; --w) {
            // a link never starts or ends at punctuation or a determiner
            if (is_punct_token(tokens[i]) || is_determiner(tokens[i])) break;
            if (is_punct_token(tokens[i + w - 1]) || is_determiner(tokens[i + w - 1])) continue;
            std::string window = join_for_match(tokens, i, i + w);
            if (window.empty()) continue;
            for (const auto& kw : lexicon.entries()) {
                for (const auto& sf : kw.surface_forms) {
                    std::string surface = join_surface(sf);
                    double d = normalized_distance(window, surface);
                    if (d > threshold) continue;
                    // Anchor the window edges: a match may not absorb leading
                    // or trailing tokens that resemble nothing in the surface
                    // form (e.g. a verb in front of a message name).
                    auto anchored = [&](const std::string& tok) {
                        for (const auto& st : sf)
                            if (normalized_distance(tok, st) <= threshold) return true;
                        return false;
                    };
                    if (!anchored(tokens[i]) || (w > 1 && !anchored(tokens[i + w - 1])))
                        continue;
                    bool better = !best || d < best_dist ||
                                  (d == best_dist &&
                                   (w > best_window ||
                                    (w == best_window && sf.size() > best_surface_len)));
                    if (better) {
                        best = &kw;
                        best_window = w;
                        best_surface_len = sf.size();
                        best_dist = d;
                    }
                }
            }
        }
        if (best) {
            LinkedToken lt;
            lt.text = best->id;
            lt.keyword = best;
            lt.matched.assign(tokens.begin() + i, tokens.begin() + i + best_window);
            out.tokens.push_back(std::move(lt));
            i += best_window;
        } else {
            out.tokens.push_back(LinkedToken{tokens[i], nullptr, {}});
            i++;
        }
    }
    return out;
}

}  // namespace specfsm::lexicon
