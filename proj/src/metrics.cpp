#include "specfsm/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace specfsm::metrics {

std::string canonical_literal(const logic::Literal& l) {
    logic::Atom a = l.atom;
    if (a.cmp == logic::Cmp::Eq && a.value.kind == logic::Value::Kind::Bool) {
        if (l.negated) a.value = logic::Value::boolean(!a.value.bval);
        return a.canonical();
    }
    if (!l.negated) return a.canonical();
    return "!(" + a.canonical() + ")";
}

std::string canonical_action(const dsl::Assignment& a) { return a.to_ir_dump(); }

std::vector<SplitTransition> split_for_scoring(const std::vector<fsm::Transition>& ts,
                                               const logic::Limits& limits) {
    std::vector<SplitTransition> out;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const fsm::Transition& t = ts[i];
        for (const logic::Term& term : logic::to_dnf(t.condition, limits)) {
            if (!logic::term_satisfiable(term)) continue;
            SplitTransition s;
            s.origin = static_cast<int>(i);
            for (const logic::Literal& l : term) s.condition.insert(canonical_literal(l));
            if (t.s_i != fsm::kWildcardState)
                s.condition.insert("@state = " + t.s_i);
            for (const dsl::Assignment& a : t.actions)
                s.actions.push_back(canonical_action(a));
            if (t.s_f != fsm::kWildcardState && t.s_f != t.s_i)
                s.actions.push_back("@reach(" + t.s_f + ")");
            out.push_back(std::move(s));
        }
    }
    return out;
}

double match_score(const SplitTransition& gt, const SplitTransition& inf) {
    if (gt.condition.empty()) return 1.0;  // vacuous: no terms to miss
    std::size_t matched = 0;
    for (const auto& term : gt.condition) matched += inf.condition.count(term);
    return static_cast<double>(matched) / static_cast<double>(gt.condition.size());
}

MatchReport match_report(const std::vector<SplitTransition>& gt,
                         const std::vector<SplitTransition>& inf) {
    MatchReport r;
    for (std::size_t g = 0; g < gt.size(); ++g) {
        MatchReport::ConditionEntry e;
        e.gt_origin = static_cast<int>(g);
        for (std::size_t i = 0; i < inf.size(); ++i) {
            double s = match_score(gt[g], inf[i]);
            if (e.best_inferred < 0 || s > e.best) {
                e.best = s;
                e.best_inferred = static_cast<int>(i);
            }
        }
        if (e.best_inferred < 0) e.best = 0.0;
        r.conditions.push_back(e);

        for (const auto& action : gt[g].actions) {
            MatchReport::ActionEntry ae;
            ae.action = action;
            for (std::size_t i = 0; i < inf.size(); ++i) {
                if (std::find(inf[i].actions.begin(), inf[i].actions.end(), action) ==
                    inf[i].actions.end())
                    continue;
                double s = match_score(gt[g], inf[i]);
                if (ae.best_inferred < 0 || s > ae.best) {
                    ae.best = s;
                    ae.best_inferred = static_cast<int>(i);
                }
            }
            r.actions.push_back(std::move(ae));
        }
    }
    double csum = 0.0, asum = 0.0;
    for (const auto& e : r.conditions) csum += e.best;
    for (const auto& e : r.actions) asum += e.best;
    r.condition_accuracy = r.conditions.empty() ? 1.0 : csum / r.conditions.size();
    r.action_accuracy = r.actions.empty() ? 1.0 : asum / r.actions.size();
    return r;
}

double score_conditions(const std::vector<SplitTransition>& gt,
                        const std::vector<SplitTransition>& inf) {
    return match_report(gt, inf).condition_accuracy;
}

double score_actions(const std::vector<SplitTransition>& gt,
                     const std::vector<SplitTransition>& inf) {
    return match_report(gt, inf).action_accuracy;
}

std::string MatchReport::to_table() const {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3);
    os << "conditions (per ground-truth split):\n";
    for (const auto& e : conditions)
        os << "  gt#" << e.gt_origin << "  best " << e.best << "  via inf#"
           << e.best_inferred << "\n";
    os << "actions (per ground-truth action):\n";
    for (const auto& e : actions)
        os << "  " << e.action << "  best " << e.best << "  via inf#" << e.best_inferred
           << "\n";
    os << "condition accuracy: " << condition_accuracy << "\n";
    os << "action accuracy: " << action_accuracy << "\n";
    return os.str();
}

std::string MatchReport::to_json() const {
    nlohmann::ordered_json j;
    j["conditions"] = nlohmann::ordered_json::array();
    for (const auto& e : conditions)
        j["conditions"].push_back(
            {{"gt", e.gt_origin}, {"best", e.best}, {"inferred", e.best_inferred}});
    j["actions"] = nlohmann::ordered_json::array();
    for (const auto& e : actions)
        j["actions"].push_back(
            {{"action", e.action}, {"best", e.best}, {"inferred", e.best_inferred}});
    j["condition_accuracy"] = condition_accuracy;
    j["action_accuracy"] = action_accuracy;
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// Behavioral diff

namespace {

struct Outcome {
    std::string next_state;
    std::vector<std::string> actions;  // fired actions, in firing order
    bool operator==(const Outcome& o) const {
        return next_state == o.next_state && actions == o.actions;
    }
};

Outcome step(const fsm::Fsm& f, const std::string& state,
             const std::map<std::string, logic::Value>& assignment) {
    Outcome out;
    out.next_state = state;
    bool first = true;
    for (const auto& t : f.transitions) {
        if (t.s_i != state && t.s_i != fsm::kWildcardState) continue;
        if (!logic::eval_expr(t.condition, assignment)) continue;
        if (first && t.s_f != fsm::kWildcardState) out.next_state = t.s_f;
        first = false;
        for (const auto& a : t.actions) out.actions.push_back(canonical_action(a));
    }
    return out;
}

}  // namespace

std::vector<Deviation> diff_fsm(const fsm::Fsm& reference, const fsm::Fsm& subject,
                                const logic::Limits& limits) {
    std::vector<Deviation> out;
    std::set<std::string> ref_states(reference.states.begin(), reference.states.end());
    std::set<std::string> sub_states(subject.states.begin(), subject.states.end());
    for (const auto& s : reference.states)
        if (!sub_states.count(s))
            out.push_back({Deviation::Kind::MissingState, s, "", {},
                           "state absent from subject"});
    for (const auto& s : subject.states)
        if (!ref_states.count(s))
            out.push_back({Deviation::Kind::ExtraState, s, "", {},
                           "state absent from reference"});

    logic::Alphabet alpha;
    for (const auto& f : {std::cref(reference), std::cref(subject)})
        for (const auto& t : f.get().transitions) alpha.observe(t.condition);
    alpha.check_limit(limits.max_atoms);

    std::vector<std::string> shared;
    for (const auto& s : subject.states)
        if (ref_states.count(s)) shared.push_back(s);

    for (const auto& t : subject.transitions) {
        std::vector<std::string> starts =
            t.s_i == fsm::kWildcardState ? shared : std::vector<std::string>{t.s_i};
        for (const auto& s : starts) {
            if (!ref_states.count(s)) continue;
            bool found = false;
            alpha.enumerate([&](const std::map<std::string, logic::Value>& a) {
                if (!logic::eval_expr(t.condition, a)) return true;
                if (step(reference, s, a) == step(subject, s, a)) return true;
                Deviation d;
                d.kind = Deviation::Kind::Behavior;
                d.state = s;
                d.transition = t.label();
                d.assignment = a;
                d.detail = "subject diverges from reference";
                out.push_back(std::move(d));
                found = true;
                return false;  // one distinguishing assignment suffices
            });
            if (found) break;  // report each subject transition at most once
        }
    }
    return out;
}

std::string deviations_to_json(const std::vector<Deviation>& ds) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& d : ds) {
        nlohmann::ordered_json e;
        switch (d.kind) {
            case Deviation::Kind::MissingState: e["kind"] = "missing-state"; break;
            case Deviation::Kind::ExtraState: e["kind"] = "extra-state"; break;
            case Deviation::Kind::Behavior: e["kind"] = "behavior"; break;
        }
        e["state"] = d.state;
        if (!d.transition.empty()) e["transition"] = d.transition;
        nlohmann::ordered_json a = nlohmann::ordered_json::object();
        for (const auto& [k, v] : d.assignment) a[k] = v.to_string();
        e["assignment"] = a;
        e["detail"] = d.detail;
        j.push_back(std::move(e));
    }
    return j.dump(2);
}

}  // namespace specfsm::metrics
