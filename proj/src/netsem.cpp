#include "fnmnet/netsem.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

namespace fnmnet::netsem {

using fnm::Action;
using fnm::ActKind;
using fnm::ConstEnv;
using fnm::Term;
using fnm::TermKind;
using fnm::TermPtr;

namespace {

void validate_sequence(const std::vector<Action>& seq) {
    if (seq.empty()) throw input_error("an atomic sequence cannot be empty");
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (seq[i].is_tau()) throw input_error("tau cannot occur inside an atomic sequence");
        if (i + 1 < seq.size() && !seq[i].is_input())
            throw input_error("only the final action of an atomic sequence may be an output");
    }
}

}  // namespace

Label Label::single(const Action& a) {
    if (a.is_tau()) return tau();
    return {false, {a}};
}

Label Label::sequence(std::vector<Action> actions) {
    validate_sequence(actions);
    return {false, std::move(actions)};
}

Label Label::pre_extend(const Action& gamma, const Label& sigma) {
    if (!gamma.is_input()) throw input_error("strong prefixes take inputs, got: " + gamma.str());
    if (sigma.is_tau) return single(gamma);
    std::vector<Action> seq;
    seq.reserve(sigma.seq.size() + 1);
    seq.push_back(gamma);
    seq.insert(seq.end(), sigma.seq.begin(), sigma.seq.end());
    return sequence(std::move(seq));
}

bool Label::restricted_free() const {
    return std::none_of(seq.begin(), seq.end(), [](const Action& a) { return a.restricted; });
}

std::string Label::str() const {
    if (is_tau) return "tau";
    std::string out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i) out += '.';
        out += seq[i].str();
    }
    return out;
}

TermMarking dec(const TermPtr& p, ConstEnv& env) {
    TermMarking out;
    std::vector<std::pair<PlaceName, std::int64_t>> entries;
    std::function<void(const TermPtr&)> walk = [&](const TermPtr& t) {
        switch (t->kind) {
            case TermKind::Nil:
                return;
            case TermKind::Par:
                walk(t->left);
                walk(t->right);
                return;
            case TermKind::Restrict:
                walk(env.substitute_restricted(t->left, t->name));
                return;
            case TermKind::Var:
                throw input_error("cannot decompose an open term: free variable " + t->name);
            default: {
                PlaceName name = fnm::print(t);
                out.terms.emplace(name, t);
                entries.emplace_back(std::move(name), 1);
                return;
            }
        }
    };
    walk(p);
    out.marking = Multiset<PlaceName>::from_entries(std::move(entries));
    return out;
}

std::optional<Label> sync(const Label& l1, const Label& l2) {
    if (l1.is_tau || l2.is_tau) return std::nullopt;
    if (l1.seq.size() == 1 && l2.seq.size() == 1) {
        if (l1.seq[0] == l2.seq[0].complement()) return Label::tau();
        return std::nullopt;
    }
    auto strip = [](const Label& seq, const Label& out) -> std::optional<Label> {
        if (seq.seq.size() < 2 || out.seq.size() != 1 || !out.seq[0].is_output())
            return std::nullopt;
        if (seq.seq[0] != out.seq[0].complement()) return std::nullopt;
        return Label::sequence({seq.seq.begin() + 1, seq.seq.end()});
    };
    if (auto r = strip(l1, l2)) return r;
    if (auto r = strip(l2, l1)) return r;
    return std::nullopt;
}

namespace {

std::string msync_key(const Multiset<Label>& m) {
    std::string key;
    for (const auto& [lab, cnt] : m.entries())
        key += lab.str() + "*" + std::to_string(cnt) + "|";
    return key;
}

void msync_walk(const Multiset<Label>& m, std::map<std::string, std::set<Label>>& memo,
                std::set<std::string>& in_progress, std::set<Label>& out) {
    std::string key = msync_key(m);
    if (auto it = memo.find(key); it != memo.end()) {
        out.insert(it->second.begin(), it->second.end());
        return;
    }
    if (!in_progress.insert(key).second) return;
    std::set<Label> local;
    if (m.size() == 1) {
        local.insert(m.entries()[0].first);
    } else {
        const auto& entries = m.entries();
        for (std::size_t i = 0; i < entries.size(); ++i) {
            for (std::size_t j = i; j < entries.size(); ++j) {
                if (i == j && entries[i].second < 2) continue;
                auto fused = sync(entries[i].first, entries[j].first);
                if (!fused) continue;
                Multiset<Label> rest = m.minus(Multiset<Label>::single(entries[i].first, 1))
                                           .minus(Multiset<Label>::single(entries[j].first, 1))
                                           .plus(Multiset<Label>::single(*fused, 1));
                msync_walk(rest, memo, in_progress, local);
            }
        }
    }
    in_progress.erase(key);
    memo[key] = local;
    out.insert(local.begin(), local.end());
}

}  // namespace

std::set<Label> msync(const Multiset<Label>& labels) {
    if (labels.empty()) throw input_error("msync needs a non-empty multiset of labels");
    std::map<std::string, std::set<Label>> memo;
    std::set<std::string> in_progress;
    std::set<Label> out;
    msync_walk(labels, memo, in_progress, out);
    return out;
}

namespace {

// Label and post marking of every transition derivable from one guarded or
// sequential term; the preset is the enclosing place.
void derive(const TermPtr& s, ConstEnv& env, std::vector<std::pair<Label, TermMarking>>& out) {
    switch (s->kind) {
        case TermKind::Nil:
            return;
        case TermKind::Prefix:
            out.emplace_back(Label::single(s->act), dec(s->left, env));
            return;
        case TermKind::StrongPrefix: {
            std::vector<std::pair<Label, TermMarking>> inner;
            derive(s->left, env, inner);
            for (auto& [lab, post] : inner)
                out.emplace_back(Label::pre_extend(s->act, lab), std::move(post));
            return;
        }
        case TermKind::Sum:
            // A Nil summand decomposes to the empty marking, not a place, so
            // it contributes no transitions.
            derive(s->left, env, out);
            derive(s->right, env, out);
            return;
        case TermKind::Const:
            derive(env.body(s->name), env, out);
            return;
        default:
            throw input_error("not a sequential term: " + fnm::print(s));
    }
}

struct Deriver {
    ConstEnv& env;
    std::map<PlaceName, std::vector<DerivedTransition>> memo;
    TermTable terms;  // every term seen as a place or post place
    std::map<PlaceName, std::set<std::string>> fn_cache;

    explicit Deriver(ConstEnv& e) : env(e) {}

    const std::vector<DerivedTransition>& of(const TermPtr& s) {
        PlaceName name = fnm::print(s);
        auto it = memo.find(name);
        if (it != memo.end()) return it->second;
        terms.emplace(name, s);
        std::vector<std::pair<Label, TermMarking>> raw;
        derive(s, env, raw);
        std::vector<DerivedTransition> ts;
        ts.reserve(raw.size());
        for (auto& [lab, post] : raw) {
            for (const auto& [pname, pterm] : post.terms) terms.emplace(pname, pterm);
            ts.push_back({Multiset<PlaceName>::single(name, 1), lab, post.marking});
        }
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        return memo.emplace(name, std::move(ts)).first->second;
    }

    const std::set<std::string>& free_names_of(const PlaceName& p) {
        auto it = fn_cache.find(p);
        if (it != fn_cache.end()) return it->second;
        return fn_cache.emplace(p, fnm::free_names(terms.at(p), env)).first->second;
    }

    // Merged presets must keep a name from occurring both plain and primed.
    bool admissible_preset(const Multiset<PlaceName>& pre) {
        std::set<std::string> fn;
        for (const auto& [place, _] : pre.entries()) {
            const auto& names = free_names_of(place);
            fn.insert(names.begin(), names.end());
        }
        return std::none_of(fn.begin(), fn.end(), [&](const std::string& n) {
            return !n.empty() && n.back() == '\'' && fn.count(n.substr(0, n.size() - 1));
        });
    }

    StratifyResult stratify(const std::vector<TermPtr>& places, const StratifyOptions& opts) {
        StratifyResult res;
        bool truncate = opts.truncate_at_cap;
        for (const auto& s : places)
            if (!fnm::well_formed(s, env)) truncate = true;

        std::vector<DerivedTransition> base;
        for (const auto& s : places)
            for (const auto& t : of(s)) base.push_back(t);
        std::sort(base.begin(), base.end());
        base.erase(std::unique(base.begin(), base.end()), base.end());

        std::set<DerivedTransition> all(base.begin(), base.end());
        std::vector<const DerivedTransition*> singles;
        std::size_t k = 0;
        for (const auto& t : base) {
            k = std::max(k, t.label.length());
            if (!t.label.is_tau && t.label.seq.size() == 1 && t.label.seq[0].is_output())
                singles.push_back(&t);
        }

        auto over_cap = [&] {
            if (std::ssize(all) <= opts.max_transitions) return false;
            if (truncate) {
                res.truncated = true;
                return true;
            }
            throw resource_error("derived transitions exceeded the cap of " +
                                 std::to_string(opts.max_transitions));
        };
        if (over_cap())
            while (std::ssize(all) > opts.max_transitions) all.erase(std::prev(all.end()));

        std::vector<DerivedTransition> stratum = base;
        if (res.truncated) stratum.clear();
        for (std::size_t layer = 2; layer <= k + 1 && !stratum.empty() && !res.truncated;
             ++layer) {
            std::vector<DerivedTransition> next;
            for (const auto& t : stratum) {
                for (const DerivedTransition* u : singles) {
                    auto fused = sync(t.label, u->label);
                    if (!fused) continue;
                    DerivedTransition nt{t.pre.plus(u->pre), *fused, t.post.plus(u->post)};
                    if (!admissible_preset(nt.pre)) continue;
                    if (!all.insert(nt).second) continue;
                    next.push_back(std::move(nt));
                    if (over_cap()) break;
                }
                if (res.truncated) break;
            }
            stratum = std::move(next);
        }

        for (const auto& t : all)
            if (t.label.restricted_free()) res.transitions.push_back(t);
        return res;
    }
};

}  // namespace

std::vector<DerivedTransition> place_transitions(const TermPtr& s, ConstEnv& env) {
    Deriver d(env);
    return d.of(s);
}

StratifyResult statically_enabled_transitions(const std::vector<TermPtr>& places, ConstEnv& env,
                                              const StratifyOptions& opts, TermTable* terms) {
    Deriver d(env);
    StratifyResult res = d.stratify(places, opts);
    if (terms) terms->insert(d.terms.begin(), d.terms.end());
    return res;
}

NetOfResult net_of(const TermPtr& p, ConstEnv& env, const NetOfOptions& opts) {
    if (!fnm::closed(p, env)) {
        std::string vars;
        for (const auto& v : fnm::free_vars(p, env)) vars += (vars.empty() ? "" : ", ") + v;
        throw input_error("cannot build a net for an open term; free variables: " + vars);
    }
    if (!opts.force && !fnm::well_formed(p, env))
        throw input_error(
            "term is not well-formed: an atomic sequence can end with an output, so "
            "exploration may not terminate; enable forced exploration to proceed with caps");

    TermMarking m0 = dec(p, env);
    Deriver deriver(env);
    deriver.terms.insert(m0.terms.begin(), m0.terms.end());

    std::vector<PlaceName> order;
    std::set<PlaceName> known;
    for (const auto& [name, _] : m0.marking.entries()) {
        order.push_back(name);
        known.insert(name);
    }

    NetOfResult result;
    StratifyOptions sopts{opts.max_transitions, opts.force};
    std::vector<DerivedTransition> current;
    while (true) {
        std::vector<TermPtr> place_terms;
        place_terms.reserve(order.size());
        for (const auto& name : order) place_terms.push_back(deriver.terms.at(name));
        StratifyResult sr = deriver.stratify(place_terms, sopts);
        result.truncated = result.truncated || sr.truncated;
        current = std::move(sr.transitions);

        bool grew = false;
        for (const auto& t : current) {
            for (const auto& [place, _] : t.post.entries()) {
                if (known.count(place)) continue;
                if (std::ssize(order) >= opts.max_places) {
                    if (opts.force) {
                        result.truncated = true;
                        continue;
                    }
                    throw resource_error("net places exceeded the cap of " +
                                         std::to_string(opts.max_places));
                }
                known.insert(place);
                order.push_back(place);
                grew = true;
            }
        }
        if (!grew) break;
    }

    // Truncation can leave transitions over dropped places; keep the net
    // well-defined by restricting to the kept ones.
    std::map<PlaceName, std::int32_t> index;
    for (std::size_t i = 0; i < order.size(); ++i)
        index.emplace(order[i], static_cast<std::int32_t>(i));
    auto to_indices = [&](const Multiset<PlaceName>& m) {
        std::vector<std::pair<std::int32_t, std::int64_t>> entries;
        for (const auto& [place, cnt] : m.entries())
            entries.emplace_back(index.at(place), cnt);
        return Marking::from_entries(std::move(entries));
    };

    std::vector<Transition> transitions;
    for (const auto& t : current) {
        bool in_range = true;
        for (const auto& [place, _] : t.pre.entries()) in_range &= index.count(place) > 0;
        for (const auto& [place, _] : t.post.entries()) in_range &= index.count(place) > 0;
        if (!in_range) continue;
        transitions.push_back({to_indices(t.pre), t.label.str(), to_indices(t.post)});
    }
    std::sort(transitions.begin(), transitions.end());

    result.net = Net::make(order, std::move(transitions), to_indices(m0.marking));
    for (const auto& name : order) result.terms.emplace(name, deriver.terms.at(name));
    return result;
}

}  // namespace fnmnet::netsem
