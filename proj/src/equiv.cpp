#include "fnmnet/equiv.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fnmnet/errors.hpp"

namespace fnmnet::equiv {

namespace {

using json = nlohmann::json;

[[noreturn]] void over_cap(const std::string& what, std::int64_t cap) {
    throw resource_error(what + " exceeded the cap of " + std::to_string(cap));
}

// All size-k sub-multisets of the multiset described by `es`, in a
// deterministic order (per element, larger take first).
template <typename T>
void size_k_rec(const std::vector<std::pair<T, std::int64_t>>& es, std::size_t i, std::int64_t k,
                std::vector<std::pair<T, std::int64_t>>& acc, std::vector<Multiset<T>>& out) {
    if (k == 0) {
        out.push_back(Multiset<T>::from_entries(acc));
        return;
    }
    if (i == es.size()) return;
    std::int64_t most = std::min<std::int64_t>(k, es[i].second);
    for (std::int64_t take = most; take >= 0; --take) {
        if (take > 0) acc.emplace_back(es[i].first, take);
        size_k_rec(es, i + 1, k - take, acc, out);
        if (take > 0) acc.pop_back();
    }
}

template <typename T>
std::vector<Multiset<T>> size_k_subsets(const std::vector<std::pair<T, std::int64_t>>& es,
                                        std::int64_t k) {
    std::vector<Multiset<T>> out;
    std::vector<std::pair<T, std::int64_t>> acc;
    size_k_rec(es, 0, k, acc, out);
    return out;
}

// All size-k multisets over `pool` (repetition unbounded), deterministic.
void multichoose_rec(const std::vector<PlacePair>& pool, std::size_t i, std::int64_t k,
                     std::vector<std::pair<PlacePair, std::int64_t>>& acc,
                     std::vector<Linking>& out) {
    if (k == 0) {
        out.push_back(Linking::from_entries(acc));
        return;
    }
    if (i == pool.size()) return;
    for (std::int64_t take = k; take >= 0; --take) {
        if (take > 0) acc.emplace_back(pool[i], take);
        multichoose_rec(pool, i + 1, k - take, acc, out);
        if (take > 0) acc.pop_back();
    }
}

// Every linking c whose chosen-side projection is exactly `m`, drawing each
// link from `l` at most as often as `l` holds it.
std::vector<Linking> sub_linkings(const Linking& l, const Marking& m, int side) {
    std::map<std::int32_t, std::vector<std::pair<PlacePair, std::int64_t>>> grouped;
    for (const auto& e : l.entries())
        grouped[side == 1 ? e.first.first : e.first.second].push_back(e);
    std::vector<std::vector<Linking>> per_place;
    for (const auto& [place, want] : m.entries()) {
        auto it = grouped.find(place);
        if (it == grouped.end()) return {};
        auto choices = size_k_subsets(it->second, want);
        if (choices.empty()) return {};
        per_place.push_back(std::move(choices));
    }
    std::vector<Linking> out{Linking{}};
    for (const auto& choices : per_place) {
        std::vector<Linking> next;
        next.reserve(out.size() * choices.size());
        for (const auto& base : out)
            for (const auto& c : choices) next.push_back(base.plus(c));
        out = std::move(next);
    }
    return out;
}

// As sub_linkings, but links come from the unbounded pool `grouped` (multisets
// over a link set rather than sub-multisets of one linking).
std::vector<Linking> pool_linkings(const std::map<std::int32_t, std::vector<PlacePair>>& grouped,
                                   const Marking& m) {
    std::vector<std::vector<Linking>> per_place;
    for (const auto& [place, want] : m.entries()) {
        auto it = grouped.find(place);
        if (it == grouped.end()) return {};
        std::vector<Linking> choices;
        std::vector<std::pair<PlacePair, std::int64_t>> acc;
        multichoose_rec(it->second, 0, want, acc, choices);
        if (choices.empty()) return {};
        per_place.push_back(std::move(choices));
    }
    std::vector<Linking> out{Linking{}};
    for (const auto& choices : per_place) {
        std::vector<Linking> next;
        next.reserve(out.size() * choices.size());
        for (const auto& base : out)
            for (const auto& c : choices) next.push_back(base.plus(c));
        out = std::move(next);
    }
    return out;
}

// Shared machinery for transfer checks: transition lookup by (label, preset)
// and memoized postset pairings.
struct TransferContext {
    const Net& net;
    std::map<std::pair<std::string, Marking>, std::vector<std::size_t>> by_label_pre;
    std::map<std::pair<Marking, Marking>, std::vector<Linking>> pairing_memo;

    explicit TransferContext(const Net& n) : net(n) {
        for (std::size_t t = 0; t < n.transitions.size(); ++t)
            by_label_pre[{n.transitions[t].label, n.transitions[t].pre}].push_back(t);
    }

    const std::vector<Linking>& postset_pairings(const Marking& a, const Marking& b) {
        auto key = std::make_pair(a, b);
        auto it = pairing_memo.find(key);
        if (it != pairing_memo.end()) return it->second;
        return pairing_memo.emplace(std::move(key), pairings(a, b)).first->second;
    }

    // True iff sub-linking c of l, matched on `side` by transition t, can be
    // answered: a transition with the same label consumes the other projection
    // and some re-linking of the postsets lands in the relation.
    template <typename Member>
    bool answered(const Linking& l, const Linking& c, std::size_t t, int side, Member member) {
        const Transition& tr = net.transitions[t];
        Marking other = side == 1 ? project2(c) : project1(c);
        auto it = by_label_pre.find({tr.label, other});
        if (it == by_label_pre.end()) return false;
        Linking rest = l.minus(c);
        for (std::size_t u : it->second) {
            const Transition& ur = net.transitions[u];
            const auto& relinks = side == 1 ? postset_pairings(tr.post, ur.post)
                                            : postset_pairings(ur.post, tr.post);
            for (const auto& cbar : relinks)
                if (member(rest.plus(cbar))) return true;
        }
        return false;
    }

    template <typename Member>
    bool transfer_ok(const Linking& l, Member member) {
        for (std::size_t t = 0; t < net.transitions.size(); ++t) {
            for (int side : {1, 2}) {
                for (const auto& c : sub_linkings(l, net.transitions[t].pre, side))
                    if (!answered(l, c, t, side, member)) return false;
            }
        }
        return true;
    }
};

std::string encode_step(const Multiset<std::string>& labels) {
    std::string out;
    for (const auto& [lab, cnt] : labels.entries()) {
        out += std::to_string(cnt);
        out += '*';
        out += lab;
        out += '\x1f';
    }
    return out;
}

struct Lts {
    std::vector<Marking> nodes;
    std::map<Marking, std::int32_t> index;
    std::vector<std::vector<std::pair<std::string, std::int32_t>>> edges;
};

// The two reach sets are each closed under firing, so every successor (single
// transition or full step) stays inside the union.
Lts union_lts(const Net& n, const ReachGraph& r1, const ReachGraph& r2, bool steps,
              std::int64_t max_steps) {
    Lts g;
    auto absorb = [&](const ReachGraph& r) {
        for (const auto& m : r.nodes)
            if (g.index.emplace(m, static_cast<std::int32_t>(g.nodes.size())).second)
                g.nodes.push_back(m);
    };
    absorb(r1);
    absorb(r2);
    g.edges.resize(g.nodes.size());
    for (std::size_t v = 0; v < g.nodes.size(); ++v) {
        const Marking& m = g.nodes[v];
        auto& out = g.edges[v];
        if (steps) {
            for (const auto& st : enumerate_steps(n, m, max_steps))
                out.emplace_back(encode_step(step_label(n, st)), g.index.at(step_fire(n, m, st)));
        } else {
            for (std::size_t t = 0; t < n.transitions.size(); ++t)
                if (enabled(n, m, t))
                    out.emplace_back(n.transitions[t].label, g.index.at(fire(n, m, t)));
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    return g;
}

// Coarsest strong bisimulation via signature-based partition refinement. Each
// round splits blocks by the set of (label, target block) moves; the round
// count is bounded by the node count.
std::vector<std::int32_t> bisim_blocks(const Lts& g) {
    std::vector<std::int32_t> block(g.nodes.size(), 0);
    std::int32_t nblocks = 1;
    for (;;) {
        std::map<std::pair<std::int32_t, std::vector<std::pair<std::string, std::int32_t>>>,
                 std::int32_t>
            ids;
        std::vector<std::int32_t> next(g.nodes.size());
        for (std::size_t v = 0; v < g.nodes.size(); ++v) {
            std::set<std::pair<std::string, std::int32_t>> sig;
            for (const auto& [lab, w] : g.edges[v]) sig.insert({lab, block[w]});
            auto key = std::make_pair(block[v],
                                      std::vector(sig.begin(), sig.end()));
            auto [it, fresh] = ids.emplace(std::move(key), static_cast<std::int32_t>(ids.size()));
            (void)fresh;
            next[v] = it->second;
        }
        auto refined = static_cast<std::int32_t>(ids.size());
        if (refined == nblocks) return next;
        nblocks = refined;
        block = std::move(next);
    }
}

bool lts_bisim(const Net& n, const Marking& m1, const Marking& m2, bool steps,
               std::int64_t max_markings, std::int64_t max_steps) {
    ReachGraph r1 = reachable(n, m1, max_markings);
    ReachGraph r2 = reachable(n, m2, max_markings);
    Lts g = union_lts(n, r1, r2, steps, max_steps);
    auto block = bisim_blocks(g);
    return block[g.index.at(m1)] == block[g.index.at(m2)];
}

Linking identity_linking(const Marking& m) {
    std::vector<Linking::Entry> es;
    es.reserve(m.entries().size());
    for (const auto& [p, c] : m.entries()) es.emplace_back(PlacePair{p, p}, c);
    return Linking::from_entries(std::move(es));
}

std::vector<PlacePair> distinct_links(const std::vector<Linking>& linkings) {
    std::set<PlacePair> seen;
    for (const auto& l : linkings)
        for (const auto& e : l.entries()) seen.insert(e.first);
    return {seen.begin(), seen.end()};
}

}  // namespace

Marking project1(const Linking& l) {
    std::vector<Marking::Entry> es;
    es.reserve(l.entries().size());
    for (const auto& [pp, c] : l.entries()) es.emplace_back(pp.first, c);
    return Marking::from_entries(std::move(es));
}

Marking project2(const Linking& l) {
    std::vector<Marking::Entry> es;
    es.reserve(l.entries().size());
    for (const auto& [pp, c] : l.entries()) es.emplace_back(pp.second, c);
    return Marking::from_entries(std::move(es));
}

Linking inverse(const Linking& l) {
    std::vector<Linking::Entry> es;
    es.reserve(l.entries().size());
    for (const auto& [pp, c] : l.entries()) es.emplace_back(PlacePair{pp.second, pp.first}, c);
    return Linking::from_entries(std::move(es));
}

std::vector<Linking> pairings(const Marking& m1, const Marking& m2, std::int64_t cap) {
    std::vector<Linking> out;
    if (m1.size() != m2.size()) return out;
    std::vector<Linking::Entry> acc;
    std::function<void(const Marking&, const Marking&)> go = [&](const Marking& a,
                                                                 const Marking& b) {
        if (a.empty()) {
            if (static_cast<std::int64_t>(out.size()) >= cap)
                over_cap("candidate linkings", cap);
            out.push_back(Linking::from_entries(acc));
            return;
        }
        const auto& [s, k] = a.entries().front();
        Marking rest1 = a.minus(Marking::single(s, k));
        for (const auto& w : size_k_subsets(b.entries(), k)) {
            std::size_t mark = acc.size();
            for (const auto& [u, c] : w.entries()) acc.emplace_back(PlacePair{s, u}, c);
            go(rest1, b.minus(w));
            acc.resize(mark);
        }
    };
    go(m1, m2);
    return out;
}

std::vector<Linking> compose(const Linking& l1, const Linking& l2, std::int64_t cap) {
    if (project2(l1) != project1(l2)) return {};
    // Per middle place: the first components arriving there and the second
    // components leaving it must be matched bijectively.
    std::map<std::int32_t, std::vector<Marking::Entry>> into, outof;
    for (const auto& [pp, c] : l1.entries()) into[pp.second].emplace_back(pp.first, c);
    for (const auto& [pp, c] : l2.entries()) outof[pp.first].emplace_back(pp.second, c);
    std::vector<Linking> acc{Linking{}};
    for (const auto& [mid, lefts] : into) {
        auto matchings =
            pairings(Marking::from_entries(lefts), Marking::from_entries(outof.at(mid)), cap);
        std::vector<Linking> next;
        next.reserve(acc.size() * matchings.size());
        for (const auto& base : acc)
            for (const auto& m : matchings) {
                next.push_back(base.plus(m));
                if (static_cast<std::int64_t>(next.size()) > cap)
                    over_cap("candidate linkings", cap);
            }
        acc = std::move(next);
    }
    // Different per-place matchings can sum to the same composite.
    std::set<Linking> dedup(acc.begin(), acc.end());
    return {dedup.begin(), dedup.end()};
}

bool interleaving_bisim(const Net& n, const Marking& m1, const Marking& m2,
                        std::int64_t max_markings) {
    return lts_bisim(n, m1, m2, false, max_markings, kDefaultStepCap);
}

bool step_bisim(const Net& n, const Marking& m1, const Marking& m2, std::int64_t max_markings,
                std::int64_t max_steps) {
    return lts_bisim(n, m1, m2, true, max_markings, max_steps);
}

bool check_sp_relation(const Net& n, const SpRelation& r) {
    if (r.generated) return check_links(n, distinct_links(r.linkings));
    std::set<Linking> rel(r.linkings.begin(), r.linkings.end());
    TransferContext ctx(n);
    auto member = [&](const Linking& x) { return rel.count(x) > 0; };
    for (const auto& l : rel)
        if (!ctx.transfer_ok(l, member)) return false;
    return true;
}

bool check_links(const Net& n, const LinkSet& links) {
    std::set<PlacePair> lset(links.begin(), links.end());
    std::map<std::int32_t, std::vector<PlacePair>> by1, by2;
    for (const auto& pp : lset) {
        by1[pp.first].push_back(pp);
        by2[pp.second].push_back(pp);
    }
    TransferContext ctx(n);
    auto member = [&](const Linking& x) {
        for (const auto& e : x.entries())
            if (!lset.count(e.first)) return false;
        return true;
    };
    // Any sub-linking of a closure member is itself a closure member, and the
    // leftover part stays in the closure automatically, so checking every
    // preset-sized linking over the links decides the whole closure.
    for (std::size_t t = 0; t < n.transitions.size(); ++t) {
        for (int side : {1, 2}) {
            const auto& grouped = side == 1 ? by1 : by2;
            for (const auto& c : pool_linkings(grouped, n.transitions[t].pre))
                if (!ctx.answered(c, c, t, side, member)) return false;
        }
    }
    return true;
}

bool linking_over(const LinkSet& links, const Marking& m1, const Marking& m2, Linking* out) {
    if (m1.size() != m2.size()) return false;
    std::set<PlacePair> lset(links.begin(), links.end());
    std::map<std::int32_t, std::vector<PlacePair>> by1;
    for (const auto& pp : lset) by1[pp.first].push_back(pp);
    const auto& es = m1.entries();
    std::vector<Linking::Entry> acc;
    std::function<bool(std::size_t, const Marking&)> go = [&](std::size_t i,
                                                              const Marking& rem2) -> bool {
        if (i == es.size()) {
            if (!rem2.empty()) return false;
            if (out) *out = Linking::from_entries(acc);
            return true;
        }
        auto it = by1.find(es[i].first);
        if (it == by1.end()) return false;
        std::vector<Linking> choices;
        std::vector<Linking::Entry> tmp;
        multichoose_rec(it->second, 0, es[i].second, tmp, choices);
        for (const auto& c : choices) {
            if (!project2(c).subset_of(rem2)) continue;
            std::size_t mark = acc.size();
            for (const auto& e : c.entries()) acc.push_back(e);
            if (go(i + 1, rem2.minus(project2(c)))) return true;
            acc.resize(mark);
        }
        return false;
    };
    return go(0, m2);
}

namespace {

SpResult sp_fixpoint(const Net& n, const Marking& m1, const Marking& m2,
                     const EquivOptions& opts) {
    if (m1.size() != m2.size()) return {};
    if (m1 == m2) {
        // Reflexivity: the closure of the identity links is always a valid
        // relation (every transfer re-links a fired marking to itself), so
        // equal markings need no exploration even on unbounded nets.
        SpRelation w;
        w.generated = true;
        w.linkings.push_back(identity_linking(m1));
        for (std::size_t p = 0; p < n.places.size(); ++p) {
            auto i = static_cast<std::int32_t>(p);
            w.linkings.push_back(Linking::single({i, i}));
        }
        return {true, std::move(w)};
    }
    ReachGraph r1 = reachable(n, m1, opts.max_markings);
    ReachGraph r2 = reachable(n, m2, opts.max_markings);
    for (const auto& r : {std::cref(r1), std::cref(r2)})
        for (const auto& m : r.get().nodes)
            if (m.size() > opts.max_marking_size) over_cap("marking size", opts.max_marking_size);

    // Linkings whose projections are not even interleaving-bisimilar can never
    // appear in a valid relation, so the candidate universe keeps only pairs
    // from the same partition block.
    Lts g = union_lts(n, r1, r2, false, opts.max_steps);
    auto block = bisim_blocks(g);
    if (block[g.index.at(m1)] != block[g.index.at(m2)]) return {};

    std::set<Linking> universe;
    for (const auto& u : r1.nodes) {
        for (const auto& v : r2.nodes) {
            if (u.size() != v.size()) continue;
            if (block[g.index.at(u)] != block[g.index.at(v)]) continue;
            for (auto& l : pairings(u, v, opts.max_linkings)) {
                universe.insert(std::move(l));
                if (static_cast<std::int64_t>(universe.size()) > opts.max_linkings)
                    over_cap("candidate linkings", opts.max_linkings);
            }
        }
    }

    // Synchronous refinement: each round evaluates every linking against the
    // previous round's survivors, so the result is independent of iteration
    // order.
    TransferContext ctx(n);
    std::set<Linking> cur = std::move(universe);
    for (;;) {
        auto member = [&](const Linking& x) { return cur.count(x) > 0; };
        std::set<Linking> next;
        for (const auto& l : cur)
            if (ctx.transfer_ok(l, member)) next.insert(l);
        if (next.size() == cur.size()) break;
        cur = std::move(next);
    }

    bool found = false;
    for (const auto& l : cur) {
        if (project1(l) == m1 && project2(l) == m2) {
            found = true;
            break;
        }
    }
    if (!found) return {};
    SpRelation w;
    w.linkings.assign(cur.begin(), cur.end());
    return {true, std::move(w)};
}

}  // namespace

SpResult sp_bisim(const Net& n, const Marking& m1, const Marking& m2, const EquivOptions& opts) {
    return sp_fixpoint(n, m1, m2, opts);
}

SpResult sp_bisim(const Net& n, const Marking& m1, const Marking& m2, const LinkSet& links,
                  const EquivOptions& opts) {
    Linking cover;
    if (check_links(n, links) && linking_over(links, m1, m2, &cover)) {
        // The witness carries every hint link as a singleton so that the
        // closure it denotes is the full validated one.
        SpRelation w;
        w.generated = true;
        w.linkings.push_back(std::move(cover));
        for (const auto& pp : links) w.linkings.push_back(Linking::single(pp));
        return {true, std::move(w)};
    }
    return sp_fixpoint(n, m1, m2, opts);
}

IsoResult rooted_iso(const Net& a, const Net& b) {
    if (a.places.size() != b.places.size() || a.transitions.size() != b.transitions.size() ||
        a.initial.size() != b.initial.size())
        return {};

    // Invariant signature per place: initial tokens plus, for every adjacent
    // transition, its role, arc weight, label, and arity shape.
    auto signatures = [](const Net& n) {
        std::vector<std::vector<std::string>> sig(n.places.size());
        // Index-invariant: weight profiles are sorted, not in place order.
        auto profile = [](const Marking& m) {
            std::vector<std::int64_t> cs;
            cs.reserve(m.entries().size());
            for (const auto& [p, c] : m.entries()) cs.push_back(c);
            std::sort(cs.begin(), cs.end());
            std::string s;
            for (auto c : cs) s += std::to_string(c) + ",";
            return s;
        };
        auto shape = [&](const Transition& t) {
            return t.label + "/" + profile(t.pre) + "/" + profile(t.post);
        };
        for (const auto& t : n.transitions) {
            for (const auto& [p, c] : t.pre.entries())
                sig[p].push_back("pre:" + std::to_string(c) + ":" + shape(t));
            for (const auto& [p, c] : t.post.entries())
                sig[p].push_back("post:" + std::to_string(c) + ":" + shape(t));
        }
        for (std::size_t p = 0; p < sig.size(); ++p) {
            sig[p].push_back("m0:" + std::to_string(n.initial.count(static_cast<std::int32_t>(p))));
            std::sort(sig[p].begin(), sig[p].end());
        }
        return sig;
    };
    auto sa = signatures(a), sb = signatures(b);

    std::vector<std::vector<std::int32_t>> cands(a.places.size());
    for (std::size_t i = 0; i < a.places.size(); ++i) {
        for (std::size_t j = 0; j < b.places.size(); ++j)
            if (sa[i] == sb[j]) cands[i].push_back(static_cast<std::int32_t>(j));
        if (cands[i].empty()) return {};
    }

    // Assign the most constrained places first.
    std::vector<std::size_t> order(a.places.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return cands[x].size() < cands[y].size(); });

    std::vector<std::int32_t> map(a.places.size(), -1);
    std::vector<bool> used(b.places.size(), false);

    auto apply = [&](const Marking& m) {
        std::vector<Marking::Entry> es;
        for (const auto& [p, c] : m.entries()) es.emplace_back(map[p], c);
        return Marking::from_entries(std::move(es));
    };
    auto matches = [&]() {
        if (apply(a.initial) != b.initial) return false;
        std::vector<Transition> ta;
        ta.reserve(a.transitions.size());
        for (const auto& t : a.transitions) ta.push_back({apply(t.pre), t.label, apply(t.post)});
        std::vector<Transition> tb = b.transitions;
        std::sort(ta.begin(), ta.end());
        std::sort(tb.begin(), tb.end());
        return ta == tb;
    };

    std::function<bool(std::size_t)> assign = [&](std::size_t k) -> bool {
        if (k == order.size()) return matches();
        std::size_t i = order[k];
        for (std::int32_t j : cands[i]) {
            if (used[j]) continue;
            map[i] = j;
            used[j] = true;
            if (assign(k + 1)) return true;
            used[j] = false;
            map[i] = -1;
        }
        return false;
    };
    if (a.places.empty()) return {matches(), {}};
    if (!assign(0)) return {};
    return {true, std::move(map)};
}

std::string sp_relation_to_json(const Net& n, const SpRelation& r) {
    json arr = json::array();
    for (const auto& l : r.linkings) {
        json lk = json::array();
        for (const auto& [pp, c] : l.entries()) {
            lk.push_back(json::array({n.places.at(static_cast<std::size_t>(pp.first)),
                                      n.places.at(static_cast<std::size_t>(pp.second)), c}));
        }
        arr.push_back(std::move(lk));
    }
    return arr.dump(2);
}

namespace {

std::int32_t place_of(const Net& n, const json& j) {
    if (!j.is_string()) throw input_error("place names in linkings must be strings");
    return n.index_of(j.get<std::string>());
}

}  // namespace

SpRelation sp_relation_from_json(const Net& n, const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw input_error("witness is not valid JSON");
    if (!doc.is_array()) throw input_error("witness must be a JSON list of linkings");
    SpRelation out;
    for (const auto& lk : doc) {
        if (!lk.is_array()) throw input_error("each linking must be a list of triples");
        std::vector<Linking::Entry> es;
        for (const auto& triple : lk) {
            if (!triple.is_array() || triple.size() != 3)
                throw input_error("each link must be a [place, place, count] triple");
            std::int64_t c = triple.at(2).is_number_integer() ? triple.at(2).get<std::int64_t>()
                                                              : -1;
            if (c <= 0) throw input_error("link counts must be positive integers");
            es.emplace_back(PlacePair{place_of(n, triple.at(0)), place_of(n, triple.at(1))}, c);
        }
        out.linkings.push_back(Linking::from_entries(std::move(es)));
    }
    return out;
}

std::string links_to_json(const Net& n, const LinkSet& links) {
    json arr = json::array();
    for (const auto& pp : links)
        arr.push_back(json::array({n.places.at(static_cast<std::size_t>(pp.first)),
                                   n.places.at(static_cast<std::size_t>(pp.second))}));
    return arr.dump(2);
}

LinkSet links_from_json(const Net& n, const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw input_error("link set is not valid JSON");
    if (!doc.is_array()) throw input_error("link set must be a JSON list of pairs");
    LinkSet out;
    for (const auto& pair : doc) {
        if (!pair.is_array() || pair.size() != 2)
            throw input_error("each link must be a [place, place] pair");
        out.emplace_back(place_of(n, pair.at(0)), place_of(n, pair.at(1)));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace fnmnet::equiv
