#include "fnmnet/petri.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fnmnet {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

ordered_json marking_object(const Net& n, const Marking& m) {
    std::vector<std::pair<std::string, std::int64_t>> named;
    named.reserve(m.entries().size());
    for (const auto& [idx, cnt] : m.entries())
        named.emplace_back(n.places.at(static_cast<std::size_t>(idx)), cnt);
    std::sort(named.begin(), named.end());
    ordered_json out = ordered_json::object();
    for (const auto& [name, cnt] : named) out[name] = cnt;
    return out;
}

Marking marking_from_object(const Net& n, const json& obj, const std::string& what) {
    if (!obj.is_object()) throw input_error(what + " must be a JSON object");
    std::vector<Marking::Entry> entries;
    for (const auto& [name, value] : obj.items()) {
        if (!value.is_number_integer() || value.get<std::int64_t>() <= 0)
            throw input_error(what + ": count for place \"" + name +
                              "\" must be a positive integer");
        entries.emplace_back(n.index_of(name), value.get<std::int64_t>());
    }
    return Marking::from_entries(std::move(entries));
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace

Net Net::make(std::vector<std::string> places, std::vector<Transition> transitions,
              Marking initial) {
    Net n;
    n.places = std::move(places);
    n.transitions = std::move(transitions);
    n.initial = std::move(initial);
    for (std::size_t i = 0; i < n.places.size(); ++i)
        n.place_index.emplace(n.places[i], static_cast<std::int32_t>(i));
    n.validate();
    return n;
}

std::int32_t Net::index_of(const std::string& place) const {
    auto it = place_index.find(place);
    if (it == place_index.end()) throw input_error("unknown place \"" + place + "\"");
    return it->second;
}

std::vector<std::string> Net::labels() const {
    std::set<std::string> out;
    for (const auto& t : transitions) out.insert(t.label);
    return {out.begin(), out.end()};
}

void Net::validate() const {
    if (place_index.size() != places.size())
        throw input_error("duplicate place names");
    for (const auto& p : places)
        if (p.empty()) throw input_error("empty place name");
    auto check_marking = [&](const Marking& m, const std::string& what) {
        for (const auto& [idx, cnt] : m.entries()) {
            if (idx < 0 || static_cast<std::size_t>(idx) >= places.size())
                throw input_error(what + " refers to an undeclared place");
            if (cnt <= 0) throw input_error(what + " has a non-positive count");
        }
    };
    std::set<std::tuple<Marking, std::string, Marking>> seen;
    for (const auto& t : transitions) {
        if (t.pre.empty()) throw input_error("transition with empty preset");
        if (t.label.empty()) throw input_error("transition with empty label");
        check_marking(t.pre, "transition preset");
        check_marking(t.post, "transition postset");
        if (!seen.emplace(t.pre, t.label, t.post).second)
            throw input_error("duplicate transition (same preset, label and postset)");
    }
    check_marking(initial, "initial marking");
}

Net net_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw input_error(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw input_error("net must be a JSON object");
    for (const auto& [key, _] : doc.items())
        if (key != "places" && key != "transitions" && key != "initial")
            throw input_error("unknown key \"" + key + "\" in net object");
    if (!doc.contains("places") || !doc["places"].is_array())
        throw input_error("net needs a \"places\" array");
    if (!doc.contains("transitions") || !doc["transitions"].is_array())
        throw input_error("net needs a \"transitions\" array");

    Net n;
    for (const auto& p : doc["places"]) {
        if (!p.is_string()) throw input_error("place names must be strings");
        n.places.push_back(p.get<std::string>());
    }
    for (std::size_t i = 0; i < n.places.size(); ++i) {
        if (!n.place_index.emplace(n.places[i], static_cast<std::int32_t>(i)).second)
            throw input_error("duplicate place name \"" + n.places[i] + "\"");
    }
    for (const auto& t : doc["transitions"]) {
        if (!t.is_object()) throw input_error("transitions must be objects");
        for (const auto& [key, _] : t.items())
            if (key != "pre" && key != "label" && key != "post")
                throw input_error("unknown key \"" + key + "\" in transition object");
        if (!t.contains("pre") || !t.contains("label") || !t.contains("post"))
            throw input_error("transition needs pre, label and post");
        if (!t["label"].is_string()) throw input_error("transition label must be a string");
        Transition tr;
        tr.pre = marking_from_object(n, t["pre"], "transition preset");
        tr.label = t["label"].get<std::string>();
        tr.post = marking_from_object(n, t["post"], "transition postset");
        n.transitions.push_back(std::move(tr));
    }
    if (doc.contains("initial")) n.initial = marking_from_object(n, doc["initial"], "initial marking");
    n.validate();
    return n;
}

std::string net_to_json(const Net& n) {
    ordered_json doc;
    doc["places"] = n.places;
    doc["transitions"] = ordered_json::array();
    for (const auto& t : n.transitions) {
        ordered_json tj;
        tj["pre"] = marking_object(n, t.pre);
        tj["label"] = t.label;
        tj["post"] = marking_object(n, t.post);
        doc["transitions"].push_back(std::move(tj));
    }
    doc["initial"] = marking_object(n, n.initial);
    return doc.dump(2) + "\n";
}

Marking marking_from_json(const Net& n, const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw input_error(std::string("invalid JSON: ") + e.what());
    }
    return marking_from_object(n, doc, "marking");
}

std::string marking_to_json(const Net& n, const Marking& m) {
    return marking_object(n, m).dump();
}

Marking marking_from_cli(const Net& n, const std::string& text) {
    std::vector<Marking::Entry> entries;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string item = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        pos = comma == std::string::npos ? text.size() : comma + 1;
        // trim
        std::size_t b = item.find_first_not_of(" \t");
        std::size_t e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        item = item.substr(b, e - b + 1);
        std::size_t colon = item.rfind(':');
        std::string name = colon == std::string::npos ? item : item.substr(0, colon);
        std::int64_t cnt = 1;
        if (colon != std::string::npos) {
            try {
                std::size_t used = 0;
                cnt = std::stoll(item.substr(colon + 1), &used);
                if (used != item.size() - colon - 1) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw input_error("bad count in marking item \"" + item + "\"");
            }
            if (cnt <= 0) throw input_error("marking counts must be positive");
        }
        entries.emplace_back(n.index_of(name), cnt);
    }
    return Marking::from_entries(std::move(entries));
}

std::string marking_to_cli(const Net& n, const Marking& m) {
    std::vector<std::pair<std::string, std::int64_t>> named;
    for (const auto& [idx, cnt] : m.entries())
        named.emplace_back(n.places.at(static_cast<std::size_t>(idx)), cnt);
    std::sort(named.begin(), named.end());
    std::string out;
    for (const auto& [name, cnt] : named) {
        if (!out.empty()) out += ",";
        out += name + ":" + std::to_string(cnt);
    }
    return out;
}

std::string net_to_dot(const Net& n, const Marking& m) {
    std::ostringstream out;
    out << "digraph net {\n  rankdir=LR;\n";
    for (std::size_t i = 0; i < n.places.size(); ++i) {
        out << "  p" << i << " [shape=circle, label=\"" << dot_escape(n.places[i]);
        std::int64_t tokens = m.count(static_cast<std::int32_t>(i));
        if (tokens > 0) out << "\\n" << tokens;
        out << "\"];\n";
    }
    for (std::size_t j = 0; j < n.transitions.size(); ++j) {
        out << "  t" << j << " [shape=box, label=\"" << dot_escape(n.transitions[j].label)
            << "\"];\n";
    }
    for (std::size_t j = 0; j < n.transitions.size(); ++j) {
        for (const auto& [idx, cnt] : n.transitions[j].pre.entries()) {
            out << "  p" << idx << " -> t" << j;
            if (cnt > 1) out << " [label=\"" << cnt << "\"]";
            out << ";\n";
        }
        for (const auto& [idx, cnt] : n.transitions[j].post.entries()) {
            out << "  t" << j << " -> p" << idx;
            if (cnt > 1) out << " [label=\"" << cnt << "\"]";
            out << ";\n";
        }
    }
    out << "}\n";
    return out.str();
}

std::string net_to_dot(const Net& n) { return net_to_dot(n, n.initial); }

bool enabled(const Net& n, const Marking& m, std::size_t t) {
    return n.transitions.at(t).pre.subset_of(m);
}

Marking fire(const Net& n, const Marking& m, std::size_t t) {
    const Transition& tr = n.transitions.at(t);
    if (!tr.pre.subset_of(m))
        throw precondition_error("transition " + std::to_string(t) + " (" + tr.label +
                                 ") is not enabled");
    return m.minus(tr.pre).plus(tr.post);
}

Marking step_pre(const Net& n, const Step& g) {
    Marking out;
    for (const auto& [t, cnt] : g.entries())
        out = out.plus(n.transitions.at(static_cast<std::size_t>(t)).pre.scaled(cnt));
    return out;
}

Marking step_post(const Net& n, const Step& g) {
    Marking out;
    for (const auto& [t, cnt] : g.entries())
        out = out.plus(n.transitions.at(static_cast<std::size_t>(t)).post.scaled(cnt));
    return out;
}

Multiset<std::string> step_label(const Net& n, const Step& g) {
    std::vector<Multiset<std::string>::Entry> entries;
    for (const auto& [t, cnt] : g.entries())
        entries.emplace_back(n.transitions.at(static_cast<std::size_t>(t)).label, cnt);
    return Multiset<std::string>::from_entries(std::move(entries));
}

bool step_enabled(const Net& n, const Marking& m, const Step& g) {
    return !g.empty() && step_pre(n, g).subset_of(m);
}

Marking step_fire(const Net& n, const Marking& m, const Step& g) {
    if (!step_enabled(n, m, g)) throw precondition_error("step is not enabled");
    return m.minus(step_pre(n, g)).plus(step_post(n, g));
}

namespace {

void enumerate_steps_rec(const Net& n, std::size_t t, const Marking& remaining, Step& current,
                         std::vector<Step>& out, std::int64_t cap) {
    if (t == n.transitions.size()) {
        if (!current.empty()) {
            if (static_cast<std::int64_t>(out.size()) >= cap)
                throw resource_error("step enumeration exceeded the cap of " +
                                     std::to_string(cap));
            out.push_back(current);
        }
        return;
    }
    const Marking& pre = n.transitions[t].pre;
    Marking left = remaining;
    for (std::int64_t c = 0;; ++c) {
        Step next = c == 0 ? current
                           : current.plus(Step::single(static_cast<std::int32_t>(t), c));
        enumerate_steps_rec(n, t + 1, left, next, out, cap);
        if (!pre.subset_of(left)) break;
        left = left.minus(pre);
    }
}

}  // namespace

std::vector<Step> enumerate_steps(const Net& n, const Marking& m, std::int64_t cap) {
    std::vector<Step> out;
    Step current;
    enumerate_steps_rec(n, 0, m, current, out, cap);
    return out;
}

ReachGraph reachable(const Net& n, const Marking& m0, std::int64_t cap) {
    ReachGraph g;
    g.nodes.push_back(m0);
    g.index.emplace(m0, 0);
    std::deque<std::int32_t> queue{0};
    while (!queue.empty()) {
        std::int32_t src = queue.front();
        queue.pop_front();
        if (static_cast<std::size_t>(src) >= g.edges.size()) g.edges.resize(src + 1);
        Marking m = g.nodes[static_cast<std::size_t>(src)];
        for (std::size_t t = 0; t < n.transitions.size(); ++t) {
            if (!enabled(n, m, t)) continue;
            Marking next = fire(n, m, t);
            auto [it, fresh] = g.index.emplace(next, static_cast<std::int32_t>(g.nodes.size()));
            if (fresh) {
                if (static_cast<std::int64_t>(g.nodes.size()) >= cap)
                    throw resource_error("reachable markings exceeded the cap of " +
                                         std::to_string(cap));
                g.nodes.push_back(next);
                queue.push_back(it->second);
            }
            g.edges[static_cast<std::size_t>(src)].emplace_back(static_cast<std::int32_t>(t),
                                                                it->second);
        }
    }
    g.edges.resize(g.nodes.size());
    return g;
}

namespace {

using CountVec = std::vector<std::int64_t>;

CountVec to_vec(const Net& n, const Marking& m) {
    CountVec v(n.places.size(), 0);
    for (const auto& [idx, cnt] : m.entries()) v[static_cast<std::size_t>(idx)] = cnt;
    return v;
}

bool leq(const CountVec& a, const CountVec& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

}  // namespace

bool is_bounded(const Net& n, const Marking& m0, std::int64_t node_cap) {
    // Depth-first coverability tree. A branch stops when its marking is
    // subsumed by an ancestor (<=); a strict cover of an ancestor proves
    // unboundedness. Both prunes preserve the boundedness answer because any
    // firing sequence from a subsumed marking can be replayed from the larger
    // ancestor.
    struct Node {
        CountVec marking;
        std::int32_t parent;
    };
    std::vector<Node> nodes;
    nodes.push_back({to_vec(n, m0), -1});
    std::vector<std::int32_t> stack{0};
    std::vector<CountVec> pres, posts;
    for (const auto& t : n.transitions) {
        pres.push_back(to_vec(n, t.pre));
        posts.push_back(to_vec(n, t.post));
    }
    while (!stack.empty()) {
        std::int32_t cur = stack.back();
        stack.pop_back();
        CountVec m = nodes[static_cast<std::size_t>(cur)].marking;
        for (std::size_t t = 0; t < n.transitions.size(); ++t) {
            if (!leq(pres[t], m)) continue;
            CountVec next(m);
            for (std::size_t i = 0; i < next.size(); ++i) next[i] += posts[t][i] - pres[t][i];
            bool pruned = false;
            for (std::int32_t a = cur; a != -1; a = nodes[static_cast<std::size_t>(a)].parent) {
                const CountVec& anc = nodes[static_cast<std::size_t>(a)].marking;
                if (leq(anc, next)) {
                    if (anc != next) return false;  // strict cover: unbounded
                    pruned = true;                  // loop
                    break;
                }
                if (leq(next, anc)) {
                    pruned = true;  // subsumed by ancestor
                    break;
                }
            }
            if (pruned) continue;
            if (static_cast<std::int64_t>(nodes.size()) >= node_cap)
                throw resource_error("coverability tree exceeded the cap of " +
                                     std::to_string(node_cap) + " nodes");
            nodes.push_back({std::move(next), cur});
            stack.push_back(static_cast<std::int32_t>(nodes.size() - 1));
        }
    }
    return true;
}

namespace {

// Keeps the original declaration order for the surviving places and
// transitions.
Net restrict_net(const Net& n, const std::set<std::int32_t>& keep_places,
                 const std::vector<bool>& keep_transition, const Marking& initial) {
    std::vector<std::string> places;
    std::map<std::int32_t, std::int32_t> remap;
    for (std::size_t i = 0; i < n.places.size(); ++i) {
        auto idx = static_cast<std::int32_t>(i);
        if (keep_places.count(idx)) {
            remap.emplace(idx, static_cast<std::int32_t>(places.size()));
            places.push_back(n.places[i]);
        }
    }
    auto remap_marking = [&](const Marking& m) {
        std::vector<Marking::Entry> entries;
        for (const auto& [idx, cnt] : m.entries()) entries.emplace_back(remap.at(idx), cnt);
        return Marking::from_entries(std::move(entries));
    };
    std::vector<Transition> transitions;
    for (std::size_t t = 0; t < n.transitions.size(); ++t) {
        if (!keep_transition[t]) continue;
        transitions.push_back({remap_marking(n.transitions[t].pre), n.transitions[t].label,
                               remap_marking(n.transitions[t].post)});
    }
    return Net::make(std::move(places), std::move(transitions), remap_marking(initial));
}

}  // namespace

Net dynamic_subnet(const Net& n, const Marking& m0, std::int64_t cap) {
    ReachGraph g = reachable(n, m0, cap);
    std::set<std::int32_t> marked;
    std::vector<bool> fired(n.transitions.size(), false);
    for (const auto& m : g.nodes)
        for (const auto& [idx, _] : m.entries()) marked.insert(idx);
    for (const auto& outs : g.edges)
        for (const auto& [t, _] : outs) fired[static_cast<std::size_t>(t)] = true;
    return restrict_net(n, marked, fired, m0);
}

Net static_subnet(const Net& n, const Marking& m0) {
    std::set<std::int32_t> places;
    for (const auto& [idx, _] : m0.entries()) places.insert(idx);
    std::vector<bool> added(n.transitions.size(), false);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t t = 0; t < n.transitions.size(); ++t) {
            if (added[t]) continue;
            bool ok = true;
            for (const auto& [idx, _] : n.transitions[t].pre.entries())
                if (!places.count(idx)) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            added[t] = true;
            changed = true;
            for (const auto& [idx, _] : n.transitions[t].post.entries()) places.insert(idx);
        }
    }
    return restrict_net(n, places, added, m0);
}

UnionNet disjoint_union(const Net& a, const Net& b) {
    UnionNet u;
    std::vector<std::string> places;
    for (const auto& p : a.places) {
        u.rename1.emplace(p, "1:" + p);
        places.push_back("1:" + p);
    }
    for (const auto& p : b.places) {
        u.rename2.emplace(p, "2:" + p);
        places.push_back("2:" + p);
    }
    auto shift = [](const Marking& m, std::int32_t offset) {
        std::vector<Marking::Entry> entries;
        for (const auto& [idx, cnt] : m.entries()) entries.emplace_back(idx + offset, cnt);
        return Marking::from_entries(std::move(entries));
    };
    auto offset = static_cast<std::int32_t>(a.places.size());
    std::vector<Transition> transitions;
    for (const auto& t : a.transitions) transitions.push_back(t);
    for (const auto& t : b.transitions)
        transitions.push_back({shift(t.pre, offset), t.label, shift(t.post, offset)});
    u.initial1 = a.initial;
    u.initial2 = shift(b.initial, offset);
    u.net = Net::make(std::move(places), std::move(transitions), u.initial1.plus(u.initial2));
    return u;
}

}  // namespace fnmnet
