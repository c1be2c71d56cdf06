#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fnmnet/multiset.hpp"

namespace fnmnet {

// Markings and steps are multisets over indices into Net::places and
// Net::transitions respectively.
using Marking = Multiset<std::int32_t>;
using Step = Multiset<std::int32_t>;

inline constexpr std::int64_t kDefaultReachCap = 10000;
inline constexpr std::int64_t kDefaultStepCap = 100000;
inline constexpr std::int64_t kDefaultCoverabilityCap = 1000000;

struct Transition {
    Marking pre;  // never empty
    std::string label;
    Marking post;  // may be empty

    auto operator<=>(const Transition&) const = default;
};

struct Net {
    std::vector<std::string> places;  // declaration order is significant
    std::vector<Transition> transitions;
    Marking initial;
    std::map<std::string, std::int32_t> place_index;

    static Net make(std::vector<std::string> places, std::vector<Transition> transitions,
                    Marking initial);

    std::int32_t index_of(const std::string& place) const;
    std::vector<std::string> labels() const;  // sorted, distinct
    // Checks net invariants: distinct non-empty place names, non-empty presets,
    // in-range place indices, positive counts, no duplicate (pre,label,post).
    void validate() const;
};

// JSON form:
//   {"places": [...],
//    "transitions": [{"pre": {place: count}, "label": l, "post": {...}}, ...],
//    "initial": {place: count}}
// Markings serialize as objects with keys in sorted order; the empty marking
// is {}.
Net net_from_json(const std::string& text);
std::string net_to_json(const Net& n);
Marking marking_from_json(const Net& n, const std::string& text);
std::string marking_to_json(const Net& n, const Marking& m);
// CLI shorthand "place:count,place:count"; empty string is the empty marking.
Marking marking_from_cli(const Net& n, const std::string& text);
std::string marking_to_cli(const Net& n, const Marking& m);

// Graphviz export: circles for places (token count under the name), boxes for
// transitions, arc weights printed when greater than one.
std::string net_to_dot(const Net& n, const Marking& m);
std::string net_to_dot(const Net& n);

bool enabled(const Net& n, const Marking& m, std::size_t t);
Marking fire(const Net& n, const Marking& m, std::size_t t);

Marking step_pre(const Net& n, const Step& g);
Marking step_post(const Net& n, const Step& g);
Multiset<std::string> step_label(const Net& n, const Step& g);
bool step_enabled(const Net& n, const Marking& m, const Step& g);
Marking step_fire(const Net& n, const Marking& m, const Step& g);
// All non-empty steps G with pre(G) <= m, in counting order over transition
// indices (index 0 is the most significant digit, counts ascend).
std::vector<Step> enumerate_steps(const Net& n, const Marking& m,
                                  std::int64_t cap = kDefaultStepCap);

struct ReachGraph {
    std::vector<Marking> nodes;  // BFS order; nodes[0] is the start marking
    std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> edges;  // (transition, target)
    std::map<Marking, std::int32_t> index;
};

// Breadth-first firing closure; transitions are tried in index order so the
// node ordering is deterministic.
ReachGraph reachable(const Net& n, const Marking& m0, std::int64_t cap = kDefaultReachCap);

// Coverability-tree boundedness check; true iff no reachable marking strictly
// covers one of its ancestors.
bool is_bounded(const Net& n, const Marking& m0, std::int64_t node_cap = kDefaultCoverabilityCap);

// Places ever marked and transitions ever fired along reachable markings.
// Requires the reachability closure to fit under the cap.
Net dynamic_subnet(const Net& n, const Marking& m0, std::int64_t cap = kDefaultReachCap);
// Least fixpoint of static enabledness: a transition is statically enabled by
// a place set that contains its whole preset support, and contributes its
// postset support. Polynomial in the net size.
Net static_subnet(const Net& n, const Marking& m0);

struct UnionNet {
    Net net;       // initial marking is initial1 + initial2
    Marking initial1, initial2;
    std::map<std::string, std::string> rename1, rename2;  // original name -> union name
};

// Disjoint union; places are tagged "1:" and "2:" by origin.
UnionNet disjoint_union(const Net& a, const Net& b);

}  // namespace fnmnet
