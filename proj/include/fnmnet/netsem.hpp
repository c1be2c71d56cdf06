#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fnmnet/fnm.hpp"
#include "fnmnet/multiset.hpp"
#include "fnmnet/petri.hpp"

namespace fnmnet::netsem {

// Caps used when exploring terms whose atomic sequences can end with an
// output; for those, transition generation is best-effort and truncation is
// reported instead of looping.
inline constexpr std::int64_t kDefaultNetTransitionCap = 50000;
inline constexpr std::int64_t kDefaultNetPlaceCap = 5000;

// A transition label: tau, a single action, or an atomic sequence of inputs
// ending in one final input or output. Restricted actions may appear; labels
// containing them are synchronization intermediates, not net labels.
struct Label {
    bool is_tau = true;
    std::vector<fnm::Action> seq;  // empty iff is_tau

    static Label tau() { return {}; }
    static Label single(const fnm::Action& a);
    static Label sequence(std::vector<fnm::Action> actions);
    // gamma ⋄ sigma: the strong-prefix extension; gamma absorbs a tau.
    static Label pre_extend(const fnm::Action& gamma, const Label& sigma);

    std::size_t length() const { return is_tau ? 1 : seq.size(); }
    bool restricted_free() const;
    // "tau" or actions joined with '.', e.g. "a.~b" or "c'.dec".
    std::string str() const;

    auto operator<=>(const Label&) const = default;
};

// Places are closed sequential terms named by their canonical printed form.
using PlaceName = std::string;
using TermTable = std::map<PlaceName, fnm::TermPtr>;

struct DerivedTransition {
    Multiset<PlaceName> pre;
    Label label;
    Multiset<PlaceName> post;

    auto operator<=>(const DerivedTransition&) const = default;
};

struct TermMarking {
    Multiset<PlaceName> marking;
    TermTable terms;  // term behind every name in the marking
};

// Decomposition of a closed process into its marking: parallel components
// become tokens, restrictions push a prime onto their bound name first.
TermMarking dec(const fnm::TermPtr& p, fnm::ConstEnv& env);

// The binary synchronization step: complementary single actions fuse to tau,
// a sequence loses its head input to the complementary single output. Two
// sequences never synchronize.
std::optional<Label> sync(const Label& l1, const Label& l2);

// Every single label reachable from `labels` by repeatedly replacing two
// elements with their sync; empty when the multiset cannot fuse completely.
std::set<Label> msync(const Multiset<Label>& labels);

// All singleton-preset transitions of one place.
std::vector<DerivedTransition> place_transitions(const fnm::TermPtr& s, fnm::ConstEnv& env);

struct StratifyOptions {
    std::int64_t max_transitions = kDefaultNetTransitionCap;
    // Truncate at the cap instead of failing; engaged automatically when some
    // place is not well-formed.
    bool truncate_at_cap = false;
};

struct StratifyResult {
    std::vector<DerivedTransition> transitions;  // deterministic order
    bool truncated = false;
};

// Transitions statically enabled by the place set: singleton-preset ones
// first, then synchronizations layered by participant count, each layer
// pairing a previous transition with a single-output singleton one whose
// merged preset keeps names and their primed forms apart. Only labels free
// of restricted actions are returned; intermediates stay internal. Collects
// the terms of post places into `terms` when given.
StratifyResult statically_enabled_transitions(const std::vector<fnm::TermPtr>& places,
                                              fnm::ConstEnv& env,
                                              const StratifyOptions& opts = {},
                                              TermTable* terms = nullptr);

struct NetOfOptions {
    // Accept terms that are not well-formed and explore them under caps.
    bool force = false;
    std::int64_t max_places = kDefaultNetPlaceCap;
    std::int64_t max_transitions = kDefaultNetTransitionCap;
};

struct NetOfResult {
    Net net;  // initial marking is the decomposition of the term
    TermTable terms;
    bool truncated = false;
};

// The net a process denotes: places grow from the decomposition by closing
// under the post places of statically enabled transitions. Place names are
// canonical term strings, in discovery order; transitions are sorted. Terms
// that are not well-formed are refused unless forced, in which case caps
// apply and truncation is reported.
NetOfResult net_of(const fnm::TermPtr& p, fnm::ConstEnv& env, const NetOfOptions& opts = {});

}  // namespace fnmnet::netsem
