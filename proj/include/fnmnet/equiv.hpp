#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fnmnet/petri.hpp"

namespace fnmnet::equiv {

// A linking is a multiset of ordered place pairs; it projects to two markings
// of equal size. Linkings are the states of the structure-preserving
// bisimulation game.
using PlacePair = std::pair<std::int32_t, std::int32_t>;
using Linking = Multiset<PlacePair>;
// A plain set of candidate links, used both as a generator for relations
// closed under multiset union and as the fast-path hint for sp_bisim.
using LinkSet = std::vector<PlacePair>;

inline constexpr std::int64_t kDefaultLinkingCap = 200000;
inline constexpr std::int64_t kDefaultEquivMarkingCap = 10000;
inline constexpr std::int64_t kDefaultMarkingSizeCap = 12;

Marking project1(const Linking& l);
Marking project2(const Linking& l);
Linking inverse(const Linking& l);

// All relational compositions of l1 and l2: every way of matching each link
// (a, b) in l1 with a distinct link (b, c) in l2 through the shared middle
// place. Empty unless project2(l1) == project1(l2). Sorted and duplicate-free.
std::vector<Linking> compose(const Linking& l1, const Linking& l2,
                             std::int64_t cap = kDefaultLinkingCap);

// Every linking that projects to exactly (m1, m2). Empty when the sizes
// differ; the count never exceeds |m1| factorial.
std::vector<Linking> pairings(const Marking& m1, const Marking& m2,
                              std::int64_t cap = kDefaultLinkingCap);

bool interleaving_bisim(const Net& n, const Marking& m1, const Marking& m2,
                        std::int64_t max_markings = kDefaultEquivMarkingCap);
// Step variant: moves are concurrent steps, matched by their label multisets.
bool step_bisim(const Net& n, const Marking& m1, const Marking& m2,
                std::int64_t max_markings = kDefaultEquivMarkingCap,
                std::int64_t max_steps = kDefaultStepCap);

// A candidate sp-bisimulation. When `generated` is false the relation is
// exactly `linkings`. When true, `linkings` is a finite sample of the closure
// of its links under multiset union, and validation checks the closure.
struct SpRelation {
    std::vector<Linking> linkings;
    bool generated = false;
};

struct EquivOptions {
    std::int64_t max_markings = kDefaultEquivMarkingCap;  // per side
    std::int64_t max_linkings = kDefaultLinkingCap;
    std::int64_t max_marking_size = kDefaultMarkingSizeCap;
    std::int64_t max_steps = kDefaultStepCap;
};

struct SpResult {
    bool equivalent = false;
    std::optional<SpRelation> witness;  // present iff equivalent
};

// Greatest-fixpoint check of structure-preserving bisimilarity between two
// markings of one net (use disjoint_union to compare markings of two nets).
// The candidate universe is every linking between equal-size reachable
// markings; rounds delete linkings with no matching transition transfer until
// stable. The witness, when present, passes check_sp_relation.
SpResult sp_bisim(const Net& n, const Marking& m1, const Marking& m2,
                  const EquivOptions& opts = {});
// As above, but first tries the closure of `links` under multiset union: if
// check_links accepts it and some linking over `links` projects to (m1, m2),
// the answer is true without exploring the state space. Only on a miss does
// the full fixpoint run.
SpResult sp_bisim(const Net& n, const Marking& m1, const Marking& m2,
                  const LinkSet& links, const EquivOptions& opts = {});

// Validates the transfer property of a candidate relation: for every
// linking l in R, every sub-linking c matching a transition preset on either
// side extends to a matching transition on the other side and a re-linking
// of the postsets that lands back in R.
bool check_sp_relation(const Net& n, const SpRelation& r);

// True iff the closure of `links` under multiset union is a structure-
// preserving bisimulation. Decidable without materializing the closure: only
// sub-linkings no larger than the largest transition preset matter, and a
// target linking lies in the closure exactly when its links all come from
// `links`.
bool check_links(const Net& n, const LinkSet& links);

// True iff some linking using only `links` projects to exactly (m1, m2);
// writes one such linking through `out` when given.
bool linking_over(const LinkSet& links, const Marking& m1, const Marking& m2,
                  Linking* out = nullptr);

struct IsoResult {
    bool isomorphic = false;
    // For place index i of `a`, place_map[i] is the matching place of `b`.
    std::vector<std::int32_t> place_map;
};

// Net isomorphism that additionally maps initial marking to initial marking:
// a place bijection inducing a bijection on transitions (pre, label, post all
// preserved).
IsoResult rooted_iso(const Net& a, const Net& b);

// Witness serialization: a JSON list of linkings, each a list of
// [place1, place2, count] triples using place names.
std::string sp_relation_to_json(const Net& n, const SpRelation& r);
SpRelation sp_relation_from_json(const Net& n, const std::string& text);
// Link sets serialize as a JSON list of [place1, place2] pairs.
std::string links_to_json(const Net& n, const LinkSet& links);
LinkSet links_from_json(const Net& n, const std::string& text);

}  // namespace fnmnet::equiv
