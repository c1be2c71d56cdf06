#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fnmnet/equiv.hpp"
#include "fnmnet/fnm.hpp"
#include "fnmnet/netsem.hpp"

namespace fnmnet::laws {

// An axiom schema of the sound equational theory: A1-A4 (choice), S1-S3
// (strong prefixing), C1-C2 (constants), P1-P3 (parallel), R1-R3
// (restriction), Pr1-Pr2 (presets of synchronizations, permutation laws),
// Ps1-Ps4 (postsets of synchronizations, continuation-moving laws).
struct LawSchema {
    std::string id;
    std::string metavariables;    // categories and name parameters, informal
    std::string side_conditions;  // empty when unconditional
    std::string equation;         // the template, rendered
};

// All 21 schemata, in table order.
const std::vector<LawSchema>& schemata();
const LawSchema& schema(const std::string& id);  // throws input_error

// A metavariable assignment. Term metavariables are keyed by name; indexed
// families use x1..xn, w1..wn, y1..yk (and x0/w0 for the families whose
// products start at index 0). Name metavariables are keyed a, b, a0, a1, ...
// For Pr1 `perm` lists delta(1)..delta(n); for Pr2 delta(0)..delta(n).
// y and z are optional in the schemata that mention them: omitted keys drop
// the "+ y" summand or "| z" component.
struct Binding {
    std::map<std::string, fnm::TermPtr> term;
    std::map<std::string, std::string> name;
    std::vector<int> perm;
    int n = 1;  // family arity for Pr/Ps schemata
    int k = 1;  // leader summand count for Ps3/Ps4
};

// A ground instance: both sides built, syntactic side conditions checked,
// semantic side conditions recorded as obligations (sp-equalities that must
// be discharged before the instance counts as valid).
struct LawInstance {
    std::string schema;
    fnm::ConstEnv env;
    fnm::TermPtr left, right;
    std::vector<std::pair<fnm::TermPtr, fnm::TermPtr>> obligations;
};

// Builds an instance or throws input_error describing the category violation
// or side-condition failure. C1/C2 define fresh constants in `env`.
LawInstance instantiate(const LawSchema& s, const Binding& b, fnm::ConstEnv& env);
LawInstance instantiate(const std::string& schema_id, const Binding& b, fnm::ConstEnv& env);

struct LawCaps {
    equiv::EquivOptions equiv;
    netsem::NetOfOptions compile;
};

enum class Verdict { Sound, Counterexample, ResourceLimit };

struct InstanceResult {
    Verdict verdict = Verdict::Sound;
    std::string detail;  // counterexample pair or the cap that was hit
};

// Discharges the obligations, then decides left ~sp right on the disjoint
// union of the two compiled nets. Cap overruns surface as ResourceLimit.
InstanceResult verify_instance(const LawInstance& inst, const LawCaps& caps = {});

// Deterministic generator of closed well-formed terms. Constants drawn from
// a fresh pool with guarded, parallel-free, tail-recursive bodies, so every
// generated term denotes a finite bounded net.
class TermGen {
  public:
    explicit TermGen(std::uint64_t seed) : rng_(static_cast<std::uint32_t>(seed ^ (seed >> 32))) {}
    // Defines generated constants in an existing environment instead.
    TermGen(std::uint64_t seed, fnm::ConstEnv& env)
        : rng_(static_cast<std::uint32_t>(seed ^ (seed >> 32))), env_(&env) {}

    fnm::ConstEnv& env() { return *env_; }

    fnm::TermPtr guarded(int size);           // summand-legal
    fnm::TermPtr wf_guarded(int size);        // additionally safe under strong prefixes
    fnm::TermPtr sequential(int size);        // guarded or a constant
    fnm::TermPtr restriction_free(int size);  // parallel compositions allowed
    fnm::TermPtr general(int size);           // restrictions allowed
    fnm::TermPtr of_category(fnm::Category c, int size);

    // One-variable open guarded term; the variable occurs only in sequential
    // tail positions, so recursive closure keeps nets bounded.
    fnm::TermPtr open_guarded(int size, const std::string& var);

    // p with sum and parallel operands recursively swapped at random, and an
    // occasional "+ 0" wrapped around a non-nil guarded subterm. Both rewrites
    // are sound for sp equivalence, so the result is always equivalent to p.
    fnm::TermPtr sound_variant(const fnm::TermPtr& p);

    std::string action_name();             // from the term alphabet {a, b, c}
    fnm::Action visible_action(bool allow_output);
    int pick(int lo, int hi);              // inclusive
    Binding binding_for(const std::string& schema_id);

  private:
    fnm::TermPtr make_constant();

    fnm::ConstEnv owned_;
    std::mt19937 rng_;
    fnm::ConstEnv* env_ = &owned_;
    int next_const_ = 1;
};

// Convenience stream: `count` terms of the category at the size bound.
std::vector<fnm::TermPtr> gen_terms(std::uint64_t seed, int count, int size_bound,
                                    fnm::Category category, fnm::ConstEnv& env);

struct SchemaReport {
    std::string schema;
    int instances = 0;
    int sound = 0;
    int resource_limited = 0;
    std::vector<std::string> counterexamples;  // rendered "lhs  vs  rhs"
};

struct LawReport {
    std::uint64_t seed = 0;
    int per_schema = 0;
    std::vector<SchemaReport> schemata;

    int total_instances() const;
    int total_counterexamples() const;
    int total_resource_limited() const;
};

// Seeded soundness sweep: `per_schema` random instances of every schema, or
// of just the schemata in `only` when it is non-empty.
LawReport check_laws(std::uint64_t seed, int per_schema, const LawCaps& caps = {},
                     const std::vector<std::string>& only = {});

std::string report_to_json(const LawReport& r);
std::string report_summary(const LawReport& r);  // human-readable table

struct CongruenceCase {
    std::string context;  // strong_prefix, sum, prefix, parallel, restriction, recursion
    int applicable = 0;
    int preserved = 0;
    int resource_limited = 0;
};

struct CongruenceReport {
    std::uint64_t seed = 0;
    int rounds = 0;
    int equivalent_pairs = 0;
    int inequivalent_pairs = 0;  // hypothesis vacuous; contexts not applicable
    int resource_limited_pairs = 0;
    std::vector<CongruenceCase> cases;
    std::vector<std::string> violations;  // contexts that broke equivalence

    const CongruenceCase& at(const std::string& context) const;
};

// For generated pairs with p ~sp q, closes both sides under strong prefixing,
// choice, prefixing, parallel composition, and restriction, and checks the
// results stay sp-equivalent. Open pairs equal on a closing-substitution
// sample are additionally closed recursively (A = p{A/x}, B = q{B/x}).
CongruenceReport check_congruence(std::uint64_t seed, int rounds, const LawCaps& caps = {});

std::string congruence_to_json(const CongruenceReport& r);

}  // namespace fnmnet::laws
