#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "fnmnet/errors.hpp"

namespace fnmnet::fnm {

// A restricted action (rendered a' / ~a') never comes from the parser; it
// only arises when a restriction is pushed into a term.
enum class ActKind { Input, Output, Tau };

struct Action {
    ActKind kind = ActKind::Tau;
    std::string name;  // empty for tau
    bool restricted = false;

    static Action tau() { return {}; }
    static Action input(std::string n, bool restricted = false) {
        return {ActKind::Input, std::move(n), restricted};
    }
    static Action output(std::string n, bool restricted = false) {
        return {ActKind::Output, std::move(n), restricted};
    }

    bool is_tau() const { return kind == ActKind::Tau; }
    bool is_input() const { return kind == ActKind::Input; }
    bool is_output() const { return kind == ActKind::Output; }

    Action complement() const;  // a <-> ~a, keeping the restriction flag
    // "tau", "a", "~a", "a'", "~a'"
    std::string str() const;

    auto operator<=>(const Action&) const = default;
};

enum class TermKind { Nil, Prefix, StrongPrefix, Sum, Par, Restrict, Const, Var };

// Categories from tightest to loosest: guarded terms may appear under sums
// and strong prefixes; sequential adds constants and variables; restriction-
// free adds parallel composition; general adds top-level restriction.
enum class Category { Guarded = 0, Sequential = 1, RestrictionFree = 2, General = 3 };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    TermKind kind = TermKind::Nil;
    Action act;           // Prefix, StrongPrefix
    TermPtr left, right;  // children; unary nodes use left
    std::string name;     // Restrict binder, Const or Var name
};

// Constructors validate the syntactic category of their operands and throw
// input_error on violations, so ill-formed shapes are unrepresentable.
TermPtr nil();
TermPtr prefix(Action act, TermPtr body);         // body restriction-free
TermPtr strong_prefix(Action act, TermPtr body);  // act an input, body guarded
TermPtr sum(TermPtr l, TermPtr r);                // both guarded
TermPtr par(TermPtr l, TermPtr r);                // both restriction-free
TermPtr restriction(std::string name, TermPtr body);
TermPtr constant(std::string name);
TermPtr variable(std::string name);

Category category_of(const TermPtr& p);
bool in_category(const TermPtr& p, Category c);
bool term_eq(const TermPtr& a, const TermPtr& b);

// Canonical, injective rendering; reparseable for terms without restricted
// actions. Used as place identity by the net semantics.
std::string print(const TermPtr& p);

class ConstEnv {
  public:
    // Body must be guarded; redefining a name is an error.
    void define(const std::string& name, TermPtr body);
    bool has(const std::string& name) const;
    TermPtr body(const std::string& name) const;
    std::vector<std::string> names() const;

    // p with every free occurrence of the plain name `from` replaced by `to`
    // (restricted if to_restricted). Constants specialize to derived constants
    // named Name{to/from}; the mapping is cached in this environment. Throws
    // if the replacement name would be captured by a restriction binder.
    TermPtr substitute_action(const TermPtr& p, const std::string& from, const std::string& to,
                              bool to_restricted);
    // p{a'/a}, as used when a restriction is pushed into a term.
    TermPtr substitute_restricted(const TermPtr& p, const std::string& a) {
        return substitute_action(p, a, a, true);
    }
    // p{q/x} for a closed sequential q; also rewrites constant bodies that
    // mention x, producing derived constants.
    TermPtr substitute_var(const TermPtr& p, const std::string& x, const TermPtr& q);

  private:
    friend std::set<std::string> free_names(const TermPtr&, const ConstEnv&);
    friend std::set<std::string> free_vars(const TermPtr&, const ConstEnv&);
    std::map<std::string, TermPtr> defs_;
};

// Free action names; restricted names are rendered with a prime, so a term
// may mention both "a" and "a'". Follows constant bodies.
std::set<std::string> free_names(const TermPtr& p, const ConstEnv& env);
// Restriction binder names, including those inside nothing else (binders
// cannot occur under prefixes, so this is the top spine plus nothing).
std::set<std::string> bound_names(const TermPtr& p);
std::set<std::string> free_vars(const TermPtr& p, const ConstEnv& env);
bool closed(const TermPtr& p, const ConstEnv& env);

// No base name occurs both plain and restricted.
bool admissible(const TermPtr& p, const ConstEnv& env);

// Every strong prefix continuation offers only inputs, tau, further strong
// prefixes or 0, recursively through sums and constant bodies; this keeps
// executable atomic sequences free of outputs (except as their final action
// is an input or tau after all synchronization).
bool well_formed(const TermPtr& p, const ConstEnv& env);

struct Program {
    ConstEnv env;
    TermPtr main;
};

// Concrete syntax:
//   # comment
//   Name := guarded-term ;
//   main = process ;
// Prefix binds tighter than +, which binds tighter than |; restriction
// (nu a) extends as far right as possible. Constants are capitalized,
// action names are lowercase; tau, nu and main are reserved.
Program parse_program(const std::string& text);
// Single closed process against an existing environment (no definitions).
TermPtr parse_term(const std::string& text, const ConstEnv& env);

}  // namespace fnmnet::fnm
