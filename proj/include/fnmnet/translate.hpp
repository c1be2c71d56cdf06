#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fnmnet/fnm.hpp"
#include "fnmnet/netsem.hpp"
#include "fnmnet/petri.hpp"

namespace fnmnet::translate {

struct TranslateOptions {
    // Drop dead 0 summands and bound names that never occur. The cleaned term
    // compiles to the same net up to isomorphism but reads like a hand-written
    // model instead of a case table.
    bool clean = false;
};

struct TranslationResult {
    fnm::TermPtr term;        // restriction over the bound names, then the marked constants
    fnm::ConstEnv env;        // one constant per place, in place order
    std::vector<std::string> bound_names;  // sorted synchronization names
    std::vector<std::string> constants;    // constants[i] is the constant for place i
};

// Rebuilds a process term whose compiled net is the given one: each place
// becomes a constant whose summands spell out, per transition, whether the
// place is uninvolved, fires alone, contributes one servant output, or leads
// the multi-party synchronization with an atomic input sequence.
// Requires every transition label to be a plain input name or tau.
TranslationResult to_fnm(const Net& n, const Marking& m0, const TranslateOptions& opts = {});

// Reparsable source form: one definition line per constant, then main.
std::string to_source(const TranslationResult& t);

struct RoundtripResult {
    bool iso = false;
    // Source place name paired with the matching compiled place name.
    std::vector<std::pair<std::string, std::string>> bijection;
    std::string mismatch;  // empty on success
};

// Translates, recompiles, and searches for a rooted isomorphism between the
// source net and the compiled net. Requires (n, m0) statically reduced on top
// of the to_fnm preconditions.
RoundtripResult roundtrip_check(const Net& n, const Marking& m0,
                                const netsem::NetOfOptions& compile_opts = {});

// {"iso": bool, "bijection": [[source, compiled], ...], "mismatch": ...}
std::string roundtrip_to_json(const RoundtripResult& r);

}  // namespace fnmnet::translate
