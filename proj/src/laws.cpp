#include "fnmnet/laws.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "fnmnet/errors.hpp"
#include "fnmnet/petri.hpp"

namespace fnmnet::laws {

namespace {

using fnm::Action;
using fnm::Category;
using fnm::TermPtr;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& id, const std::string& msg) {
    throw input_error(id + ": " + msg);
}

const char* category_word(Category c) {
    switch (c) {
        case Category::Guarded: return "guarded";
        case Category::Sequential: return "sequential";
        case Category::RestrictionFree: return "restriction-free";
        case Category::General: return "a process";
    }
    return "a process";
}

TermPtr want_term(const std::string& id, const Binding& b, const std::string& key, Category cat) {
    auto it = b.term.find(key);
    if (it == b.term.end() || !it->second) fail(id, "missing metavariable " + key);
    if (!fnm::in_category(it->second, cat))
        fail(id, key + " must be " + std::string(category_word(cat)) + ", got " +
                     fnm::print(it->second));
    return it->second;
}

TermPtr opt_term(const std::string& id, const Binding& b, const std::string& key, Category cat) {
    auto it = b.term.find(key);
    if (it == b.term.end() || !it->second) return nullptr;
    if (!fnm::in_category(it->second, cat))
        fail(id, key + " must be " + std::string(category_word(cat)) + ", got " +
                     fnm::print(it->second));
    return it->second;
}

std::string want_name(const std::string& id, const Binding& b, const std::string& key) {
    auto it = b.name.find(key);
    if (it == b.name.end() || it->second.empty()) fail(id, "missing name metavariable " + key);
    return it->second;
}

TermPtr fold_sum(const std::vector<TermPtr>& xs) {
    TermPtr t = xs.front();
    for (std::size_t i = 1; i < xs.size(); ++i) t = fnm::sum(t, xs[i]);
    return t;
}

TermPtr fold_par(const std::vector<TermPtr>& xs) {
    TermPtr t = xs.front();
    for (std::size_t i = 1; i < xs.size(); ++i) t = fnm::par(t, xs[i]);
    return t;
}

TermPtr maybe_sum(TermPtr core, TermPtr y) { return y ? fnm::sum(std::move(core), y) : core; }
TermPtr maybe_par(TermPtr core, TermPtr z) { return z ? fnm::par(std::move(core), z) : core; }

TermPtr restrict_all(const std::vector<std::string>& names, TermPtr body) {
    for (auto it = names.rbegin(); it != names.rend(); ++it) body = fnm::restriction(*it, body);
    return body;
}

// The leader's input sequence a_n. ... .a_1.a0.x; seq holds a_1 ... a_n, so
// wrapping in ascending order leaves a_n outermost.
TermPtr input_chain(const std::vector<std::string>& seq, const std::string& a0, TermPtr x) {
    TermPtr t = fnm::prefix(Action::input(a0), std::move(x));
    for (const auto& a : seq) t = fnm::strong_prefix(Action::input(a), t);
    return t;
}

std::string fresh_const(const fnm::ConstEnv& env, int& counter) {
    for (;;) {
        std::string name = "L" + std::to_string(counter++);
        if (!env.has(name)) return name;
    }
}

// Parameters shared by the six synchronization schemata. `zero_restricted`
// selects the family that restricts a0 as well and serves it an output.
struct SyncParts {
    std::vector<std::string> names;  // a0 .. an
    std::vector<std::string> rset;   // the restriction set, sorted, deduplicated
    std::vector<TermPtr> servants;   // continuations x_i, index aligned with names
    TermPtr y, z;                    // optional summand / parallel component
};

SyncParts sync_parts(const std::string& id, const Binding& b, const fnm::ConstEnv& env,
                     bool zero_restricted, int min_n) {
    SyncParts parts;
    if (b.n < min_n) fail(id, "requires n >= " + std::to_string(min_n));
    parts.names.push_back(want_name(id, b, "a0"));
    for (int i = 1; i <= b.n; ++i) parts.names.push_back(want_name(id, b, "a" + std::to_string(i)));
    parts.rset.assign(parts.names.begin() + (zero_restricted ? 0 : 1), parts.names.end());
    std::sort(parts.rset.begin(), parts.rset.end());
    parts.rset.erase(std::unique(parts.rset.begin(), parts.rset.end()), parts.rset.end());
    if (!zero_restricted &&
        std::find(parts.rset.begin(), parts.rset.end(), parts.names[0]) != parts.rset.end())
        fail(id, "a0 must not be restricted, got " + parts.names[0]);
    parts.servants.resize(parts.names.size());
    for (int i = zero_restricted ? 0 : 1; i <= b.n; ++i)
        parts.servants[i] = want_term(id, b, "x" + std::to_string(i), Category::RestrictionFree);
    parts.y = opt_term(id, b, "y", Category::Guarded);
    parts.z = opt_term(id, b, "z", Category::RestrictionFree);
    for (const auto& a : parts.rset) {
        if (parts.y && free_names(parts.y, env).count(a))
            fail(id, "y must not mention the restricted name " + a);
        if (parts.z && free_names(parts.z, env).count(a))
            fail(id, "z must not mention the restricted name " + a);
    }
    return parts;
}

// Validates that perm is a permutation of lo..hi and returns it.
std::vector<int> want_perm(const std::string& id, const Binding& b, int lo, int hi) {
    std::vector<int> p = b.perm;
    if (static_cast<int>(p.size()) != hi - lo + 1)
        fail(id, "perm must list delta(" + std::to_string(lo) + ") .. delta(" + std::to_string(hi) + ")");
    std::vector<int> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    for (int i = lo; i <= hi; ++i)
        if (sorted[i - lo] != i) fail(id, "perm is not a permutation of the index range");
    return p;
}

std::vector<TermPtr> servant_prefixes(const SyncParts& parts, int from) {
    std::vector<TermPtr> out;
    for (std::size_t i = from; i < parts.names.size(); ++i)
        out.push_back(fnm::prefix(Action::output(parts.names[i]), parts.servants[i]));
    return out;
}

// ((leader | servants) | z) under the restriction set.
TermPtr sync_term(const SyncParts& parts, TermPtr leader, const std::vector<TermPtr>& servants) {
    TermPtr body = fnm::par(maybe_sum(std::move(leader), parts.y), fold_par(servants));
    return restrict_all(parts.rset, maybe_par(std::move(body), parts.z));
}

void require_well_formed(const std::string& id, const TermPtr& side, const fnm::ConstEnv& env) {
    if (!well_formed(side, env))
        fail(id, "instance is not well-formed under strong prefixing: " + fnm::print(side));
    if (!free_vars(side, env).empty())
        fail(id, "instance must be closed: " + fnm::print(side));
}

}  // namespace

const std::vector<LawSchema>& schemata() {
    static const std::vector<LawSchema> table = {
        {"A1", "x, y, z guarded", "", "x + (y + z) = (x + y) + z"},
        {"A2", "x, y guarded", "", "x + y = y + x"},
        {"A3", "x guarded", "x != 0", "x + 0 = x"},
        {"A4", "x guarded", "x != 0", "x + x = x"},
        {"S1", "a a name; x, y guarded", "", "<a>.(x + y) = <a>.x + <a>.y"},
        {"S2", "a a name; x restriction-free", "", "<a>.tau.x = a.x"},
        {"S3", "a a name; x guarded", "x = 0 or x = 0 + 0", "<a>.x = 0 + 0"},
        {"C1", "C a constant with body p", "", "C = p + 0"},
        {"C2", "p open guarded in x; q sequential",
         "q = p{q/x} (checked as an sp-equality)", "A = q  where A := p{A/x}"},
        {"P1", "x, y, z restriction-free", "", "x | (y | z) = (x | y) | z"},
        {"P2", "x, y restriction-free", "", "x | y = y | x"},
        {"P3", "x restriction-free", "", "x | 0 = x"},
        {"R1", "a a name; x a process", "a not free in x", "(nu a) x = x"},
        {"R2", "a, b names; x a process", "a != b", "(nu a) (nu b) x = (nu b) (nu a) x"},
        {"R3", "a, b names; x a process", "b neither free nor bound in x",
         "(nu a) x = (nu b) x{b/a}"},
        {"Pr1", "a0..an names; x, x1..xn, z restriction-free; y guarded; delta a permutation of 1..n",
         "a1..an restricted, a0 not; y, z avoid a1..an",
         "(nu A)(((<an>...<a1>.a0.x + y) | ~a1.x1 | ... | ~an.xn) | z) = the same with the input "
         "sequence permuted by delta"},
        {"Pr2", "a0..an names; x, x0..xn, z restriction-free; y guarded; delta a permutation of 0..n",
         "a0..an restricted; y, z avoid a0..an",
         "(nu A)(((<an>...<a1>.a0.x + y) | ~a0.x0 | ... | ~an.xn) | z) = the same with the whole "
         "sequence, final plain action included, permuted by delta"},
        {"Ps1", "a0..an names; x, x', x1..xn, x'1..x'n, z restriction-free; y guarded",
         "a1..an restricted, a0 not; y, z avoid a1..an; x | x1 | ... | xn = x' | x'1 | ... | x'n "
         "(checked as an sp-equality)",
         "(nu A)(((<an>...<a1>.a0.x + y) | ~a1.x1 | ... | ~an.xn) | z) = "
         "(nu A)(((<an>...<a1>.a0.x' + y) | ~a1.x'1 | ... | ~an.x'n) | z)"},
        {"Ps2", "a0..an names; x, x', x0..xn, x'0..x'n, z restriction-free; y guarded",
         "a0..an restricted; y, z avoid a0..an; x | x0 | ... | xn = x' | x'0 | ... | x'n "
         "(checked as an sp-equality)",
         "(nu A)(((<an>...<a1>.a0.x + y) | ~a0.x0 | ... | ~an.xn) | z) = "
         "(nu A)(((<an>...<a1>.a0.x' + y) | ~a0.x'0 | ... | ~an.x'n) | z)"},
        {"Ps3", "a0..an names; y1..yk, x1..xn, w, w1..wn, z restriction-free; y guarded",
         "a1..an restricted, a0 not; y, z avoid a1..an; x1 | ... | xn = w | w1 | ... | wn "
         "(checked as an sp-equality)",
         "(nu A)(((SUM_j <an>...<a1>.a0.yj + y) | ~a1.x1 | ... | ~an.xn) | z) = "
         "(nu A)(((SUM_j <an>...<a1>.a0.(yj | w) + y) | ~a1.w1 | ... | ~an.wn) | z)"},
        {"Ps4", "a0..an names; y1..yk, x0..xn, w, w0..wn, z restriction-free; y guarded",
         "a0..an restricted; y, z avoid a0..an; x0 | ... | xn = w | w0 | ... | wn "
         "(checked as an sp-equality)",
         "(nu A)(((SUM_j <an>...<a1>.a0.yj + y) | ~a0.x0 | ... | ~an.xn) | z) = "
         "(nu A)(((SUM_j <an>...<a1>.a0.(yj | w) + y) | ~a0.w0 | ... | ~an.wn) | z)"},
    };
    return table;
}

const LawSchema& schema(const std::string& id) {
    for (const auto& s : schemata())
        if (s.id == id) return s;
    throw input_error("unknown law schema: " + id);
}

LawInstance instantiate(const std::string& schema_id, const Binding& b, fnm::ConstEnv& env) {
    return instantiate(schema(schema_id), b, env);
}

LawInstance instantiate(const LawSchema& s, const Binding& b, fnm::ConstEnv& env) {
    const std::string& id = s.id;
    LawInstance inst;
    inst.schema = id;
    int law_const_counter = 1;

    if (id == "A1") {
        TermPtr x = want_term(id, b, "x", Category::Guarded);
        TermPtr y = want_term(id, b, "y", Category::Guarded);
        TermPtr z = want_term(id, b, "z", Category::Guarded);
        inst.left = fnm::sum(x, fnm::sum(y, z));
        inst.right = fnm::sum(fnm::sum(x, y), z);
    } else if (id == "A2") {
        TermPtr x = want_term(id, b, "x", Category::Guarded);
        TermPtr y = want_term(id, b, "y", Category::Guarded);
        inst.left = fnm::sum(x, y);
        inst.right = fnm::sum(y, x);
    } else if (id == "A3" || id == "A4") {
        TermPtr x = want_term(id, b, "x", Category::Guarded);
        if (x->kind == fnm::TermKind::Nil) fail(id, "x must differ from 0");
        inst.left = id == "A3" ? fnm::sum(x, fnm::nil()) : fnm::sum(x, x);
        inst.right = x;
    } else if (id == "S1") {
        std::string a = want_name(id, b, "a");
        TermPtr x = want_term(id, b, "x", Category::Guarded);
        TermPtr y = want_term(id, b, "y", Category::Guarded);
        inst.left = fnm::strong_prefix(Action::input(a), fnm::sum(x, y));
        inst.right = fnm::sum(fnm::strong_prefix(Action::input(a), x),
                              fnm::strong_prefix(Action::input(a), y));
    } else if (id == "S2") {
        std::string a = want_name(id, b, "a");
        TermPtr x = want_term(id, b, "x", Category::RestrictionFree);
        inst.left = fnm::strong_prefix(Action::input(a), fnm::prefix(Action::tau(), x));
        inst.right = fnm::prefix(Action::input(a), x);
    } else if (id == "S3") {
        std::string a = want_name(id, b, "a");
        TermPtr x = want_term(id, b, "x", Category::Guarded);
        bool stuck = x->kind == fnm::TermKind::Nil ||
                     (x->kind == fnm::TermKind::Sum && x->left->kind == fnm::TermKind::Nil &&
                      x->right->kind == fnm::TermKind::Nil);
        if (!stuck) fail(id, "x must be 0 or 0 + 0, got " + fnm::print(x));
        inst.left = fnm::strong_prefix(Action::input(a), x);
        inst.right = fnm::sum(fnm::nil(), fnm::nil());
    } else if (id == "C1") {
        std::string cname;
        TermPtr body;
        if (b.name.count("C")) {
            cname = b.name.at("C");
            if (!env.has(cname)) fail(id, "constant " + cname + " is not defined");
            body = env.body(cname);
        } else {
            body = want_term(id, b, "p", Category::Guarded);
            cname = fresh_const(env, law_const_counter);
            env.define(cname, body);
        }
        inst.left = fnm::constant(cname);
        inst.right = fnm::sum(body, fnm::nil());
    } else if (id == "C2") {
        TermPtr p = want_term(id, b, "p", Category::Guarded);
        std::string var = b.name.count("x") ? b.name.at("x") : "x";
        for (const auto& v : free_vars(p, env))
            if (v != var) fail(id, "p may only mention the variable " + var + ", found " + v);
        std::string aname = fresh_const(env, law_const_counter);
        env.define(aname, env.substitute_var(p, var, fnm::constant(aname)));
        TermPtr q;
        if (b.term.count("q")) {
            q = want_term(id, b, "q", Category::Sequential);
        } else {
            // Default folding partner: the two-step unfolding B := p{p{B/x}/x}.
            std::string bname = fresh_const(env, law_const_counter);
            TermPtr once = env.substitute_var(p, var, fnm::constant(bname));
            env.define(bname, env.substitute_var(p, var, once));
            q = fnm::constant(bname);
        }
        inst.obligations.emplace_back(q, env.substitute_var(p, var, q));
        inst.left = fnm::constant(aname);
        inst.right = q;
    } else if (id == "P1") {
        TermPtr x = want_term(id, b, "x", Category::RestrictionFree);
        TermPtr y = want_term(id, b, "y", Category::RestrictionFree);
        TermPtr z = want_term(id, b, "z", Category::RestrictionFree);
        inst.left = fnm::par(x, fnm::par(y, z));
        inst.right = fnm::par(fnm::par(x, y), z);
    } else if (id == "P2") {
        TermPtr x = want_term(id, b, "x", Category::RestrictionFree);
        TermPtr y = want_term(id, b, "y", Category::RestrictionFree);
        inst.left = fnm::par(x, y);
        inst.right = fnm::par(y, x);
    } else if (id == "P3") {
        TermPtr x = want_term(id, b, "x", Category::RestrictionFree);
        inst.left = fnm::par(x, fnm::nil());
        inst.right = x;
    } else if (id == "R1") {
        std::string a = want_name(id, b, "a");
        TermPtr x = want_term(id, b, "x", Category::General);
        if (free_names(x, env).count(a)) fail(id, "a must not be free in x, got " + a);
        inst.left = fnm::restriction(a, x);
        inst.right = x;
    } else if (id == "R2") {
        std::string a = want_name(id, b, "a");
        std::string nb = want_name(id, b, "b");
        if (a == nb) fail(id, "a and b must differ");
        TermPtr x = want_term(id, b, "x", Category::General);
        inst.left = fnm::restriction(a, fnm::restriction(nb, x));
        inst.right = fnm::restriction(nb, fnm::restriction(a, x));
    } else if (id == "R3") {
        std::string a = want_name(id, b, "a");
        std::string nb = want_name(id, b, "b");
        TermPtr x = want_term(id, b, "x", Category::General);
        if (free_names(x, env).count(nb)) fail(id, "b must not be free in x, got " + nb);
        if (bound_names(x).count(nb)) fail(id, "b must not be bound in x, got " + nb);
        inst.left = fnm::restriction(a, x);
        inst.right = fnm::restriction(nb, env.substitute_action(x, a, nb, false));
    } else if (id == "Pr1" || id == "Pr2") {
        bool zero_in = id == "Pr2";
        SyncParts parts = sync_parts(id, b, env, zero_in, 1);
        TermPtr x = want_term(id, b, "x", Category::RestrictionFree);
        std::vector<int> perm = want_perm(id, b, zero_in ? 0 : 1, b.n);
        std::vector<std::string> lhs_seq(parts.names.begin() + 1, parts.names.end());
        std::vector<std::string> rhs_seq;
        std::string rhs_zero = parts.names[0];
        if (zero_in) {
            rhs_zero = parts.names[perm[0]];
            for (int j = 1; j <= b.n; ++j) rhs_seq.push_back(parts.names[perm[j]]);
        } else {
            for (int j = 1; j <= b.n; ++j) rhs_seq.push_back(parts.names[perm[j - 1]]);
        }
        std::vector<TermPtr> servants = servant_prefixes(parts, zero_in ? 0 : 1);
        inst.left = sync_term(parts, input_chain(lhs_seq, parts.names[0], x), servants);
        inst.right = sync_term(parts, input_chain(rhs_seq, rhs_zero, x), servants);
    } else if (id == "Ps1" || id == "Ps2") {
        bool zero_in = id == "Ps2";
        SyncParts parts = sync_parts(id, b, env, zero_in, zero_in ? 0 : 1);
        TermPtr x = want_term(id, b, "x", Category::RestrictionFree);
        SyncParts primed = parts;
        TermPtr xp = want_term(id, b, "x'", Category::RestrictionFree);
        for (int i = zero_in ? 0 : 1; i <= b.n; ++i)
            primed.servants[i] = want_term(id, b, "x'" + std::to_string(i), Category::RestrictionFree);
        std::vector<std::string> seq(parts.names.begin() + 1, parts.names.end());
        int from = zero_in ? 0 : 1;
        std::vector<TermPtr> lhs_prod = {x}, rhs_prod = {xp};
        for (std::size_t i = from; i < parts.servants.size(); ++i) {
            lhs_prod.push_back(parts.servants[i]);
            rhs_prod.push_back(primed.servants[i]);
        }
        inst.obligations.emplace_back(fold_par(lhs_prod), fold_par(rhs_prod));
        inst.left = sync_term(parts, input_chain(seq, parts.names[0], x), servant_prefixes(parts, from));
        inst.right =
            sync_term(parts, input_chain(seq, parts.names[0], xp), servant_prefixes(primed, from));
    } else if (id == "Ps3" || id == "Ps4") {
        bool zero_in = id == "Ps4";
        SyncParts parts = sync_parts(id, b, env, zero_in, zero_in ? 0 : 1);
        if (b.k < 1) fail(id, "requires k >= 1 leader summands");
        TermPtr w = want_term(id, b, "w", Category::RestrictionFree);
        SyncParts moved = parts;
        for (int i = zero_in ? 0 : 1; i <= b.n; ++i)
            moved.servants[i] = want_term(id, b, "w" + std::to_string(i), Category::RestrictionFree);
        int from = zero_in ? 0 : 1;
        std::vector<TermPtr> lhs_prod, rhs_prod = {w};
        for (std::size_t i = from; i < parts.servants.size(); ++i) {
            lhs_prod.push_back(parts.servants[i]);
            rhs_prod.push_back(moved.servants[i]);
        }
        inst.obligations.emplace_back(fold_par(lhs_prod), fold_par(rhs_prod));
        std::vector<std::string> seq(parts.names.begin() + 1, parts.names.end());
        std::vector<TermPtr> lhs_sum, rhs_sum;
        for (int j = 1; j <= b.k; ++j) {
            TermPtr yj = want_term(id, b, "y" + std::to_string(j), Category::RestrictionFree);
            lhs_sum.push_back(input_chain(seq, parts.names[0], yj));
            rhs_sum.push_back(input_chain(seq, parts.names[0], fnm::par(yj, w)));
        }
        inst.left = sync_term(parts, fold_sum(lhs_sum), servant_prefixes(parts, from));
        inst.right = sync_term(parts, fold_sum(rhs_sum), servant_prefixes(moved, from));
    } else {
        throw input_error("unknown law schema: " + id);
    }

    require_well_formed(id, inst.left, env);
    require_well_formed(id, inst.right, env);
    inst.env = env;
    return inst;
}

namespace {

// Decides p ~sp q over the disjoint union of the compiled nets. Isomorphic
// nets short-circuit: a rooted isomorphism induces an sp-bisimulation.
bool sp_equal(const TermPtr& l, const TermPtr& r, fnm::ConstEnv& env, const LawCaps& caps) {
    auto nl = netsem::net_of(l, env, caps.compile);
    auto nr = netsem::net_of(r, env, caps.compile);
    if (equiv::rooted_iso(nl.net, nr.net).isomorphic) return true;
    UnionNet u = disjoint_union(nl.net, nr.net);
    return equiv::sp_bisim(u.net, u.initial1, u.initial2, caps.equiv).equivalent;
}

}  // namespace

InstanceResult verify_instance(const LawInstance& inst, const LawCaps& caps) {
    fnm::ConstEnv env = inst.env;
    try {
        for (const auto& [l, r] : inst.obligations) {
            if (!sp_equal(l, r, env, caps))
                return {Verdict::Counterexample,
                        "side condition failed: " + fnm::print(l) + "  vs  " + fnm::print(r)};
        }
        if (sp_equal(inst.left, inst.right, env, caps)) return {Verdict::Sound, ""};
        return {Verdict::Counterexample, fnm::print(inst.left) + "  vs  " + fnm::print(inst.right)};
    } catch (const resource_error& e) {
        return {Verdict::ResourceLimit, e.what()};
    }
}

int TermGen::pick(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
}

std::string TermGen::action_name() {
    static const char* names[] = {"a", "b", "c"};
    return names[pick(0, 2)];
}

fnm::Action TermGen::visible_action(bool allow_output) {
    int r = pick(0, allow_output ? 6 : 4);
    if (r == 0) return Action::tau();
    if (r <= 4 && !allow_output) return Action::input(action_name());
    return r <= 3 ? Action::input(action_name()) : Action::output(action_name());
}

fnm::TermPtr TermGen::make_constant() {
    // Only this generator's own constants; skip derived names like "K4{e/a}"
    // that law instantiation may have added to the environment.
    std::vector<std::string> prior;
    for (const auto& name : env_->names())
        if (name.size() > 1 && name[0] == 'K' &&
            name.find_first_not_of("0123456789", 1) == std::string::npos)
            prior.push_back(name);
    std::string name;
    for (;;) {
        name = "K" + std::to_string(next_const_++);
        if (!env_->has(name)) break;
    }
    // Tail-recursive sequential bodies keep every constant a finite automaton.
    auto tail = [&]() -> TermPtr {
        int r = pick(0, 9);
        if (r < 4) return fnm::nil();
        if (r < 7) return fnm::constant(name);
        if (!prior.empty()) return fnm::constant(prior[pick(0, static_cast<int>(prior.size()) - 1)]);
        return fnm::nil();
    };
    auto chain = [&]() {
        TermPtr t = tail();
        for (int hops = pick(1, 2); hops > 0; --hops) t = fnm::prefix(visible_action(true), t);
        return t;
    };
    TermPtr body = chain();
    if (pick(0, 1)) body = fnm::sum(body, chain());
    env_->define(name, body);
    return fnm::constant(name);
}

fnm::TermPtr TermGen::guarded(int size) {
    if (size <= 0) return fnm::nil();
    switch (pick(0, 4)) {
        case 0:
        case 1:
            return fnm::prefix(visible_action(true), restriction_free(size - 1));
        case 2: {
            TermPtr t = pick(0, 1) ? fnm::nil()
                                   : fnm::prefix(visible_action(false), restriction_free(size - 1));
            for (int hops = pick(1, 2); hops > 0; --hops)
                t = fnm::strong_prefix(Action::input(action_name()), t);
            return t;
        }
        default:
            return fnm::sum(guarded(size / 2), guarded((size + 1) / 2));
    }
}

fnm::TermPtr TermGen::wf_guarded(int size) {
    if (size <= 0) return fnm::nil();
    switch (pick(0, 4)) {
        case 0:
        case 1:
            return fnm::prefix(visible_action(false), restriction_free(size - 1));
        case 2: {
            TermPtr t = pick(0, 1) ? fnm::nil()
                                   : fnm::prefix(visible_action(false), restriction_free(size - 1));
            for (int hops = pick(1, 2); hops > 0; --hops)
                t = fnm::strong_prefix(Action::input(action_name()), t);
            return t;
        }
        default:
            return fnm::sum(wf_guarded(size / 2), wf_guarded((size + 1) / 2));
    }
}

fnm::TermPtr TermGen::sequential(int size) {
    if (size <= 0) return fnm::nil();
    if (pick(0, 3) == 0) return make_constant();
    return guarded(size);
}

fnm::TermPtr TermGen::restriction_free(int size) {
    if (size <= 0) return fnm::nil();
    if (pick(0, 4) < 2 && size >= 2)
        return fnm::par(sequential(size / 2), restriction_free((size + 1) / 2));
    return sequential(size);
}

fnm::TermPtr TermGen::general(int size) {
    if (size <= 0) return fnm::nil();
    if (pick(0, 9) < 3) return fnm::restriction(action_name(), general(size - 1));
    return restriction_free(size);
}

fnm::TermPtr TermGen::of_category(Category c, int size) {
    switch (c) {
        case Category::Guarded: return guarded(size);
        case Category::Sequential: return sequential(size);
        case Category::RestrictionFree: return restriction_free(size);
        case Category::General: return general(size);
    }
    throw input_error("unknown category");
}

fnm::TermPtr TermGen::open_guarded(int size, const std::string& var) {
    int summands = pick(1, 2);
    std::vector<TermPtr> parts;
    bool mentions = false;
    for (int i = 0; i < summands; ++i) {
        TermPtr tail;
        int r = pick(0, 9);
        if (r < 6 || (i + 1 == summands && !mentions)) {
            tail = fnm::variable(var);
            mentions = true;
        } else if (r < 8) {
            tail = fnm::nil();
        } else {
            tail = restriction_free(1);
        }
        for (int hops = pick(1, std::max(1, size)); hops > 0; --hops)
            tail = fnm::prefix(visible_action(true), tail);
        parts.push_back(tail);
    }
    return fold_sum(parts);
}

fnm::TermPtr TermGen::sound_variant(const fnm::TermPtr& p) {
    TermPtr v = p;
    switch (p->kind) {
        case fnm::TermKind::Nil:
        case fnm::TermKind::Const:
        case fnm::TermKind::Var:
            break;
        case fnm::TermKind::Prefix:
            v = fnm::prefix(p->act, sound_variant(p->left));
            break;
        case fnm::TermKind::StrongPrefix:
            v = fnm::strong_prefix(p->act, sound_variant(p->left));
            break;
        case fnm::TermKind::Sum: {
            TermPtr l = sound_variant(p->left), r = sound_variant(p->right);
            v = pick(0, 1) ? fnm::sum(r, l) : fnm::sum(l, r);
            break;
        }
        case fnm::TermKind::Par: {
            TermPtr l = sound_variant(p->left), r = sound_variant(p->right);
            v = pick(0, 1) ? fnm::par(r, l) : fnm::par(l, r);
            break;
        }
        case fnm::TermKind::Restrict:
            v = fnm::restriction(p->name, sound_variant(p->left));
            break;
    }
    // The "+ 0" wrap needs a non-nil guarded operand to stay sound.
    if (v->kind != fnm::TermKind::Nil && fnm::in_category(v, fnm::Category::Guarded) &&
        pick(0, 9) == 0)
        v = fnm::sum(v, fnm::nil());
    return v;
}

Binding TermGen::binding_for(const std::string& schema_id) {
    Binding b;
    static const char* sync_pool[] = {"e", "f", "g"};
    auto sync_name = [&]() { return std::string(sync_pool[pick(0, 2)]); };
    if (schema_id == "A1") {
        b.term["x"] = guarded(pick(0, 2));
        b.term["y"] = guarded(pick(0, 2));
        b.term["z"] = guarded(pick(0, 2));
    } else if (schema_id == "A2") {
        b.term["x"] = guarded(pick(0, 2));
        b.term["y"] = guarded(pick(0, 2));
    } else if (schema_id == "A3" || schema_id == "A4") {
        b.term["x"] = guarded(pick(1, 2));
    } else if (schema_id == "S1") {
        b.name["a"] = action_name();
        b.term["x"] = wf_guarded(pick(0, 2));
        b.term["y"] = wf_guarded(pick(0, 2));
    } else if (schema_id == "S2") {
        b.name["a"] = action_name();
        b.term["x"] = restriction_free(pick(0, 2));
    } else if (schema_id == "S3") {
        b.name["a"] = action_name();
        b.term["x"] = pick(0, 1) ? fnm::nil() : fnm::sum(fnm::nil(), fnm::nil());
    } else if (schema_id == "C1") {
        b.term["p"] = guarded(pick(0, 2));
    } else if (schema_id == "C2") {
        b.term["p"] = open_guarded(pick(1, 2), "x");
        b.name["x"] = "x";
    } else if (schema_id == "P1") {
        b.term["x"] = restriction_free(pick(0, 2));
        b.term["y"] = restriction_free(pick(0, 2));
        b.term["z"] = restriction_free(pick(0, 2));
    } else if (schema_id == "P2") {
        b.term["x"] = restriction_free(pick(0, 2));
        b.term["y"] = restriction_free(pick(0, 2));
    } else if (schema_id == "P3") {
        b.term["x"] = restriction_free(pick(0, 2));
    } else if (schema_id == "R1") {
        b.term["x"] = general(pick(0, 2));
        b.name["a"] = "d";
    } else if (schema_id == "R2") {
        b.term["x"] = general(pick(0, 2));
        b.name["a"] = pick(0, 1) ? "a" : "d";
        b.name["b"] = "b";
    } else if (schema_id == "R3") {
        TermPtr x = general(pick(1, 2));
        b.term["x"] = x;
        auto fn = free_names(x, *env_);
        b.name["a"] = fn.empty() ? "a" : *fn.begin();
        b.name["b"] = "e";
    } else if (schema_id == "Pr1" || schema_id == "Pr2") {
        bool zero_in = schema_id == "Pr2";
        b.n = pick(1, 3);
        b.name["a0"] = zero_in ? sync_name() : "d";
        for (int i = 1; i <= b.n; ++i) b.name["a" + std::to_string(i)] = sync_name();
        int lo = zero_in ? 0 : 1;
        for (int i = lo; i <= b.n; ++i) b.perm.push_back(i);
        std::shuffle(b.perm.begin(), b.perm.end(), rng_);
        b.term["x"] = restriction_free(pick(0, 2));
        for (int i = lo; i <= b.n; ++i)
            b.term["x" + std::to_string(i)] = restriction_free(pick(0, 1));
        if (pick(0, 9) < 7) b.term["y"] = guarded(pick(0, 1));
        if (pick(0, 9) < 7) b.term["z"] = restriction_free(pick(0, 1));
    } else if (schema_id == "Ps1" || schema_id == "Ps2") {
        bool zero_in = schema_id == "Ps2";
        b.n = zero_in ? pick(0, 2) : pick(1, 3);
        b.name["a0"] = zero_in ? sync_name() : "d";
        for (int i = 1; i <= b.n; ++i) b.name["a" + std::to_string(i)] = sync_name();
        int lo = zero_in ? 0 : 1;
        // The primed side is a rotation of the unprimed parallel components,
        // so the semantic side condition holds by commutativity.
        std::vector<TermPtr> pool = {restriction_free(pick(0, 1))};
        for (int i = lo; i <= b.n; ++i) pool.push_back(restriction_free(pick(0, 1)));
        int rot = pick(0, static_cast<int>(pool.size()) - 1);
        b.term["x"] = pool[0];
        b.term["x'"] = pool[rot];
        for (int i = lo, j = 1; i <= b.n; ++i, ++j) {
            b.term["x" + std::to_string(i)] = pool[j];
            b.term["x'" + std::to_string(i)] = pool[(rot + j) % pool.size()];
        }
        if (pick(0, 9) < 7) b.term["y"] = guarded(pick(0, 1));
        if (pick(0, 9) < 7) b.term["z"] = restriction_free(pick(0, 1));
    } else if (schema_id == "Ps3" || schema_id == "Ps4") {
        bool zero_in = schema_id == "Ps4";
        b.n = zero_in ? pick(0, 2) : pick(1, 2);
        b.k = pick(1, 2);
        b.name["a0"] = zero_in ? sync_name() : "d";
        for (int i = 1; i <= b.n; ++i) b.name["a" + std::to_string(i)] = sync_name();
        int lo = zero_in ? 0 : 1;
        TermPtr w = restriction_free(pick(0, 1));
        b.term["w"] = w;
        // x at the first index absorbs w, so the products stay equivalent.
        bool first = true;
        for (int i = lo; i <= b.n; ++i) {
            TermPtr wi = restriction_free(pick(0, 1));
            b.term["w" + std::to_string(i)] = wi;
            b.term["x" + std::to_string(i)] =
                first ? (pick(0, 1) ? fnm::par(w, wi) : fnm::par(wi, w)) : wi;
            first = false;
        }
        for (int j = 1; j <= b.k; ++j) b.term["y" + std::to_string(j)] = restriction_free(pick(0, 1));
        if (pick(0, 9) < 7) b.term["y"] = guarded(pick(0, 1));
        if (pick(0, 9) < 7) b.term["z"] = restriction_free(pick(0, 1));
    } else {
        throw input_error("unknown law schema: " + schema_id);
    }
    return b;
}

std::vector<fnm::TermPtr> gen_terms(std::uint64_t seed, int count, int size_bound,
                                    fnm::Category category, fnm::ConstEnv& env) {
    TermGen gen(seed, env);
    std::vector<fnm::TermPtr> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 0; i < count; ++i) out.push_back(gen.of_category(category, size_bound));
    return out;
}

int LawReport::total_instances() const {
    return std::accumulate(schemata.begin(), schemata.end(), 0,
                           [](int acc, const SchemaReport& s) { return acc + s.instances; });
}

int LawReport::total_counterexamples() const {
    return std::accumulate(schemata.begin(), schemata.end(), 0, [](int acc, const SchemaReport& s) {
        return acc + static_cast<int>(s.counterexamples.size());
    });
}

int LawReport::total_resource_limited() const {
    return std::accumulate(schemata.begin(), schemata.end(), 0,
                           [](int acc, const SchemaReport& s) { return acc + s.resource_limited; });
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

LawReport check_laws(std::uint64_t seed, int per_schema, const LawCaps& caps,
                     const std::vector<std::string>& only) {
    for (const auto& id : only) schema(id);  // reject unknown ids up front
    LawReport rep;
    rep.seed = seed;
    rep.per_schema = per_schema;
    for (const auto& s : schemata()) {
        if (!only.empty() && std::find(only.begin(), only.end(), s.id) == only.end()) continue;
        SchemaReport sr;
        sr.schema = s.id;
        TermGen gen(seed ^ fnv1a(s.id));
        for (int i = 0; i < per_schema; ++i) {
            LawInstance inst = instantiate(s, gen.binding_for(s.id), gen.env());
            InstanceResult res = verify_instance(inst, caps);
            ++sr.instances;
            switch (res.verdict) {
                case Verdict::Sound: ++sr.sound; break;
                case Verdict::ResourceLimit: ++sr.resource_limited; break;
                case Verdict::Counterexample: sr.counterexamples.push_back(res.detail); break;
            }
        }
        rep.schemata.push_back(std::move(sr));
    }
    return rep;
}

std::string report_to_json(const LawReport& r) {
    ordered_json out;
    out["seed"] = r.seed;
    out["per_schema"] = r.per_schema;
    out["schemata"] = ordered_json::array();
    for (const auto& s : r.schemata) {
        ordered_json row;
        row["id"] = s.schema;
        row["instances"] = s.instances;
        row["sound"] = s.sound;
        row["resource_limited"] = s.resource_limited;
        row["counterexamples"] = s.counterexamples;
        out["schemata"].push_back(std::move(row));
    }
    out["totals"] = {{"instances", r.total_instances()},
                     {"counterexamples", r.total_counterexamples()},
                     {"resource_limited", r.total_resource_limited()}};
    return out.dump(2);
}

std::string report_summary(const LawReport& r) {
    std::ostringstream out;
    out << "schema  instances  sound  resource-limited  counterexamples\n";
    auto row = [&](const std::string& id, int inst, int sound, int limited, int cex) {
        out << id;
        for (std::size_t pad = id.size(); pad < 8; ++pad) out << ' ';
        std::string cols[] = {std::to_string(inst), std::to_string(sound), std::to_string(limited)};
        std::size_t widths[] = {11, 7, 18};
        for (int i = 0; i < 3; ++i) {
            out << cols[i];
            for (std::size_t pad = cols[i].size(); pad < widths[i]; ++pad) out << ' ';
        }
        out << cex << "\n";
    };
    for (const auto& s : r.schemata)
        row(s.schema, s.instances, s.sound, s.resource_limited,
            static_cast<int>(s.counterexamples.size()));
    row("total", r.total_instances(),
        r.total_instances() - r.total_counterexamples() - r.total_resource_limited(),
        r.total_resource_limited(), r.total_counterexamples());
    return out.str();
}

const CongruenceCase& CongruenceReport::at(const std::string& context) const {
    for (const auto& c : cases)
        if (c.context == context) return c;
    throw input_error("unknown congruence context: " + context);
}

CongruenceReport check_congruence(std::uint64_t seed, int rounds, const LawCaps& caps) {
    CongruenceReport rep;
    rep.seed = seed;
    rep.rounds = rounds;
    for (const char* name :
         {"strong_prefix", "sum", "prefix", "parallel", "restriction", "recursion"})
        rep.cases.push_back({name, 0, 0, 0});
    auto& by_name = rep.cases;
    auto ctx = [&](const std::string& name) -> CongruenceCase& {
        for (auto& c : by_name)
            if (c.context == name) return c;
        throw input_error("unknown congruence context: " + name);
    };

    TermGen gen(seed);
    fnm::ConstEnv& env = gen.env();
    int law_counter = 1;

    auto check_context = [&](const std::string& name, const TermPtr& l, const TermPtr& r) {
        CongruenceCase& c = ctx(name);
        ++c.applicable;
        try {
            if (sp_equal(l, r, env, caps)) {
                ++c.preserved;
            } else {
                rep.violations.push_back(name + ": " + fnm::print(l) + "  vs  " + fnm::print(r));
            }
        } catch (const resource_error&) {
            ++c.resource_limited;
        }
    };

    for (int round = 0; round < rounds; ++round) {
        TermPtr p = gen.guarded(gen.pick(1, 3));
        TermPtr q;
        int mode = round % 5;
        if (mode == 0) q = p;
        else if (mode == 4) q = gen.guarded(gen.pick(1, 3));  // usually inequivalent
        else q = gen.sound_variant(p);

        bool base;
        try {
            base = sp_equal(p, q, env, caps);
        } catch (const resource_error&) {
            ++rep.resource_limited_pairs;
            continue;
        }
        if (!base) {
            ++rep.inequivalent_pairs;  // hypothesis vacuous, contexts not applicable
            continue;
        }
        ++rep.equivalent_pairs;

        std::string a = gen.action_name();
        TermPtr spl = fnm::strong_prefix(Action::input(a), p);
        TermPtr spr = fnm::strong_prefix(Action::input(a), q);
        if (well_formed(spl, env) && well_formed(spr, env)) check_context("strong_prefix", spl, spr);
        TermPtr r0 = gen.guarded(gen.pick(0, 2));
        check_context("sum", fnm::sum(p, r0), fnm::sum(q, r0));
        Action mu = gen.visible_action(true);
        check_context("prefix", fnm::prefix(mu, p), fnm::prefix(mu, q));
        TermPtr r1 = gen.restriction_free(gen.pick(0, 2));
        check_context("parallel", fnm::par(p, r1), fnm::par(q, r1));
        std::string nm = gen.action_name();
        check_context("restriction", fnm::restriction(nm, p), fnm::restriction(nm, q));

        if (round % 3 == 0) {
            TermPtr po = gen.open_guarded(gen.pick(1, 2), "x");
            TermPtr qo = round % 2 ? gen.sound_variant(po) : po;
            bool open_equal = true;
            try {
                for (const TermPtr& sample : {fnm::nil(), gen.guarded(1)}) {
                    if (!sp_equal(env.substitute_var(po, "x", sample),
                                  env.substitute_var(qo, "x", sample), env, caps)) {
                        open_equal = false;
                        break;
                    }
                }
            } catch (const resource_error&) {
                ++ctx("recursion").resource_limited;
                continue;
            }
            if (!open_equal) continue;  // hypothesis fails, closure not required
            std::string an = fresh_const(env, law_counter);
            env.define(an, env.substitute_var(po, "x", fnm::constant(an)));
            std::string bn = fresh_const(env, law_counter);
            env.define(bn, env.substitute_var(qo, "x", fnm::constant(bn)));
            check_context("recursion", fnm::constant(an), fnm::constant(bn));
        }
    }
    return rep;
}

std::string congruence_to_json(const CongruenceReport& r) {
    ordered_json out;
    out["seed"] = r.seed;
    out["rounds"] = r.rounds;
    out["equivalent_pairs"] = r.equivalent_pairs;
    out["inequivalent_pairs"] = r.inequivalent_pairs;
    out["resource_limited_pairs"] = r.resource_limited_pairs;
    out["cases"] = ordered_json::array();
    for (const auto& c : r.cases)
        out["cases"].push_back({{"context", c.context},
                                {"applicable", c.applicable},
                                {"preserved", c.preserved},
                                {"resource_limited", c.resource_limited}});
    out["violations"] = r.violations;
    return out.dump(2);
}

}  // namespace fnmnet::laws
