#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "fnmnet/netsem.hpp"

using namespace fnmnet;
using namespace fnmnet::netsem;
using fnm::Action;
using fnm::ConstEnv;
using fnm::TermPtr;

namespace {

template <typename F>
std::string error_of(F f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

Label lab(const std::string& spec) {
    // "a", "~a", "a'", sequences joined with '.'; "tau" for the silent label.
    if (spec == "tau") return Label::tau();
    std::vector<Action> seq;
    std::size_t pos = 0;
    while (pos < spec.size()) {
        std::size_t dot = spec.find('.', pos);
        std::string part = spec.substr(pos, dot == std::string::npos ? dot : dot - pos);
        bool output = !part.empty() && part[0] == '~';
        if (output) part = part.substr(1);
        bool restricted = !part.empty() && part.back() == '\'';
        if (restricted) part.pop_back();
        seq.push_back(output ? Action::output(part, restricted) : Action::input(part, restricted));
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    return Label::sequence(std::move(seq));
}

Multiset<Label> labels(std::initializer_list<std::string> specs) {
    std::vector<std::pair<Label, std::int64_t>> entries;
    for (const auto& s : specs) entries.emplace_back(lab(s), 1);
    return Multiset<Label>::from_entries(std::move(entries));
}

// The semi-counter needing three inc before each dec.
fnm::Program semi_counter() {
    return fnm::parse_program(
        "A := inc.(A | (<c>.<c>.dec.0 + ~c.0));\n"
        "main = (nu c) A;\n");
}

fnm::Program producer_consumer_left() {
    return fnm::parse_program(
        "P1 := prod.(P1 | D1);\n"
        "D1 := ~a.0;\n"
        "C1 := <a>.del.E1;\n"
        "E1 := cons.C1;\n"
        "main = (nu a) (P1 | C1);\n");
}

}  // namespace

TEST_CASE("labels render, validate and extend") {
    CHECK(Label::tau().str() == "tau");
    CHECK(lab("a").str() == "a");
    CHECK(lab("~a").str() == "~a");
    CHECK(lab("a'.dec").str() == "a'.dec");
    CHECK(Label::pre_extend(Action::input("a"), Label::tau()).str() == "a");
    CHECK(Label::pre_extend(Action::input("a"), lab("~b")).str() == "a.~b");
    CHECK(lab("a").restricted_free());
    CHECK(!lab("a'.dec").restricted_free());
    CHECK(contains(error_of([] { Label::sequence({Action::output("a"), Action::input("b")}); }),
                   "final action"));
    CHECK(contains(error_of([] { Label::sequence({Action::tau(), Action::input("b")}); }),
                   "tau"));
}

TEST_CASE("decomposition splits parallel components into tokens") {
    ConstEnv env;
    TermMarking none = dec(fnm::parse_term("0", env), env);
    CHECK(none.marking.empty());

    TermMarking stuck = dec(fnm::parse_term("0 + 0", env), env);
    CHECK(stuck.marking == Multiset<PlaceName>::single("0 + 0", 1));

    TermMarking twins = dec(fnm::parse_term("a.0 | a.0", env), env);
    CHECK(twins.marking == Multiset<PlaceName>::single("a.0", 2));

    fnm::Program prog = semi_counter();
    TermMarking counter = dec(prog.main, prog.env);
    CHECK(counter.marking == Multiset<PlaceName>::single("A{c'/c}", 1));
    CHECK(fnm::print(prog.env.body("A{c'/c}")) ==
          "inc.(A{c'/c} | (<c'>.<c'>.dec.0 + ~c'.0))");
}

TEST_CASE("decomposition distributes over parallel and stays admissible") {
    ConstEnv env;
    const char* sources[] = {"a.0 | (b.0 + c.0)", "(nu a) (a.0 | ~a.0 | b.0)",
                             "tau.0 | 0 | <g>.h.0"};
    for (const char* src : sources) {
        TermPtr p = fnm::parse_term(src, env);
        TermPtr q = fnm::parse_term("~z.0 | z.0", env);
        // Parallel composition only exists for restriction-free operands.
        if (fnm::category_of(p) <= fnm::Category::RestrictionFree) {
            TermMarking both = dec(fnm::par(p, q), env);
            CHECK(both.marking == dec(p, env).marking.plus(dec(q, env).marking));
        }
        TermMarking dm = dec(p, env);
        std::set<std::string> fn;
        for (const auto& [place, _] : dm.marking.entries()) {
            auto names = fnm::free_names(dm.terms.at(place), env);
            fn.insert(names.begin(), names.end());
        }
        for (const auto& n : fn)
            CHECK(!(n.back() == '\'' && fn.count(n.substr(0, n.size() - 1))));
    }
}

TEST_CASE("binary synchronization follows the three rules") {
    CHECK(sync(lab("a"), lab("~a")) == Label::tau());
    CHECK(sync(lab("~a"), lab("a")) == Label::tau());
    CHECK(sync(lab("a'"), lab("~a'")) == Label::tau());
    CHECK(sync(lab("a.b'"), lab("~a")) == lab("b'"));
    CHECK(sync(lab("~a"), lab("a.b'")) == lab("b'"));
    CHECK(sync(lab("a'.dec"), lab("~a'")) == lab("dec"));

    CHECK(!sync(lab("a.b"), lab("c.d")));   // two sequences never fuse
    CHECK(!sync(lab("a"), lab("a")));
    CHECK(!sync(lab("a"), lab("~b")));
    CHECK(!sync(lab("a.b"), lab("~b")));    // only the head can be stripped
    CHECK(!sync(lab("a"), Label::tau()));
    CHECK(!sync(Label::tau(), Label::tau()));
    // The single partner must be an output: an input strips nothing.
    CHECK(!sync(lab("a.b"), lab("a")));
}

TEST_CASE("multiset synchronization reaches every collapse") {
    CHECK(msync(labels({"a"})) == std::set<Label>{lab("a")});
    CHECK(msync(labels({"a", "b"})).empty());
    // A leader sequence absorbing its two partners collapses to tau.
    std::set<Label> triple = msync(labels({"a.b'", "~a", "~b'"}));
    CHECK(triple.count(Label::tau()) == 1);
    // Order of fusion does not matter; a, ~a pair plus a stray b keeps b out.
    CHECK(msync(labels({"a", "~a"})) == std::set<Label>{Label::tau()});
    CHECK(msync(labels({"a", "~a", "b"})).empty());
    CHECK(contains(error_of([] { msync(Multiset<Label>{}); }), "non-empty"));
}

TEST_CASE("place transitions cover prefix, sum, constants and strong prefixes") {
    ConstEnv env;
    auto ts = place_transitions(fnm::parse_term("a.(b.0 | c.0)", env), env);
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].pre == Multiset<PlaceName>::single("a.(b.0 | c.0)", 1));
    CHECK(ts[0].label == lab("a"));
    CHECK(ts[0].post == Multiset<PlaceName>::from_entries({{"b.0", 1}, {"c.0", 1}}));

    CHECK(place_transitions(fnm::parse_term("0 + 0", env), env).empty());

    auto one = place_transitions(fnm::parse_term("a.0 + 0", env), env);
    REQUIRE(one.size() == 1);
    CHECK(one[0].label == lab("a"));

    fnm::Program prog = semi_counter();
    // Restricted names cannot be parsed, so build the place by substitution.
    TermPtr plain = fnm::parse_term("<c>.<c>.dec.0 + ~c.0", prog.env);
    TermPtr s2 = prog.env.substitute_restricted(plain, "c");
    auto s2ts = place_transitions(s2, prog.env);
    REQUIRE(s2ts.size() == 2);
    std::vector<std::string> ls;
    for (const auto& t : s2ts) {
        ls.push_back(t.label.str());
        CHECK(t.post.empty());
    }
    std::sort(ls.begin(), ls.end());
    CHECK(ls == std::vector<std::string>{"c'.c'.dec", "~c'"});
}

TEST_CASE("statically enabled transitions of the semi-counter") {
    fnm::Program prog = semi_counter();
    TermPtr a_sub = prog.env.substitute_restricted(fnm::constant("A"), "c");
    TermPtr s2 = prog.env.substitute_restricted(
        fnm::parse_term("<c>.<c>.dec.0 + ~c.0", prog.env), "c");

    StratifyResult res = statically_enabled_transitions({a_sub, s2}, prog.env);
    CHECK(!res.truncated);
    REQUIRE(res.transitions.size() == 2);
    const PlaceName s1n = "A{c'/c}";
    const PlaceName s2n = "<c'>.<c'>.dec.0 + ~c'.0";
    DerivedTransition inc{Multiset<PlaceName>::single(s1n, 1), lab("inc"),
                          Multiset<PlaceName>::from_entries({{s1n, 1}, {s2n, 1}})};
    DerivedTransition dec3{Multiset<PlaceName>::single(s2n, 3), lab("dec"),
                           Multiset<PlaceName>{}};
    CHECK(std::count(res.transitions.begin(), res.transitions.end(), inc) == 1);
    CHECK(std::count(res.transitions.begin(), res.transitions.end(), dec3) == 1);
}

TEST_CASE("a choice between complementary actions can also fuse with itself") {
    ConstEnv env;
    TermPtr p = fnm::parse_term("a.0 + ~a.0", env);
    StratifyResult res = statically_enabled_transitions({p}, env);
    REQUIRE(res.transitions.size() == 3);
    std::set<std::string> seen;
    for (const auto& t : res.transitions) {
        seen.insert(t.label.str());
        if (t.label.is_tau) CHECK(t.pre == Multiset<PlaceName>::single("a.0 + ~a.0", 2));
    }
    CHECK(seen == std::set<std::string>{"a", "~a", "tau"});
}

TEST_CASE("without outputs no synchronization layer is added") {
    ConstEnv env;
    TermPtr p = fnm::parse_term("a.b.0 + c.0", env);
    TermPtr q = fnm::parse_term("<g>.h.0", env);
    StratifyResult res = statically_enabled_transitions({p, q}, env);
    auto base_p = place_transitions(p, env);
    auto base_q = place_transitions(q, env);
    CHECK(res.transitions.size() == base_p.size() + base_q.size());
}

TEST_CASE("the net of the semi-counter has a weighted consuming transition") {
    fnm::Program prog = semi_counter();
    NetOfResult res = net_of(prog.main, prog.env);
    CHECK(!res.truncated);
    const Net& n = res.net;
    REQUIRE(n.places == std::vector<std::string>{"A{c'/c}", "<c'>.<c'>.dec.0 + ~c'.0"});
    REQUIRE(n.transitions.size() == 2);
    Transition dec3{Marking::single(1, 3), "dec", Marking{}};
    Transition inc{Marking::single(0, 1), "inc",
                          Marking::from_entries({{0, 1}, {1, 1}})};
    CHECK(n.transitions[0] == inc);
    CHECK(n.transitions[1] == dec3);
    CHECK(n.initial == Marking::single(0, 1));
    CHECK(!is_bounded(n, n.initial));
}

TEST_CASE("the net of the producer-consumer chain has the expected shape") {
    fnm::Program prog = producer_consumer_left();
    NetOfResult res = net_of(prog.main, prog.env);
    const Net& n = res.net;
    REQUIRE(n.places == std::vector<std::string>{"C1{a'/a}", "P1{a'/a}", "D1{a'/a}",
                                                 "E1{a'/a}"});
    REQUIRE(n.transitions.size() == 3);
    Transition del{Marking::from_entries({{0, 1}, {2, 1}}), "del",
                          Marking::single(3, 1)};
    Transition prod{Marking::single(1, 1), "prod",
                           Marking::from_entries({{1, 1}, {2, 1}})};
    Transition cons{Marking::single(3, 1), "cons",
                           Marking::single(0, 1)};
    CHECK(n.transitions == std::vector<Transition>{del, prod, cons});
    CHECK(n.initial == Marking::from_entries({{0, 1}, {1, 1}}));
}

TEST_CASE("equal decompositions give equal nets") {
    ConstEnv env;
    TermPtr r = fnm::parse_term("a.0 + b.c.0 | ~b.0", env);
    TermPtr r0 = fnm::par(r, fnm::nil());
    CHECK(net_to_json(net_of(r, env).net) ==
          net_to_json(net_of(r0, env).net));
}

TEST_CASE("a doubled term doubles only the marking") {
    ConstEnv env;
    TermPtr t = fnm::parse_term("a.b.0 + ~b.0", env);
    NetOfResult one = net_of(t, env);
    NetOfResult two = net_of(fnm::par(t, t), env);
    CHECK(one.net.places == two.net.places);
    CHECK(one.net.transitions == two.net.transitions);
    CHECK(two.net.initial == one.net.initial.scaled(2));
}

TEST_CASE("emitted nets are statically reduced") {
    const char* sources[] = {
        "main = a.0 + ~a.0;",
        "A := inc.(A | (<c>.<c>.dec.0 + ~c.0)); main = (nu c) A;",
        "P1 := prod.(P1 | D1); D1 := ~a.0; C1 := <a>.del.E1; E1 := cons.C1;\n"
        "main = (nu a) (P1 | C1);",
        "main = a.(b.0 | c.0) | tau.0;",
    };
    for (const char* src : sources) {
        fnm::Program prog = fnm::parse_program(src);
        Net n = net_of(prog.main, prog.env).net;
        Net reduced = static_subnet(n, n.initial);
        CHECK(reduced.places == n.places);
        CHECK(reduced.transitions == n.transitions);
    }
}

TEST_CASE("every multi-party transition is justified by a base step") {
    // Oracle: a multiset of singleton-preset transitions whose presets sum to
    // the preset, posts sum to the post, and whose labels fuse to the label.
    const char* sources[] = {
        "A := inc.(A | (<c>.<c>.dec.0 + ~c.0)); main = (nu c) A;",
        "P1 := prod.(P1 | D1); D1 := ~a.0; C1 := <a>.del.E1; E1 := cons.C1;\n"
        "main = (nu a) (P1 | C1);",
        "main = a.0 + ~a.0;",
    };
    for (const char* src : sources) {
        fnm::Program prog = fnm::parse_program(src);
        NetOfResult res = net_of(prog.main, prog.env);
        std::vector<DerivedTransition> base;
        for (const auto& [name, term] : res.terms)
            for (const auto& t : place_transitions(term, prog.env)) base.push_back(t);

        for (const auto& t : res.net.transitions) {
            Multiset<PlaceName> pre, post;
            for (const auto& [idx, cnt] : t.pre.entries())
                pre = pre.plus(Multiset<PlaceName>::single(res.net.places[idx], cnt));
            for (const auto& [idx, cnt] : t.post.entries())
                post = post.plus(Multiset<PlaceName>::single(res.net.places[idx], cnt));
            if (pre.size() < 2) continue;

            // Depth-first choice of base transitions covering the preset.
            std::function<bool(Multiset<PlaceName>, Multiset<PlaceName>, Multiset<Label>)>
                cover = [&](Multiset<PlaceName> need, Multiset<PlaceName> got,
                            Multiset<Label> ls) {
                    if (need.empty()) {
                        if (!(got == post)) return false;
                        auto outcomes = msync(ls);
                        Label want = t.label == "tau" ? Label::tau() : lab(t.label);
                        return outcomes.count(want) > 0;
                    }
                    for (const auto& b : base) {
                        if (!b.pre.subset_of(need)) continue;
                        if (cover(need.minus(b.pre), got.plus(b.post),
                                  ls.plus(Multiset<Label>::single(b.label, 1))))
                            return true;
                    }
                    return false;
                };
            CHECK(cover(pre, {}, {}));
        }
    }
}

TEST_CASE("nets of trivial terms") {
    ConstEnv env;
    NetOfResult zero = net_of(fnm::parse_term("0", env), env);
    CHECK(zero.net.places.empty());
    CHECK(zero.net.transitions.empty());
    CHECK(zero.net.initial.empty());

    NetOfResult stuck = net_of(fnm::parse_term("0 + 0", env), env);
    CHECK(stuck.net.places == std::vector<std::string>{"0 + 0"});
    CHECK(stuck.net.transitions.empty());
    CHECK(stuck.net.initial == Marking::single(0, 1));
}

TEST_CASE("ill-formed terms are refused unless forced") {
    ConstEnv env;
    TermPtr bad = fnm::parse_term("<a>.~b.0 | ~a.0", env);
    CHECK(contains(error_of([&] { net_of(bad, env); }), "not well-formed"));

    NetOfResult forced = net_of(bad, env, {.force = true});
    CHECK(!forced.truncated);
    std::set<std::string> ls;
    for (const auto& t : forced.net.transitions) ls.insert(t.label);
    // The sequence keeps its output tail, and stripping the head leaves ~b.
    CHECK(ls == std::set<std::string>{"a.~b", "~a", "~b"});
}

TEST_CASE("caps either fail loudly or truncate when forced") {
    ConstEnv env;
    TermPtr chain = fnm::parse_term("a.b.c.0", env);
    std::string err = error_of([&] { net_of(chain, env, {.max_places = 2}); });
    CHECK(contains(err, "cap of 2"));

    NetOfResult trunc = net_of(chain, env, {.force = true, .max_places = 2});
    CHECK(trunc.truncated);
    CHECK(trunc.net.places.size() == 2);
    CHECK(trunc.net.transitions.size() == 1);

    TermPtr choice = fnm::parse_term("a.0 + ~a.0", env);
    std::string terr =
        error_of([&] { net_of(choice, env, {.max_transitions = 1}); });
    CHECK(contains(terr, "cap of 1"));
}

TEST_CASE("net construction is deterministic") {
    fnm::Program first = producer_consumer_left();
    std::string reference = net_to_json(net_of(first.main, first.env).net);
    for (int i = 0; i < 3; ++i) {
        fnm::Program prog = producer_consumer_left();
        CHECK(net_to_json(net_of(prog.main, prog.env).net) == reference);
    }
}

TEST_CASE("open terms cannot be compiled") {
    ConstEnv env;
    TermPtr open = fnm::prefix(Action::input("a"), fnm::variable("x"));
    CHECK(contains(error_of([&] { net_of(open, env); }), "free variables: x"));
}
