#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>
#include <string>

#include "corpus.hpp"
#include "fnmnet/petri.hpp"

using namespace fnmnet;
using corpus::mk;

namespace {

std::set<std::string> place_set(const Net& n) {
    return {n.places.begin(), n.places.end()};
}

// Transition triples by place name, independent of index layout.
std::set<std::string> transition_set(const Net& n) {
    std::set<std::string> out;
    for (const auto& t : n.transitions)
        out.insert(marking_to_cli(n, t.pre) + "--" + t.label + "->" + marking_to_cli(n, t.post));
    return out;
}

Net random_bounded_net(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nplaces(1, 4), ntrans(0, 4), cnt(1, 2);
    int np = nplaces(rng);
    std::vector<std::string> places;
    for (int i = 0; i < np; ++i) places.push_back("p" + std::to_string(i));
    std::uniform_int_distribution<int> pidx(0, np - 1);
    std::vector<Transition> ts;
    std::set<std::tuple<Marking, std::string, Marking>> seen;
    int nt = ntrans(rng);
    for (int i = 0; i < nt; ++i) {
        // |post| <= |pre| keeps every net bounded
        int presize = std::uniform_int_distribution<int>(1, 2)(rng);
        std::vector<Marking::Entry> pre, post;
        for (int k = 0; k < presize; ++k) pre.emplace_back(pidx(rng), 1);
        int postsize = std::uniform_int_distribution<int>(0, presize)(rng);
        for (int k = 0; k < postsize; ++k) post.emplace_back(pidx(rng), 1);
        Transition t{Marking::from_entries(pre),
                     std::string(1, static_cast<char>('a' + i)),
                     Marking::from_entries(post)};
        if (seen.emplace(t.pre, t.label, t.post).second) ts.push_back(std::move(t));
    }
    std::vector<Marking::Entry> init;
    for (int i = 0; i < np; ++i)
        if (std::uniform_int_distribution<int>(0, 1)(rng)) init.emplace_back(i, cnt(rng));
    return Net::make(std::move(places), std::move(ts), Marking::from_entries(std::move(init)));
}

}  // namespace

TEST_CASE("enabling needs the whole preset") {
    Net n = Net::make({"s"}, {{Marking::single(0, 2), "tau", {}}}, Marking::single(0, 1));
    CHECK_FALSE(enabled(n, Marking::single(0, 1), 0));
    CHECK(enabled(n, Marking::single(0, 2), 0));
    CHECK(enabled(n, Marking::single(0, 3), 0));
    CHECK_THROWS_AS(fire(n, Marking::single(0, 1), 0), precondition_error);
    CHECK(fire(n, Marking::single(0, 3), 0) == Marking::single(0, 1));
}

TEST_CASE("firing the semi-counter") {
    Net n = corpus::semi_counter_net();
    Marking m = mk(n, {{"s1", 1}});
    m = fire(n, m, 0);
    CHECK(m == mk(n, {{"s1", 1}, {"s2", 1}}));
    m = fire(n, fire(n, m, 0), 0);
    CHECK(m == mk(n, {{"s1", 1}, {"s2", 3}}));
    CHECK(fire(n, m, 1) == mk(n, {{"s1", 1}}));
}

TEST_CASE("step enumeration counts self-concurrency") {
    Net n = corpus::semi_counter_net();
    auto steps = enumerate_steps(n, mk(n, {{"s1", 2}}));
    REQUIRE(steps.size() == 2);
    CHECK(steps[0] == Step::single(0, 1));
    CHECK(steps[1] == Step::single(0, 2));
    CHECK(step_label(n, steps[1]) == Multiset<std::string>::single("inc", 2));
    CHECK(step_pre(n, steps[1]) == mk(n, {{"s1", 2}}));
    CHECK(step_fire(n, mk(n, {{"s1", 2}}), steps[1]) ==
          mk(n, {{"s1", 2}, {"s2", 2}}));
    CHECK_THROWS_AS(step_fire(n, mk(n, {{"s1", 1}}), steps[1]), precondition_error);
}

TEST_CASE("step enumeration covers mixed steps") {
    Net n = corpus::semi_counter_net();
    auto steps = enumerate_steps(n, mk(n, {{"s1", 1}, {"s2", 3}}));
    // {inc}, {dec}, {inc,dec}
    REQUIRE(steps.size() == 3);
    CHECK(steps[0] == Step::single(1, 1));
    CHECK(steps[1] == Step::single(0, 1));
    CHECK(steps[2] == Step::single(0, 1).plus(Step::single(1, 1)));
    CHECK(step_fire(n, mk(n, {{"s1", 1}, {"s2", 3}}), steps[2]) ==
          mk(n, {{"s1", 1}, {"s2", 1}}));
}

TEST_CASE("reachability is a breadth-first closure") {
    Net n = corpus::two_weight_net();
    ReachGraph g = reachable(n, n.initial);
    REQUIRE(g.nodes.size() == 2);  // s1 and s2; b needs two tokens on s1
    CHECK(g.nodes[0] == mk(n, {{"s1", 1}}));
    CHECK(g.nodes[1] == mk(n, {{"s2", 1}}));

    ReachGraph g2 = reachable(n, mk(n, {{"s1", 2}}));
    // 2s1, s1+s2, 2s2, s3
    CHECK(g2.nodes.size() == 4);
}

TEST_CASE("reachability cap reports the cap") {
    Net n = corpus::semi_counter_net();
    CHECK_THROWS_WITH_AS(reachable(n, n.initial, 10),
                         doctest::Contains("cap of 10"), resource_error);
}

TEST_CASE("boundedness via coverability") {
    CHECK_FALSE(is_bounded(corpus::semi_counter_net(), corpus::semi_counter_net().initial));
    CHECK(is_bounded(corpus::two_weight_net(), corpus::two_weight_net().initial));
    CHECK(is_bounded(corpus::circulating_net(), corpus::circulating_net().initial));
    Net pc = corpus::producer_consumer_one();
    CHECK_FALSE(is_bounded(pc, pc.initial));
    CHECK(is_bounded(corpus::choice_sync_net(), corpus::choice_sync_net().initial));
}

TEST_CASE("boundedness agrees with exhausted reachability on random nets") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        Net n = random_bounded_net(rng);
        CHECK(is_bounded(n, n.initial));  // |post| <= |pre| by construction
        reachable(n, n.initial, 100000);  // must terminate under a generous cap
    }
}

TEST_CASE("dynamic subnet keeps only marked places and fired transitions") {
    Net n = corpus::circulating_net();
    Net dyn = dynamic_subnet(n, n.initial);
    CHECK(place_set(dyn) == std::set<std::string>{"s1", "s2", "s4"});
    CHECK(dyn.transitions.size() == 2);
    for (const auto& t : dyn.transitions) CHECK((t.label == "a" || t.label == "b"));
    CHECK(dyn.initial == mk(dyn, {{"s1", 1}, {"s2", 2}}));
}

TEST_CASE("static subnet closes over preset support") {
    Net n = corpus::circulating_net();
    Net sta = static_subnet(n, n.initial);
    CHECK(place_set(sta) == std::set<std::string>{"s1", "s2", "s4", "s5"});
    CHECK(sta.transitions.size() == 3);  // a, b, c; d hangs off unmarked s3
    std::set<std::string> labels;
    for (const auto& t : sta.transitions) labels.insert(t.label);
    CHECK(labels == std::set<std::string>{"a", "b", "c"});
}

TEST_CASE("dynamic subnet is contained in the static subnet") {
    Net n = corpus::circulating_net();
    Net dyn = dynamic_subnet(n, n.initial);
    Net sta = static_subnet(n, n.initial);
    for (const auto& p : dyn.places) CHECK(place_set(sta).count(p) == 1);
    for (const auto& t : transition_set(dyn)) CHECK(transition_set(sta).count(t) == 1);

    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        Net r = random_bounded_net(rng);
        Net d = dynamic_subnet(r, r.initial);
        Net s = static_subnet(r, r.initial);
        for (const auto& p : d.places) CHECK(place_set(s).count(p) == 1);
        for (const auto& t : transition_set(d)) CHECK(transition_set(s).count(t) == 1);
        // statically reduced nets are fixpoints
        Net s2 = static_subnet(s, s.initial);
        CHECK(place_set(s2) == place_set(s));
        CHECK(transition_set(s2) == transition_set(s));
    }
}

TEST_CASE("dynamic subnet needs a bounded closure") {
    Net n = corpus::semi_counter_net();
    CHECK_THROWS_AS(dynamic_subnet(n, n.initial, 50), resource_error);
}

TEST_CASE("disjoint union tags places by origin") {
    UnionNet u = disjoint_union(corpus::producer_consumer_one(), corpus::producer_consumer_two());
    CHECK(u.net.places.size() == 9);
    CHECK(u.net.transitions.size() == 8);
    CHECK(u.rename1.at("P1") == "1:P1");
    CHECK(u.rename2.at("P2") == "2:P2");
    CHECK(u.initial1 == mk(u.net, {{"1:P1", 1}, {"1:C1", 1}}));
    CHECK(u.initial2 == mk(u.net, {{"2:P2", 1}, {"2:C2", 1}}));
    CHECK(u.net.initial == u.initial1.plus(u.initial2));
}

TEST_CASE("union with the empty net is an isomorphic copy") {
    Net n = corpus::circulating_net();
    UnionNet u = disjoint_union(n, Net::make({}, {}, {}));
    CHECK(u.net.places.size() == n.places.size());
    CHECK(u.net.transitions.size() == n.transitions.size());
    for (const auto& t : n.transitions) {
        Transition renamed = t;  // indices survive because the left net comes first
        CHECK(std::find(u.net.transitions.begin(), u.net.transitions.end(), renamed) !=
              u.net.transitions.end());
    }
}

TEST_CASE("net JSON round trip is stable") {
    Net n = corpus::circulating_net();
    std::string once = net_to_json(n);
    Net back = net_from_json(once);
    CHECK(net_to_json(back) == once);
    CHECK(place_set(back) == place_set(n));
    CHECK(transition_set(back) == transition_set(n));
    CHECK(back.initial == mk(back, {{"s1", 1}, {"s2", 2}}));
}

TEST_CASE("net JSON validation") {
    CHECK_THROWS_AS(net_from_json("not json"), input_error);
    CHECK_THROWS_AS(net_from_json(R"({"places": ["a"]})"), input_error);
    // empty preset
    CHECK_THROWS_AS(net_from_json(
                        R"({"places": ["a"], "transitions": [{"pre": {}, "label": "t", "post": {}}], "initial": {}})"),
                    input_error);
    // undeclared place
    CHECK_THROWS_AS(net_from_json(
                        R"({"places": ["a"], "transitions": [{"pre": {"b": 1}, "label": "t", "post": {}}], "initial": {}})"),
                    input_error);
    // zero count
    CHECK_THROWS_AS(net_from_json(
                        R"({"places": ["a"], "transitions": [{"pre": {"a": 0}, "label": "t", "post": {}}], "initial": {}})"),
                    input_error);
    // duplicate transition
    CHECK_THROWS_AS(net_from_json(
                        R"({"places": ["a"], "transitions": [
                            {"pre": {"a": 1}, "label": "t", "post": {}},
                            {"pre": {"a": 1}, "label": "t", "post": {}}], "initial": {}})"),
                    input_error);
    // duplicate place
    CHECK_THROWS_AS(net_from_json(R"({"places": ["a", "a"], "transitions": [], "initial": {}})"),
                    input_error);
    // unknown key
    CHECK_THROWS_AS(net_from_json(R"({"places": [], "transitions": [], "extra": 1})"),
                    input_error);
}

TEST_CASE("marking CLI shorthand") {
    Net n = corpus::circulating_net();
    CHECK(marking_from_cli(n, "s1:1,s2:2") == n.initial);
    CHECK(marking_from_cli(n, " s1:1 , s2:2 ") == n.initial);
    CHECK(marking_from_cli(n, "s1") == mk(n, {{"s1", 1}}));
    CHECK(marking_from_cli(n, "s1,s1") == mk(n, {{"s1", 2}}));
    CHECK(marking_from_cli(n, "") == Marking());
    CHECK(marking_to_cli(n, n.initial) == "s1:1,s2:2");
    CHECK_THROWS_AS(marking_from_cli(n, "s1:0"), input_error);
    CHECK_THROWS_AS(marking_from_cli(n, "nope:1"), input_error);
    CHECK_THROWS_AS(marking_from_cli(n, "s1:x"), input_error);
}

TEST_CASE("marking JSON uses sorted objects") {
    Net n = corpus::circulating_net();
    CHECK(marking_to_json(n, n.initial) == R"({"s1":1,"s2":2})");
    CHECK(marking_to_json(n, Marking()) == "{}");
    CHECK(marking_from_json(n, R"({"s2":2,"s1":1})") == n.initial);
    CHECK_THROWS_AS(marking_from_json(n, R"({"s1":0})"), input_error);
}

TEST_CASE("dot export shapes and weights") {
    Net n = corpus::circulating_net();
    std::string dot = net_to_dot(n);
    CHECK(dot.find("shape=circle") != std::string::npos);
    CHECK(dot.find("shape=box") != std::string::npos);
    CHECK(dot.find("[label=\"2\"]") != std::string::npos);  // the weight-2 arc from s1 to c
    CHECK(dot.find("s1\\n1") != std::string::npos);         // token count under the place name
    CHECK(dot.find("digraph net {") == 0);
}
