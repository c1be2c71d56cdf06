#pragma once

// Small nets used across the test suites: a semi-counter, a producer/consumer
// pair that differ only in how deliveries are split, and a few textbook nets
// exercising subnet extraction and synchronization shapes.

#include <random>
#include <set>
#include <string>
#include <vector>

#include "fnmnet/petri.hpp"

namespace corpus {

using fnmnet::Marking;
using fnmnet::Net;
using fnmnet::Transition;

inline Marking mk(const Net& n, std::initializer_list<std::pair<std::string, std::int64_t>> items) {
    std::vector<Marking::Entry> entries;
    for (const auto& [name, cnt] : items) entries.emplace_back(n.index_of(name), cnt);
    return Marking::from_entries(std::move(entries));
}

namespace detail {
inline Marking m(std::initializer_list<std::pair<std::int32_t, std::int64_t>> items) {
    std::vector<Marking::Entry> entries(items.begin(), items.end());
    return Marking::from_entries(std::move(entries));
}
}  // namespace detail

// One place, three transitions: a, ~a, and the synchronization that consumes
// two tokens at once.
inline Net choice_sync_net() {
    using detail::m;
    return Net::make({"s1"},
                     {{m({{0, 1}}), "a", {}},
                      {m({{0, 1}}), "~a", {}},
                      {m({{0, 2}}), "tau", {}}},
                     m({{0, 1}}));
}

// Semi-counter that needs three stored units per removal.
inline Net semi_counter_net() {
    using detail::m;
    return Net::make({"s1", "s2"},
                     {{m({{0, 1}}), "inc", m({{0, 1}, {1, 1}})},
                      {m({{1, 3}}), "dec", {}}},
                     m({{0, 1}}));
}

// Three places; the second transition needs two tokens on s1.
inline Net two_weight_net() {
    using detail::m;
    return Net::make({"s1", "s2", "s3"},
                     {{m({{0, 1}}), "a", m({{1, 1}})},
                      {m({{0, 2}}), "b", m({{2, 1}})}},
                     m({{0, 1}}));
}

// Five places; c needs two tokens on s1 and one on s2, d hangs off the
// never-marked s3. Initial marking s1 + 2*s2.
inline Net circulating_net() {
    using detail::m;
    return Net::make({"s1", "s2", "s3", "s4", "s5"},
                     {{m({{3, 1}}), "a", m({{0, 1}})},
                      {m({{0, 1}}), "b", m({{3, 1}})},
                      {m({{0, 2}, {1, 1}}), "c", m({{4, 1}})},
                      {m({{2, 1}}), "d", {}}},
                     m({{0, 1}, {1, 2}}));
}

// Producer/consumer with a single delivery channel.
inline Net producer_consumer_one() {
    using detail::m;
    // places: P1 C1 D1 C1'
    return Net::make({"P1", "C1", "D1", "C1'"},
                     {{m({{0, 1}}), "prod", m({{0, 1}, {2, 1}})},
                      {m({{2, 1}, {1, 1}}), "del", m({{3, 1}})},
                      {m({{3, 1}}), "cons", m({{1, 1}})}},
                     m({{0, 1}, {1, 1}}));
}

// Producer/consumer that splits deliveries over two channels.
inline Net producer_consumer_two() {
    using detail::m;
    // places: P2 C2 D2' D2'' C2'
    return Net::make({"P2", "C2", "D2'", "D2''", "C2'"},
                     {{m({{0, 1}}), "prod", m({{0, 1}, {2, 1}})},
                      {m({{0, 1}}), "prod", m({{0, 1}, {3, 1}})},
                      {m({{2, 1}, {1, 1}}), "del", m({{4, 1}})},
                      {m({{3, 1}, {1, 1}}), "del", m({{4, 1}})},
                      {m({{4, 1}}), "cons", m({{1, 1}})}},
                     m({{0, 1}, {1, 1}}));
}

// Random net with small bounds (5 places, 5 transitions, weights up to 3),
// cut down to its statically reachable part so every place matters.
inline Net random_reduced_net(std::mt19937& rng) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    int nplaces = pick(1, 5);
    std::vector<std::string> places;
    places.reserve(nplaces);
    for (int i = 0; i < nplaces; ++i) places.push_back("s" + std::to_string(i + 1));
    static const char* kLabels[] = {"a", "b", "c", "tau"};

    std::set<Transition> dedup;
    int ntrans = pick(0, 5);
    for (int j = 0; j < ntrans; ++j) {
        std::vector<Marking::Entry> pre;
        int first = pick(0, nplaces - 1);
        pre.emplace_back(first, pick(1, 3));
        if (pick(0, 2) == 0 && nplaces > 1) {
            int second = pick(0, nplaces - 2);
            if (second >= first) ++second;
            pre.emplace_back(second, pick(1, 2));
        }
        std::vector<Marking::Entry> post;
        int outs = pick(0, 2);
        for (int o = 0; o < outs; ++o) post.emplace_back(pick(0, nplaces - 1), pick(1, 2));
        dedup.insert({Marking::from_entries(std::move(pre)), kLabels[pick(0, 3)],
                      Marking::from_entries(std::move(post))});
    }

    std::vector<Marking::Entry> m0;
    for (int i = 0; i < nplaces; ++i)
        if (pick(0, 1) == 0) m0.emplace_back(i, pick(1, 2));
    Net full = Net::make(places, {dedup.begin(), dedup.end()}, Marking::from_entries(m0));
    return fnmnet::static_subnet(full, full.initial);
}

}  // namespace corpus
