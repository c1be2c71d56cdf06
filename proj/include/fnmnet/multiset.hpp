#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fnmnet/errors.hpp"

namespace fnmnet {

inline constexpr std::int64_t kDefaultSubMultisetCap = 100000;

// Finite multiset over an ordered element type. Entries are kept sorted by
// element and never carry a zero or negative count, so two multisets are equal
// exactly when their entry vectors are equal.
template <typename T>
class Multiset {
  public:
    using Entry = std::pair<T, std::int64_t>;

    Multiset() = default;

    static Multiset single(T elem, std::int64_t count = 1) {
        Multiset m;
        if (count < 0) throw input_error("multiset count must be non-negative");
        if (count > 0) m.entries_.emplace_back(std::move(elem), count);
        return m;
    }

    // Folds duplicate elements together; zero totals are dropped.
    static Multiset from_entries(std::vector<Entry> entries) {
        std::sort(entries.begin(), entries.end(),
                  [](const Entry& a, const Entry& b) { return a.first < b.first; });
        Multiset m;
        for (auto& e : entries) {
            if (e.second < 0) throw input_error("multiset count must be non-negative");
            if (e.second == 0) continue;
            if (!m.entries_.empty() && m.entries_.back().first == e.first)
                m.entries_.back().second += e.second;
            else
                m.entries_.push_back(std::move(e));
        }
        return m;
    }

    std::int64_t count(const T& elem) const {
        auto it = std::lower_bound(
            entries_.begin(), entries_.end(), elem,
            [](const Entry& e, const T& v) { return e.first < v; });
        if (it != entries_.end() && it->first == elem) return it->second;
        return 0;
    }

    bool contains(const T& elem) const { return count(elem) > 0; }

    // Total number of element occurrences.
    std::int64_t size() const {
        std::int64_t n = 0;
        for (const auto& e : entries_) n += e.second;
        return n;
    }

    bool empty() const { return entries_.empty(); }

    const std::vector<Entry>& entries() const { return entries_; }

    std::vector<T> support() const {
        std::vector<T> out;
        out.reserve(entries_.size());
        for (const auto& e : entries_) out.push_back(e.first);
        return out;
    }

    // Pointwise sum.
    Multiset plus(const Multiset& other) const {
        Multiset out;
        auto a = entries_.begin(), b = other.entries_.begin();
        while (a != entries_.end() || b != other.entries_.end()) {
            if (b == other.entries_.end() || (a != entries_.end() && a->first < b->first)) {
                out.entries_.push_back(*a++);
            } else if (a == entries_.end() || b->first < a->first) {
                out.entries_.push_back(*b++);
            } else {
                out.entries_.emplace_back(a->first, a->second + b->second);
                ++a, ++b;
            }
        }
        return out;
    }

    // Pointwise difference, truncated at zero.
    Multiset minus(const Multiset& other) const {
        Multiset out;
        for (const auto& e : entries_) {
            std::int64_t c = e.second - other.count(e.first);
            if (c > 0) out.entries_.emplace_back(e.first, c);
        }
        return out;
    }

    Multiset scaled(std::int64_t factor) const {
        if (factor < 0) throw input_error("multiset scale factor must be non-negative");
        Multiset out;
        if (factor == 0) return out;
        out.entries_ = entries_;
        for (auto& e : out.entries_) e.second *= factor;
        return out;
    }

    // Pointwise <=.
    bool subset_of(const Multiset& other) const {
        for (const auto& e : entries_)
            if (e.second > other.count(e.first)) return false;
        return true;
    }

    // Number of sub-multisets: product of (count + 1), saturating at int64 max.
    std::int64_t sub_multiset_count() const {
        std::int64_t n = 1;
        for (const auto& e : entries_) {
            if (__builtin_mul_overflow(n, e.second + 1, &n))
                return std::numeric_limits<std::int64_t>::max();
        }
        return n;
    }

    // All sub-multisets in mixed-radix counting order over the sorted support:
    // the last element varies fastest, so the empty multiset comes first and
    // *this comes last.
    std::vector<Multiset> sub_multisets(std::int64_t cap = kDefaultSubMultisetCap) const {
        std::int64_t total = sub_multiset_count();
        if (total > cap)
            throw resource_error("sub-multiset enumeration would produce " +
                                 std::to_string(total) + " results, over the cap of " +
                                 std::to_string(cap));
        std::vector<std::int64_t> digits(entries_.size(), 0);
        std::vector<Multiset> out;
        out.reserve(static_cast<std::size_t>(total));
        for (;;) {
            Multiset m;
            for (std::size_t i = 0; i < digits.size(); ++i)
                if (digits[i] > 0) m.entries_.emplace_back(entries_[i].first, digits[i]);
            out.push_back(std::move(m));
            std::size_t i = digits.size();
            while (i > 0) {
                --i;
                if (digits[i] < entries_[i].second) {
                    ++digits[i];
                    break;
                }
                digits[i] = 0;
                if (i == 0) return out;
            }
            if (digits.empty()) return out;
        }
    }

    auto operator<=>(const Multiset&) const = default;

  private:
    std::vector<Entry> entries_;
};

}  // namespace fnmnet
