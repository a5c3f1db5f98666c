#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <vector>

namespace geoclose {

/// Bit position of an element inside its system's universe. Positions follow
/// ascending element id, so iterating a set visits ids in ascending order.
using Pos = int;

inline constexpr int kMaxUniverse = 64;

/// Finite set of universe positions backed by a single 64-bit word.
class ElementSet {
public:
    constexpr ElementSet() = default;
    constexpr explicit ElementSet(std::uint64_t bits) : bits_(bits) {}

    static constexpr ElementSet single(Pos p) { return ElementSet(std::uint64_t{1} << p); }
    static constexpr ElementSet first_n(int n) {
        return n >= 64 ? ElementSet(~std::uint64_t{0}) : ElementSet((std::uint64_t{1} << n) - 1);
    }
    static ElementSet of(std::initializer_list<Pos> ps) {
        ElementSet s;
        for (Pos p : ps) s.insert(p);
        return s;
    }
    template <typename Range>
    static ElementSet from_range(const Range& ps) {
        ElementSet s;
        for (Pos p : ps) s.insert(p);
        return s;
    }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr int size() const { return std::popcount(bits_); }
    constexpr bool contains(Pos p) const { return (bits_ >> p) & 1U; }
    constexpr bool subset_of(ElementSet o) const { return (bits_ & ~o.bits_) == 0; }
    constexpr bool intersects(ElementSet o) const { return (bits_ & o.bits_) != 0; }

    constexpr void insert(Pos p) { bits_ |= std::uint64_t{1} << p; }
    constexpr void erase(Pos p) { bits_ &= ~(std::uint64_t{1} << p); }

    constexpr ElementSet with(Pos p) const { return ElementSet(bits_ | (std::uint64_t{1} << p)); }
    constexpr ElementSet without(Pos p) const { return ElementSet(bits_ & ~(std::uint64_t{1} << p)); }

    /// Smallest position in the set; undefined on the empty set.
    constexpr Pos front() const { return std::countr_zero(bits_); }
    /// Largest position in the set; undefined on the empty set.
    constexpr Pos back() const { return 63 - std::countl_zero(bits_); }

    friend constexpr ElementSet operator|(ElementSet a, ElementSet b) { return ElementSet(a.bits_ | b.bits_); }
    friend constexpr ElementSet operator&(ElementSet a, ElementSet b) { return ElementSet(a.bits_ & b.bits_); }
    friend constexpr ElementSet operator-(ElementSet a, ElementSet b) { return ElementSet(a.bits_ & ~b.bits_); }
    constexpr ElementSet& operator|=(ElementSet o) { bits_ |= o.bits_; return *this; }
    constexpr ElementSet& operator&=(ElementSet o) { bits_ &= o.bits_; return *this; }
    constexpr ElementSet& operator-=(ElementSet o) { bits_ &= ~o.bits_; return *this; }
    friend constexpr bool operator==(ElementSet, ElementSet) = default;
    friend constexpr bool operator<(ElementSet a, ElementSet b) { return a.bits_ < b.bits_; }

    class iterator {
    public:
        using value_type = Pos;
        using difference_type = std::ptrdiff_t;
        constexpr iterator() = default;
        constexpr explicit iterator(std::uint64_t rest) : rest_(rest) {}
        constexpr Pos operator*() const { return std::countr_zero(rest_); }
        constexpr iterator& operator++() { rest_ &= rest_ - 1; return *this; }
        constexpr iterator operator++(int) { auto t = *this; ++*this; return t; }
        friend constexpr bool operator==(iterator, iterator) = default;
    private:
        std::uint64_t rest_ = 0;
    };
    constexpr iterator begin() const { return iterator(bits_); }
    constexpr iterator end() const { return iterator(0); }

    std::vector<Pos> to_vector() const { return {begin(), end()}; }

private:
    std::uint64_t bits_ = 0;
};

/// Visits every subset of `base` (including the empty set and `base`) in
/// increasing numeric order of the bit pattern.
template <typename F>
void for_each_subset(ElementSet base, F&& f) {
    const std::uint64_t m = base.bits();
    std::uint64_t s = 0;
    while (true) {
        f(ElementSet(s));
        if (s == m) break;
        s = (s - m) & m;
    }
}

/// Visits every subset of `base` with exactly `k` members, in lexicographic
/// order of their sorted member lists.
template <typename F>
void for_each_subset_of_size(ElementSet base, int k, F&& f) {
    const std::vector<Pos> items = base.to_vector();
    const int n = static_cast<int>(items.size());
    if (k < 0 || k > n) return;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        ElementSet s;
        for (int i : idx) s.insert(items[i]);
        f(s);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

/// All subsets of `base` with at most `max_size` members, ordered by size then
/// lexicographically.
inline std::vector<ElementSet> subsets_up_to(ElementSet base, int max_size) {
    std::vector<ElementSet> out;
    for (int k = 0; k <= max_size && k <= base.size(); ++k)
        for_each_subset_of_size(base, k, [&](ElementSet s) { out.push_back(s); });
    return out;
}

}  // namespace geoclose

template <>
struct std::hash<geoclose::ElementSet> {
    std::size_t operator()(geoclose::ElementSet s) const noexcept {
        std::uint64_t x = s.bits() + 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return static_cast<std::size_t>(x ^ (x >> 31));
    }
};
