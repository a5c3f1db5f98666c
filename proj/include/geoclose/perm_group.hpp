#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "geoclose/element_set.hpp"
#include "geoclose/errors.hpp"

namespace geoclose {

/// Permutation of universe positions: `perm[p]` is the image of `p`.
using Perm = std::vector<Pos>;

inline Perm identity_perm(int degree) {
    Perm p(degree);
    for (int i = 0; i < degree; ++i) p[i] = i;
    return p;
}

inline Perm compose(const Perm& outer, const Perm& inner) {
    Perm r(inner.size());
    for (std::size_t i = 0; i < inner.size(); ++i) r[i] = outer[inner[i]];
    return r;
}

inline Perm inverse(const Perm& p) {
    Perm r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) r[p[i]] = static_cast<Pos>(i);
    return r;
}

inline ElementSet apply(const Perm& p, ElementSet s) {
    ElementSet r;
    for (Pos x : s) r.insert(p[x]);
    return r;
}

inline std::vector<Pos> apply(const Perm& p, const std::vector<Pos>& tuple) {
    std::vector<Pos> r;
    r.reserve(tuple.size());
    for (Pos x : tuple) r.push_back(p[x]);
    return r;
}

inline bool is_bijection(const Perm& p) {
    std::vector<bool> seen(p.size(), false);
    for (Pos x : p) {
        if (x < 0 || x >= static_cast<Pos>(p.size()) || seen[x]) return false;
        seen[x] = true;
    }
    return true;
}

/// Generator-presented permutation group on universe positions. The full
/// element list is enumerated once at construction; groups larger than
/// `max_order` are rejected.
class PermGroup {
public:
    static constexpr std::size_t kDefaultMaxOrder = 2'000'000;

    PermGroup() = default;
    PermGroup(int degree, std::vector<Perm> generators, std::size_t max_order = kDefaultMaxOrder)
        : degree_(degree), generators_(std::move(generators)) {
        for (const Perm& g : generators_) {
            if (static_cast<int>(g.size()) != degree_ || !is_bijection(g))
                throw Error("group generator is not a permutation of the universe");
        }
        enumerate(max_order);
    }

    static PermGroup trivial(int degree) { return PermGroup(degree, {}); }

    int degree() const { return degree_; }
    const std::vector<Perm>& generators() const { return generators_; }
    const std::vector<Perm>& elements() const { return elements_; }
    std::size_t order() const { return elements_.size(); }

    /// Group elements fixing every member of `fixed`.
    std::vector<const Perm*> pointwise_stabilizer(ElementSet fixed) const {
        std::vector<const Perm*> out;
        for (const Perm& g : elements_) {
            bool ok = true;
            for (Pos x : fixed) {
                if (g[x] != x) { ok = false; break; }
            }
            if (ok) out.push_back(&g);
        }
        return out;
    }

    /// Orbit of position `p` under the pointwise stabilizer of `fixed`.
    ElementSet orbit(Pos p, ElementSet fixed = {}) const {
        ElementSet r;
        for (const Perm* g : pointwise_stabilizer(fixed)) r.insert((*g)[p]);
        return r;
    }

    /// Orbit of a tuple under the pointwise stabilizer of `fixed`, sorted.
    std::vector<std::vector<Pos>> orbit(const std::vector<Pos>& tuple, ElementSet fixed = {}) const {
        std::set<std::vector<Pos>> r;
        for (const Perm* g : pointwise_stabilizer(fixed)) r.insert(apply(*g, tuple));
        return {r.begin(), r.end()};
    }

    /// Partition of the universe into orbits of the whole group.
    std::vector<ElementSet> orbits() const {
        std::vector<ElementSet> out;
        ElementSet seen;
        for (Pos p = 0; p < degree_; ++p) {
            if (seen.contains(p)) continue;
            ElementSet o = orbit(p);
            seen |= o;
            out.push_back(o);
        }
        return out;
    }

private:
    static std::string key(const Perm& p) { return {p.begin(), p.end()}; }

    void enumerate(std::size_t max_order) {
        std::unordered_set<std::string> seen;
        Perm id = identity_perm(degree_);
        elements_.push_back(id);
        seen.insert(key(id));
        for (std::size_t i = 0; i < elements_.size(); ++i) {
            for (const Perm& g : generators_) {
                Perm h = compose(g, elements_[i]);
                if (seen.insert(key(h)).second) {
                    if (elements_.size() >= max_order)
                        throw Error("permutation group exceeds order bound " + std::to_string(max_order));
                    elements_.push_back(std::move(h));
                }
            }
        }
        std::sort(elements_.begin(), elements_.end());
    }

    int degree_ = 0;
    std::vector<Perm> generators_;
    std::vector<Perm> elements_;
};

}  // namespace geoclose
