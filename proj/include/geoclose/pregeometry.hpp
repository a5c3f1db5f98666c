#pragma once

#include <optional>
#include <vector>

#include "geoclose/rank.hpp"

namespace geoclose {

/// The rank-1 slice over C at level n: X = {d ∈ M_n : rk^n(d/C) = 1} with
/// cl_X(S) = acl_n(S ∪ C) ∩ X. Closure evaluation goes through the system's
/// table, so no separate cache is kept.
struct Rank1Slice {
    const LeveledClosureSystem* sys = nullptr;
    ElementSet base;
    int level = 0;
    ElementSet carrier;

    ElementSet cl(ElementSet s) const { return sys->acl(s | base, level) & carrier; }

    void require_in_carrier(ElementSet s) const {
        if (!s.subset_of(carrier)) throw NotInCarrier((s - carrier).front());
    }
};

inline Rank1Slice slice(RankEngine& eng, ElementSet c, int n) {
    const auto& sys = eng.system();
    sys.require_in_universe(c);
    Rank1Slice s{&sys, c, n, {}};
    for (Pos d : sys.level_mask(n))
        if (eng.rank_of(d, c, n) == 1) s.carrier.insert(d);
    return s;
}

/// True iff the tuple replays as a failure of the exchange assumption over
/// `w.base` at `w.level`.
inline bool replays(RankEngine& eng, const ExchangeWitness& w) {
    const auto& sys = eng.system();
    const int k = static_cast<int>(w.tuple.size());
    if (k < 2) return false;
    for (Pos p : w.tuple) {
        if (p < 0 || p >= sys.size()) return false;
        if (!sys.level_mask(w.level).contains(p)) return false;
        if (eng.rank_of(p, w.base, w.level) != 1) return false;
    }
    ElementSet middle;
    for (int i = 1; i + 1 < k; ++i) middle.insert(w.tuple[i]);
    const Pos first = w.tuple.front(), last = w.tuple.back();
    return sys.closure(middle.with(first) | w.base).contains(last) &&
           !sys.closure(middle | w.base).contains(last) &&
           !sys.closure(middle.with(last) | w.base).contains(first);
}

/// Tests the exchange assumption over C for tuples of carrier members of
/// length 2..kMax. Tuples are visited by k, then first member, then middle
/// set in lexicographic order, then last member; the first failure is
/// returned. `within` restricts the members to a subset of the carrier.
inline std::optional<ExchangeWitness> check_exchange(RankEngine& eng, ElementSet c, int n, int k_max = 4,
                                                     std::optional<ElementSet> within = std::nullopt,
                                                     long long budget = -1) {
    if (k_max < 2) throw Error("kMax must be at least 2");
    if (budget < 0) budget = eng.budget();
    const auto& sys = eng.system();
    const Rank1Slice sl = slice(eng, c, n);
    const ElementSet x = within ? (*within & sl.carrier) : sl.carrier;
    long long nodes = 0;
    for (int k = 2; k <= k_max && k <= x.size(); ++k) {
        for (Pos first : x) {
            std::optional<ExchangeWitness> found;
            for_each_subset_of_size(x.without(first), k - 2, [&](ElementSet middle) {
                if (found) return;
                if (++nodes > budget) throw SearchBudgetExceeded(budget);
                const ElementSet without_first = sys.closure(middle | c);
                const ElementSet with_first = sys.closure(middle.with(first) | c);
                for (Pos last : (x & with_first) - without_first - middle.with(first)) {
                    if (!sys.closure(middle.with(last) | c).contains(first)) {
                        ExchangeWitness w{c, n, {first}};
                        for (Pos m : middle) w.tuple.push_back(m);
                        w.tuple.push_back(last);
                        found = std::move(w);
                        return;
                    }
                }
            });
            if (found) return found;
        }
    }
    return std::nullopt;
}

/// Exchange over every closed base set C at level n. For k = 2 this is
/// complete: a k-tuple failure over C is a pair failure over C together
/// with the middle members.
inline std::optional<ExchangeWitness> check_exchange_all(RankEngine& eng, int n, int k_max = 2) {
    for (ElementSet c : closed_sets(eng.system()))
        if (auto w = check_exchange(eng, c, n, k_max)) return w;
    return std::nullopt;
}

inline bool is_independent(const Rank1Slice& sl, ElementSet s) {
    sl.require_in_carrier(s);
    for (Pos b : s)
        if (sl.cl(s.without(b)).contains(b)) return false;
    return true;
}

/// Greedy basis of A in the given order: an element is kept when it is not
/// spanned by those kept before it.
inline ElementSet greedy_basis(const Rank1Slice& sl, ElementSet a, const Tiebreak& order = {}) {
    sl.require_in_carrier(a);
    ElementSet b;
    for (Pos p : ordered(a, order))
        if (!sl.cl(b).contains(p)) b.insert(p);
    return b;
}

/// Basis of A. Post-checks independence and compares against the basis
/// built in reverse order; a disagreement is turned into an exchange
/// witness inside A.
inline ElementSet find_basis(RankEngine& eng, const Rank1Slice& sl, ElementSet a, const Tiebreak& order = {}) {
    const ElementSet b = greedy_basis(sl, a, order);
    std::vector<Pos> rev = ordered(a, order);
    std::reverse(rev.begin(), rev.end());
    const ElementSet b2 = greedy_basis(sl, a, rev);
    if (is_independent(sl, b) && is_independent(sl, b2) && b.size() == b2.size()) return b;
    if (auto w = check_exchange(eng, sl.base, sl.level, std::max(2, a.size() + 1), a)) throw ExchangeViolation(*w);
    throw TheoremContradiction("bases of different size in a slice that passes exchange");
}

inline int dimension(RankEngine& eng, const Rank1Slice& sl, ElementSet a) { return find_basis(eng, sl, a).size(); }

/// Largest independent subset of A by exhaustive search.
inline int max_independent_size(const Rank1Slice& sl, ElementSet a) {
    sl.require_in_carrier(a);
    int best = 0;
    for_each_subset(a, [&](ElementSet s) {
        if (s.size() > best && is_independent(sl, s)) best = s.size();
    });
    return best;
}

}  // namespace geoclose
