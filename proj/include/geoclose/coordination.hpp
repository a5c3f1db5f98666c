#pragma once

#include <string>
#include <vector>

#include "geoclose/pregeometry.hpp"

namespace geoclose {

/// An n-ccs: a sequence with core indices 0 = k_0 < ... < k_m = length.
struct CoordSequence {
    std::vector<Pos> elements;
    std::vector<int> core_indices{0};
    friend bool operator==(const CoordSequence&, const CoordSequence&) = default;
};

namespace detail {

inline ElementSet prefix_set(const std::vector<Pos>& seq, std::size_t len) {
    ElementSet s;
    for (std::size_t i = 0; i < len; ++i) s.insert(seq[i]);
    return s;
}

// acl_n(A) ∩ {d ∈ M_n : rk^n(d / base) = 1}.
inline ElementSet rank1_part(RankEngine& eng, ElementSet xa, ElementSet base, int n) {
    ElementSet out;
    for (Pos d : xa)
        if (eng.rank_of(d, base, n) == 1) out.insert(d);
    return out;
}

// For a dependent member b of an independent-looking block over `base`,
// produce a replayable exchange failure from the block.
inline ExchangeWitness block_witness(const LeveledClosureSystem& sys, const std::vector<Pos>& block, std::size_t bi,
                                     ElementSet base, int n) {
    const Pos b = block[bi];
    std::vector<Pos> others;
    for (std::size_t i = 0; i < block.size(); ++i)
        if (i != bi) others.push_back(block[i]);
    // Shrink to a minimal T with b ∈ cl(T ∪ base).
    std::vector<Pos> t = others;
    for (std::size_t i = t.size(); i-- > 0;) {
        std::vector<Pos> trial = t;
        trial.erase(trial.begin() + static_cast<long>(i));
        if (sys.closure(ElementSet::from_range(trial) | base).contains(b)) t = std::move(trial);
    }
    // The member of T chosen latest was not spanned by b and the rest of T.
    auto latest = std::max_element(t.begin(), t.end(), [&](Pos x, Pos y) {
        return std::find(block.begin(), block.end(), x) < std::find(block.begin(), block.end(), y);
    });
    ExchangeWitness w{base, n, {*latest}};
    std::vector<Pos> middle;
    for (Pos p : t)
        if (p != *latest) middle.push_back(p);
    std::sort(middle.begin(), middle.end());
    w.tuple.insert(w.tuple.end(), middle.begin(), middle.end());
    w.tuple.push_back(b);
    return w;
}

}  // namespace detail

/// n-ccs check: sequence inside acl_n(A), covering acl_n(A) over B, and
/// each block a basis of acl_n(A) ∩ {d : rk^n(d / prefix ∪ B) = 1} in the
/// slice pregeometry over prefix ∪ B.
inline bool is_nccs(RankEngine& eng, const RankQuery& q, const CoordSequence& cs) {
    const auto& sys = eng.system();
    const ElementSet xa = sys.acl(q.a, q.n);
    const auto& k = cs.core_indices;
    if (k.empty() || k.front() != 0 || k.back() != static_cast<int>(cs.elements.size())) return false;
    for (std::size_t j = 1; j < k.size(); ++j)
        if (k[j] <= k[j - 1]) return false;
    for (Pos p : cs.elements)
        if (p < 0 || p >= sys.size() || !xa.contains(p)) return false;
    if (!xa.subset_of(sys.closure(ElementSet::from_range(cs.elements) | q.b))) return false;
    for (std::size_t j = 0; j + 1 < k.size(); ++j) {
        const ElementSet base = detail::prefix_set(cs.elements, k[j]) | q.b;
        const ElementSet xj = detail::rank1_part(eng, xa, base, q.n);
        ElementSet block;
        for (int i = k[j]; i < k[j + 1]; ++i) {
            if (block.contains(cs.elements[i])) return false;
            block.insert(cs.elements[i]);
        }
        if (!block.subset_of(xj)) return false;
        if (!xj.subset_of(sys.closure(block | base))) return false;
        for (Pos b : block)
            if (sys.closure(block.without(b) | base).contains(b)) return false;
    }
    return true;
}

/// Construction: repeatedly take the rank-1 part of acl_n(A) over
/// the current prefix ∪ B, append a greedy basis of it in tiebreak order,
/// and record the block boundary.
inline CoordSequence build_nccs(RankEngine& eng, const RankQuery& q, const Tiebreak& order = {}) {
    const auto& sys = eng.system();
    (void)eng.rank_recursive(q);
    const ElementSet xa = sys.acl(q.a, q.n);
    CoordSequence cs;
    ElementSet prefix;
    while (!xa.subset_of(sys.closure(prefix | q.b))) {
        const ElementSet base = prefix | q.b;
        const ElementSet xm = detail::rank1_part(eng, xa, base, q.n);
        if (xm.empty()) throw TheoremContradiction("no rank-1 element in an uncovered part of acl_n(A)");
        std::vector<Pos> block;
        ElementSet spanned = sys.closure(base);
        for (Pos d : ordered(xm, order)) {
            if (spanned.contains(d)) continue;
            block.push_back(d);
            spanned = sys.closure(base | ElementSet::from_range(block));
        }
        const ElementSet bs = ElementSet::from_range(block);
        for (std::size_t i = 0; i < block.size(); ++i)
            if (sys.closure(bs.without(block[i]) | base).contains(block[i]))
                throw ExchangeViolation(detail::block_witness(sys, block, i, base, q.n));
        cs.elements.insert(cs.elements.end(), block.begin(), block.end());
        cs.core_indices.push_back(static_cast<int>(cs.elements.size()));
        prefix |= bs;
    }
    return cs;
}

/// Trace of the n-cs to n-ccs transformation: every intermediate sequence.
struct TransformResult {
    CoordSequence nccs;
    std::vector<std::vector<Pos>> trace;
};

/// Turns an n-cs into an n-ccs of the same length.
/// Each block starts with the next element of the current sequence; while
/// the block does not span its slice, the next element is taken if it lies
/// in the slice, and otherwise the least uncovered d is swapped in
/// for the first a_l whose prefix spans it (one-element extension), then
/// moved directly after the block (reordering). Every intermediate sequence
/// is checked to be an n-cs.
inline TransformResult transform_ncs_to_nccs(RankEngine& eng, const RankQuery& q, const RankCertificate& ncs) {
    const auto& sys = eng.system();
    if (static_cast<int>(ncs.witness.size()) != ncs.value || !eng.is_ncs(q, ncs.witness))
        throw InvalidCertificate("input is not an n-cs of full length");
    const ElementSet xa = sys.acl(q.a, q.n);
    const int alpha = ncs.value;
    std::vector<Pos> seq = ncs.witness;
    TransformResult out;
    out.trace.push_back(seq);
    CoordSequence& cs = out.nccs;
    cs.core_indices = {0};

    auto check_step = [&](const std::vector<Pos>& s, const ExchangeWitness& blame) {
        if (eng.is_ncs(q, s)) return;
        if (replays(eng, blame)) throw ExchangeViolation(blame);
        throw TheoremContradiction("transformation step left the n-cs invariant without an exchange failure");
    };

    int km = 0;
    while (km < alpha) {
        const ElementSet base = detail::prefix_set(seq, km) | q.b;
        const ElementSet xm = detail::rank1_part(eng, xa, base, q.n);
        int k2 = km + 1;
        while (true) {
            const ElementSet spanned = sys.closure(detail::prefix_set(seq, k2) | q.b);
            const ElementSet uncovered = xm - spanned;
            if (uncovered.empty()) break;
            if (k2 < alpha && uncovered.contains(seq[k2])) {
                ++k2;
                continue;
            }
            const Pos d = uncovered.front();
            int l = -1;
            for (int i = k2 + 1; i <= alpha; ++i) {
                if (sys.closure(detail::prefix_set(seq, i) | q.b).contains(d)) {
                    l = i;
                    break;
                }
            }
            if (l < 0) throw TheoremContradiction("an n-cs of full length misses a rank-1 element of acl_n(A)");
            // Swap d in for a_l.
            const Pos al = seq[l - 1];
            std::vector<Pos> swapped = seq;
            swapped[l - 1] = d;
            check_step(swapped,
                       ExchangeWitness{detail::prefix_set(seq, l - 1) | q.b, q.n, {al, d}});
            out.trace.push_back(swapped);
            // Move it right after the block.
            std::vector<Pos> moved(swapped.begin(), swapped.begin() + k2);
            moved.push_back(d);
            for (int i = k2; i < alpha; ++i)
                if (i != l - 1) moved.push_back(swapped[i]);
            ExchangeWitness blame{base, q.n, {d}};
            for (int j = k2; j < l - 1; ++j) {
                ElementSet pre = detail::prefix_set(swapped, j);
                if (sys.closure(pre.with(d) | q.b).contains(swapped[j])) {
                    blame = ExchangeWitness{pre | q.b, q.n, {d, swapped[j]}};
                    break;
                }
            }
            check_step(moved, blame);
            if (moved != swapped) out.trace.push_back(moved);
            seq = std::move(moved);
            ++k2;
        }
        km = k2;
        cs.core_indices.push_back(km);
    }
    cs.elements = seq;
    if (!is_nccs(eng, q, cs)) throw TheoremContradiction("transformation output is not an n-ccs");
    return out;
}

}  // namespace geoclose
