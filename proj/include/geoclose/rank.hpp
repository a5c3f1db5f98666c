#pragma once

#include <cstdlib>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "geoclose/closure_system.hpp"

namespace geoclose {

/// rk^n(A / B) query over position sets.
struct RankQuery {
    ElementSet a;
    ElementSet b;
    int n = 0;
};

/// A rank value with a witnessing n-coordinatization sequence.
struct RankCertificate {
    int value = 0;
    std::vector<Pos> witness;
    friend bool operator==(const RankCertificate&, const RankCertificate&) = default;
};

/// Priority order used wherever a choice among elements is made. Empty means
/// ascending position, which is ascending element id.
using Tiebreak = std::vector<Pos>;

inline std::optional<Pos> pick_first(ElementSet candidates, const Tiebreak& order) {
    if (candidates.empty()) return std::nullopt;
    if (order.empty()) return candidates.front();
    for (Pos p : order)
        if (candidates.contains(p)) return p;
    return candidates.front();
}

/// Candidates listed in tiebreak order.
inline std::vector<Pos> ordered(ElementSet s, const Tiebreak& order) {
    if (order.empty()) return s.to_vector();
    std::vector<Pos> out;
    for (Pos p : order)
        if (s.contains(p)) out.push_back(p);
    for (Pos p : s)
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    return out;
}

inline constexpr long long kDefaultBudget = 10'000'000;

/// Node budget for exhaustive searches; GEOCLOSE_BUDGET overrides the default.
inline long long default_budget() {
    if (const char* env = std::getenv("GEOCLOSE_BUDGET")) {
        try {
            long long v = std::stoll(env);
            if (v > 0) return v;
        } catch (const std::logic_error&) {
        }
    }
    return kDefaultBudget;
}

/// Rank computations over one system. Holds per-engine memo tables, so an
/// engine must not be shared between threads; create one per thread.
class RankEngine {
public:
    explicit RankEngine(const LeveledClosureSystem& sys, long long budget = default_budget())
        : sys_(&sys), budget_(budget) {}

    const LeveledClosureSystem& system() const { return *sys_; }
    long long budget() const { return budget_; }

    /// rk^n(A/B) by the inductive definition: the rank is positive exactly
    /// when some a ∈ acl_n(A) \ acl_n(B) exists, and then it is one more than
    /// the best rank of A over B ∪ {a}. Memoized on (acl_n(A), cl(B)), which
    /// determine the value since acl_n(A) already lies inside M_n.
    int rank_recursive(const RankQuery& q) {
        check(q);
        return rec(sys_->acl(q.a, q.n), sys_->closure(q.b));
    }
    int rank_recursive(ElementSet a, ElementSet b, int n) { return rank_recursive({a, b, n}); }

    /// Rank of a single element over a base set.
    int rank_of(Pos d, ElementSet b, int n) { return rank_recursive({ElementSet::single(d), b, n}); }

    /// Longest a_1..a_α in acl_n(A) with a_k ∉ acl_n({a_1..a_{k-1}} ∪ B), by
    /// exhaustive depth-first search. Each step recomputes the closure of the
    /// raw chosen set together with B; memoized on the chosen set.
    RankCertificate rank_by_sequences(const RankQuery& q) {
        check(q);
        const ElementSet x = sys_->acl(q.a, q.n);
        std::unordered_map<ElementSet, std::pair<int, Pos>> memo;
        long long nodes = 0;
        std::function<int(ElementSet)> longest = [&](ElementSet chosen) -> int {
            if (auto it = memo.find(chosen); it != memo.end()) return it->second.first;
            if (++nodes > budget_) throw SearchBudgetExceeded(budget_);
            const ElementSet blocked = sys_->acl(chosen | q.b, q.n);
            int best = 0;
            Pos best_next = -1;
            for (Pos a : x - blocked) {
                int v = 1 + longest(chosen.with(a));
                if (v > best) {
                    best = v;
                    best_next = a;
                }
            }
            memo.emplace(chosen, std::make_pair(best, best_next));
            return best;
        };
        RankCertificate cert;
        cert.value = longest({});
        ElementSet chosen;
        while (true) {
            const auto& [v, next] = memo.at(chosen);
            if (v == 0) break;
            cert.witness.push_back(next);
            chosen.insert(next);
        }
        return cert;
    }

    /// By descent: start from the first element of
    /// acl_n(A) \ acl_n(B) in tiebreak order; while its rank over B exceeds 1,
    /// move to an element of its own closure over which it loses exactly one
    /// unit of rank.
    std::optional<Pos> find_rank1_element(ElementSet a, ElementSet b, int n, const Tiebreak& order = {}) {
        check({a, b, n});
        const ElementSet base = sys_->closure(b);
        std::optional<Pos> cur = pick_first(sys_->acl(a, n) - base, order);
        if (!cur) return std::nullopt;
        while (true) {
            const int r = rank_of(*cur, b, n);
            if (r == 1) return cur;
            std::optional<Pos> next;
            for (Pos d : ordered(sys_->acl(ElementSet::single(*cur), n) - base, order)) {
                if (rec(sys_->acl(ElementSet::single(*cur), n), sys_->closure(b.with(d))) == r - 1) {
                    next = d;
                    break;
                }
            }
            if (!next) throw TheoremContradiction("rank-1 descent found no element losing one unit of rank");
            cur = next;
        }
    }

    struct GreedyRank {
        RankCertificate certificate;
        bool optimal = true;  // false when the greedy value is below the true rank
    };

    /// Repeatedly appends a rank-1 element of acl_n(A) over the current
    /// prefix ∪ B until acl_n(A) is covered. Exact under the exchange
    /// property; otherwise a lower bound, flagged through `optimal`.
    GreedyRank greedy_rank(const RankQuery& q, const Tiebreak& order = {}) {
        check(q);
        const ElementSet x = sys_->acl(q.a, q.n);
        GreedyRank out;
        ElementSet prefix;
        while (!x.subset_of(sys_->closure(prefix | q.b))) {
            auto d = find_rank1_element(q.a, prefix | q.b, q.n, order);
            out.certificate.witness.push_back(*d);
            prefix.insert(*d);
        }
        out.certificate.value = static_cast<int>(out.certificate.witness.size());
        out.optimal = out.certificate.value == rank_recursive(q);
        return out;
    }

    /// True iff `seq` is an n-cs for A/B: members of acl_n(A), each outside
    /// the closure of its predecessors with B, and of length rk^n(A/B).
    bool is_ncs(const RankQuery& q, const std::vector<Pos>& seq) {
        check(q);
        const ElementSet x = sys_->acl(q.a, q.n);
        ElementSet prefix;
        for (Pos p : seq) {
            if (!x.contains(p) || sys_->closure(prefix | q.b).contains(p)) return false;
            prefix.insert(p);
        }
        return static_cast<int>(seq.size()) == rank_recursive(q);
    }

    /// An n-cs of length rk^n(A/B) from the sequence oracle, with the three
    /// rank-additivity consequences re-verified on the witness.
    RankCertificate build_ncs(const RankQuery& q) {
        RankCertificate cert = rank_by_sequences(q);
        if (auto err = lemma_34_violation(q, cert)) throw TheoremContradiction(*err);
        return cert;
    }

    /// Describes the first failed additivity equality on an n-cs, if any.
    std::optional<std::string> lemma_34_violation(const RankQuery& q, const RankCertificate& cert) {
        const int alpha = cert.value;
        ElementSet prefix;
        for (int k = 1; k <= alpha; ++k) {
            const Pos ak = cert.witness[k - 1];
            if (rank_of(ak, prefix | q.b, q.n) != 1)
                return "rk(a_k / a_<k B) != 1 at k=" + std::to_string(k);
            prefix.insert(ak);
            if (rank_recursive({prefix, q.b, q.n}) != k)
                return "rk(a_1..a_k / B) != k at k=" + std::to_string(k);
            if (rank_recursive({q.a, prefix | q.b, q.n}) != alpha - k)
                return "rk(A / a_1..a_k B) != alpha-k at k=" + std::to_string(k);
        }
        if (!sys_->acl(q.a, q.n).subset_of(sys_->closure(prefix | q.b)))
            return "acl_n(A) not covered by the witness";
        return std::nullopt;
    }

    /// Extension at finite scale: search the orbit of d̄ under the pointwise
    /// stabilizer of B for d̄' with rk^n(d̄'/C) = rk^n(d̄/B). Orbit members are
    /// visited in lexicographic order.
    std::optional<std::vector<Pos>> rank_extension_search(const std::vector<Pos>& d, ElementSet b, ElementSet c,
                                                          int n) {
        const PermGroup& g = sys_->require_group();
        if (!b.subset_of(c)) throw Error("rank_extension_search requires B ⊆ C");
        const ElementSet ds = ElementSet::from_range(d);
        check({ds, c, n});
        if (!ds.subset_of(sys_->level_mask(n))) throw Error("extension tuple must lie in M_n");
        const int alpha = rank_recursive({ds, b, n});
        for (const auto& cand : g.orbit(d, b))
            if (rank_recursive({ElementSet::from_range(cand), c, n}) == alpha) return cand;
        return std::nullopt;
    }

    std::size_t memo_size() const { return memo_.size(); }

private:
    struct KeyHash {
        std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const noexcept {
            return std::hash<ElementSet>{}(ElementSet(k.first * 0x9e3779b97f4a7c15ULL ^ k.second));
        }
    };

    void check(const RankQuery& q) const {
        sys_->require_in_universe(q.a);
        sys_->require_in_universe(q.b);
        (void)sys_->level_mask(q.n);
    }

    // x ⊆ M_n, y closed.
    int rec(ElementSet x, ElementSet y) {
        if (x.subset_of(y)) return 0;
        const auto key = std::make_pair(x.bits(), y.bits());
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        int best = 0;
        for (Pos a : x - y) {
            best = std::max(best, 1 + rec(x, sys_->closure(y.with(a))));
            if (best == (x - y).size()) break;
        }
        memo_.emplace(key, best);
        return best;
    }

    const LeveledClosureSystem* sys_;
    long long budget_;
    std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, int, KeyHash> memo_;
};

}  // namespace geoclose
