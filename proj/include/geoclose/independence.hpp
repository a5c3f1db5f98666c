#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "geoclose/pregeometry.hpp"
#include "geoclose/suite.hpp"

namespace geoclose {

/// A ⫝ⁿ_C B.
struct IndependenceQuery {
    ElementSet a;
    ElementSet b;
    ElementSet c;
    int n = 0;
};

struct IndependenceResult {
    bool independent = false;
    /// Verdict of the single comparison rk^n(A/BC) = rk^n(A/C).
    bool whole_set_verdict = false;
    /// False when some A' ⊆ A disagrees with the whole-set verdict.
    bool subsets_agree = true;
    std::optional<ElementSet> failing_subset;
    RankCertificate over_c;
    RankCertificate over_bc;
};

/// Ranks rk^n(A'/X) for every A' ⊆ A, in subset enumeration order.
inline std::vector<int> rank_signature(RankEngine& eng, ElementSet a, ElementSet x, int n) {
    std::vector<int> sig;
    sig.reserve(std::size_t{1} << a.size());
    for_each_subset(a, [&](ElementSet s) { sig.push_back(eng.rank_recursive(s, x, n)); });
    return sig;
}

/// Independence with A finite: every A' ⊆ A keeps its rank when B is added.
inline bool indep_verdict(RankEngine& eng, ElementSet a, ElementSet b, ElementSet c, int n) {
    bool ok = true;
    for_each_subset(a, [&](ElementSet s) {
        if (ok && eng.rank_recursive(s, b | c, n) != eng.rank_recursive(s, c, n)) ok = false;
    });
    return ok;
}

inline IndependenceResult indep(RankEngine& eng, const IndependenceQuery& q) {
    IndependenceResult r;
    r.over_c = eng.build_ncs({q.a, q.c, q.n});
    r.over_bc = eng.build_ncs({q.a, q.b | q.c, q.n});
    r.whole_set_verdict = r.over_c.value == r.over_bc.value;
    r.independent = true;
    for_each_subset(q.a, [&](ElementSet s) {
        if (r.independent && eng.rank_recursive(s, q.b | q.c, q.n) != eng.rank_recursive(s, q.c, q.n)) {
            r.independent = false;
            r.failing_subset = s;
        }
    });
    r.subsets_agree = r.independent == r.whole_set_verdict;
    return r;
}

namespace detail {

/// Signatures of pool sets over closed bases, cached per engine and level.
class SignatureTable {
public:
    SignatureTable(RankEngine& eng, int n) : eng_(&eng), n_(n) {}
    const std::vector<int>& get(ElementSet a, ElementSet closed_base) {
        auto key = std::make_pair(a.bits(), closed_base.bits());
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        return cache_.emplace(key, rank_signature(*eng_, a, closed_base, n_)).first->second;
    }
    /// A ⫝ⁿ_C B from closed sets cl(C) and cl(B ∪ C).
    bool indep(ElementSet a, ElementSet closed_c, ElementSet closed_bc) {
        return closed_c == closed_bc || get(a, closed_c) == get(a, closed_bc);
    }

private:
    struct Hash {
        std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const noexcept {
            return std::hash<ElementSet>{}(ElementSet(k.first * 0x9e3779b97f4a7c15ULL ^ k.second));
        }
    };
    RankEngine* eng_;
    int n_;
    std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, std::vector<int>, Hash> cache_;
};

struct Chain {
    ElementSet b, c, d;  // closures of a raw chain B ⊆ C ⊆ D
    bool operator<(const Chain& o) const {
        return std::tie(b, c, d) < std::tie(o.b, o.c, o.d);
    }
    bool operator==(const Chain& o) const = default;
};

inline std::vector<Chain> closure_chains(const LeveledClosureSystem& sys, const std::vector<ElementSet>& pool) {
    std::vector<Chain> out;
    for (ElementSet d : pool)
        for_each_subset(d, [&](ElementSet c) {
            for_each_subset(c, [&](ElementSet b) { out.push_back({sys.closure(b), sys.closure(c), sys.closure(d)}); });
        });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace detail

/// Monotonicity: B ⊆ C ⊆ D and A ⫝_B D give A ⫝_B C and A ⫝_C D.
/// Chains are taken over raw pool sets and reduced to their closures.
inline AxiomReport suite_monotonicity(const LeveledClosureSystem& sys, const SuiteConfig& cfg) {
    const auto pool = set_pool(sys, cfg, sys.universe(), 10);
    const auto chains = detail::closure_chains(sys, pool);
    const auto levels = cfg.levels_of(sys);
    return run_items(sys, cfg, "monotonicity", levels.size(), [&](std::size_t li, RankEngine& eng) {
        AxiomReport r;
        const int n = levels[li];
        detail::SignatureTable sig(eng, n);
        for (ElementSet a : pool) {
            for (const auto& ch : chains) {
                ++r.checked;
                if (!sig.indep(a, ch.b, ch.d)) continue;
                if (!sig.indep(a, ch.b, ch.c) || !sig.indep(a, ch.c, ch.d)) {
                    ++r.failures;
                    r.witnesses.push_back({"monotonicity", n, {{"A", a}, {"B", ch.b}, {"C", ch.c}, {"D", ch.d}}, {}});
                }
            }
        }
        return r;
    });
}

/// Transitivity, both directions: A ⫝_B D iff A ⫝_B C and A ⫝_C D.
inline AxiomReport suite_transitivity(const LeveledClosureSystem& sys, const SuiteConfig& cfg) {
    const auto pool = set_pool(sys, cfg, sys.universe(), 10);
    const auto chains = detail::closure_chains(sys, pool);
    const auto levels = cfg.levels_of(sys);
    return run_items(sys, cfg, "transitivity", levels.size(), [&](std::size_t li, RankEngine& eng) {
        AxiomReport r;
        const int n = levels[li];
        detail::SignatureTable sig(eng, n);
        for (ElementSet a : pool) {
            for (const auto& ch : chains) {
                ++r.checked;
                const bool whole = sig.indep(a, ch.b, ch.d);
                const bool parts = sig.indep(a, ch.b, ch.c) && sig.indep(a, ch.c, ch.d);
                if (whole != parts) {
                    ++r.failures;
                    r.witnesses.push_back({"transitivity", n, {{"A", a}, {"B", ch.b}, {"C", ch.c}, {"D", ch.d}}, {}});
                }
            }
        }
        return r;
    });
}

/// Finite character: a dependence A ⫝̸_C B is already witnessed by some
/// A' ⊆ A and B' ⊆ B. The smallest such B' is recorded in the statistics.
inline AxiomReport suite_finite_character(const LeveledClosureSystem& sys, const SuiteConfig& cfg) {
    const auto pool = set_pool(sys, cfg, sys.universe(), 11);
    const auto classes = closure_classes(sys, pool);
    const auto levels = cfg.levels_of(sys);
    return run_items(sys, cfg, "finite-character", levels.size() * pool.size(), [&](std::size_t item,
                                                                                     RankEngine& eng) {
        AxiomReport r;
        const int n = levels[item / pool.size()];
        const ElementSet a = pool[item % pool.size()];
        // A' ⊆ A is covered by the signature of A, so only B' is searched.
        detail::SignatureTable sig(eng, n);
        for (ElementSet b : pool) {
            for (ElementSet c : classes) {
                if (sig.indep(a, c, sys.closure(b | c))) continue;
                ++r.checked;
                bool found = false;
                for (ElementSet bp : subsets_up_to(b, b.size())) {
                    if (!sig.indep(a, c, sys.closure(bp | c))) {
                        found = true;
                        break;
                    }
                }
                if (!found) {
                    ++r.failures;
                    r.witnesses.push_back({"finite-character", n, {{"A", a}, {"B", b}, {"C", c}}, {}});
                }
            }
        }
        return r;
    });
}

/// Locality: for finite A and B there is C ⊆ B with A ⫝_C B.
inline AxiomReport suite_locality(const LeveledClosureSystem& sys, const SuiteConfig& cfg) {
    const auto pool = set_pool(sys, cfg, sys.universe(), 12);
    const auto levels = cfg.levels_of(sys);
    return run_items(sys, cfg, "locality", levels.size() * pool.size(), [&](std::size_t item, RankEngine& eng) {
        AxiomReport r;
        const int n = levels[item / pool.size()];
        const ElementSet a = pool[item % pool.size()];
        for (ElementSet b : pool) {
            ++r.checked;
            bool found = false;
            for (ElementSet c : subsets_up_to(b, b.size())) {
                if (indep_verdict(eng, a, b, c, n)) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                ++r.failures;
                r.witnesses.push_back({"locality", n, {{"A", a}, {"B", b}}, {}});
            }
        }
        return r;
    });
}

/// Group elements to test against: all of them for small groups, otherwise
/// the generators and a seeded sample.
inline std::vector<const Perm*> sample_automorphisms(const PermGroup& g, std::uint64_t seed, std::size_t cap = 64) {
    std::vector<const Perm*> out;
    if (g.order() <= cap) {
        for (const Perm& p : g.elements()) out.push_back(&p);
        return out;
    }
    for (const Perm& gen : g.generators())
        for (const Perm& p : g.elements())
            if (p == gen) out.push_back(&p);
    std::mt19937_64 rng(splitmix64(seed + 5));
    std::uniform_int_distribution<std::size_t> pick(0, g.order() - 1);
    while (out.size() < cap) out.push_back(&g.elements()[pick(rng)]);
    return out;
}

/// Invariance under automorphisms, standing in for elementary maps.
inline AxiomReport suite_invariance(const LeveledClosureSystem& sys, const SuiteConfig& cfg) {
    const PermGroup& g = sys.require_group();
    const auto sigmas = sample_automorphisms(g, cfg.seed, 24);
    const auto pool = set_pool(sys, cfg, sys.universe(), 13);
    const auto levels = cfg.levels_of(sys);
    const std::size_t side = std::min<std::size_t>(pool.size(), 24);
    return run_items(sys, cfg, "invariance", levels.size() * pool.size(), [&](std::size_t item, RankEngine& eng) {
        AxiomReport r;
        const int n = levels[item / pool.size()];
        const ElementSet a = pool[item % pool.size()];
        for (std::size_t bi = 0; bi < side; ++bi) {
            for (std::size_t ci = 0; ci < side; ++ci) {
                const ElementSet b = pool[(bi * 7 + item) % pool.size()], c = pool[(ci * 13 + item) % pool.size()];
                const bool v = indep_verdict(eng, a, b, c, n);
                for (const Perm* s : sigmas) {
                    ++r.checked;
                    if (indep_verdict(eng, apply(*s, a), apply(*s, b), apply(*s, c), n) != v) {
                        ++r.failures;
                        r.witnesses.push_back({"invariance", n, {{"A", a}, {"B", b}, {"C", c}}, {}});
                    }
                }
            }
        }
        return r;
    });
}

/// Extension: for ā ⊆ M_n and B ⊆ C, some ā' in the orbit of ā over B has
/// ā' ⫝ⁿ_B C. A miss is reported as not witnessed, never as a failure.
inline AxiomReport suite_extension(const LeveledClosureSystem& sys, const SuiteConfig& cfg) {
    const PermGroup& g = sys.require_group();
    const auto levels = cfg.levels_of(sys);
    const auto pool = set_pool(sys, cfg, sys.universe(), 14);
    const std::size_t cap = std::min<std::size_t>(pool.size(), 40);
    return run_items(sys, cfg, "extension", levels.size(), [&](std::size_t li, RankEngine& eng) {
        AxiomReport r;
        const int n = levels[li];
        const auto tuples = set_pool(sys, cfg, sys.level_mask(n), 15 + n);
        for (ElementSet a : tuples) {
            if (a.empty() || a.size() > 2) continue;
            const std::vector<Pos> abar = a.to_vector();
            for (std::size_t bi = 0; bi < cap; ++bi) {
                const ElementSet b = pool[bi];
                for (ElementSet c : pool) {
                    if (!b.subset_of(c)) continue;
                    ++r.checked;
                    bool found = false;
                    for (const auto& img : g.orbit(abar, b)) {
                        if (indep_verdict(eng, ElementSet::from_range(img), c, b, n)) {
                            found = true;
                            break;
                        }
                    }
                    if (!found) {
                        ++r.not_witnessed;
                        if (r.witnesses.size() < cfg.witness_cap)
                            r.witnesses.push_back({"extension-not-witnessed", n, {{"A", a}, {"B", b}, {"C", c}}, {}});
                    }
                }
            }
        }
        return r;
    });
}

/// Symmetry restricted to M_n: A ⫝̸ⁿ_C B with B ⊆ M_n implies B ⫝̸ⁿ_C A.
/// Also checks the rank form rk(A/BC) < rk(A/C) ⇒ rk(B/AC) < rk(B/C).
/// Failures are plain data here; callers decide whether they contradict a
/// theorem (they do exactly when exchange holds at n).
inline AxiomReport suite_symmetry(const LeveledClosureSystem& sys, const SuiteConfig& cfg, int n) {
    const auto pool = set_pool(sys, cfg, sys.universe(), 16);
    const auto bpool = set_pool(sys, cfg, sys.level_mask(n), 17);
    const auto classes = closure_classes(sys, pool);
    return run_items(sys, cfg, "symmetry", pool.size(), [&](std::size_t i, RankEngine& eng) {
        AxiomReport r;
        const ElementSet a = pool[i];
        for (ElementSet b : bpool) {
            for (ElementSet c : classes) {
                ++r.checked;
                const bool ab = indep_verdict(eng, a, b, c, n);
                const bool ba = indep_verdict(eng, b, a, c, n);
                const int a_bc = eng.rank_recursive(a, b | c, n), a_c = eng.rank_recursive(a, c, n);
                const int b_ac = eng.rank_recursive(b, a | c, n), b_c = eng.rank_recursive(b, c, n);
                const bool rank_form = !(a_bc < a_c) || b_ac < b_c;
                if ((!ab && ba) || !rank_form) {
                    ++r.failures;
                    r.witnesses.push_back({"symmetry", n, {{"A", a}, {"B", b}, {"C", c}},
                                           {{"rkA/BC", a_bc}, {"rkA/C", a_c}, {"rkB/AC", b_ac}, {"rkB/C", b_c}}});
                }
            }
        }
        return r;
    });
}

// ---------------------------------------------------------------------------
// Soft elimination of imaginaries

/// For each element e, a real set R with cl({e}) = cl(R), if one exists.
/// The only candidate that needs testing is the shrink of cl({e}) ∩ M_0:
/// any valid R lies inside it, and supersets of a valid R inside it stay
/// valid.
inline std::optional<ElementSet> soft_ei_witness(const LeveledClosureSystem& sys, Pos e) {
    const ElementSet target = sys.closure(ElementSet::single(e));
    ElementSet r = target & sys.reals();
    if (sys.closure(r) != target) return std::nullopt;
    for (Pos p : r)
        if (sys.closure(r.without(p)) == target) r.erase(p);
    return r;
}

/// Checks soft elimination for every element, throwing NotSoftEI on the
/// first element without a witness.
inline std::vector<ElementSet> verify_soft_ei(const LeveledClosureSystem& sys) {
    std::vector<ElementSet> out;
    for (Pos e = 0; e < sys.size(); ++e) {
        auto w = soft_ei_witness(sys, e);
        if (!w) throw NotSoftEI(e);
        out.push_back(*w);
    }
    return out;
}

/// ⫝ⁿ agrees with ⫝⁰ at every level, and ranks of pool sets agree with
/// their level-0 rank, on a system with soft elimination.
inline AxiomReport softEI_collapse_check(const LeveledClosureSystem& sys, const SuiteConfig& cfg) {
    (void)verify_soft_ei(sys);
    const auto pool = set_pool(sys, cfg, sys.universe(), 18);
    const auto classes = closure_classes(sys, pool);
    return run_items(sys, cfg, "soft-ei-collapse", pool.size(), [&](std::size_t i, RankEngine& eng) {
        AxiomReport r;
        const ElementSet a = pool[i];
        for (ElementSet b : pool) {
            for (ElementSet c : classes) {
                const bool base = indep_verdict(eng, a, b, c, 0);
                for (int n = 1; n <= sys.max_level(); ++n) {
                    ++r.checked;
                    if (indep_verdict(eng, a, b, c, n) != base ||
                        eng.rank_recursive(a, b | c, n) != eng.rank_recursive(a, b | c, 0)) {
                        ++r.failures;
                        r.witnesses.push_back({"soft-ei-collapse", n, {{"A", a}, {"B", b}, {"C", c}}, {}});
                    }
                }
            }
        }
        return r;
    });
}

}  // namespace geoclose
