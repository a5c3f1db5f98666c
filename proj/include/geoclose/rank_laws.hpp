#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geoclose/coordination.hpp"
#include "geoclose/suite.hpp"

namespace geoclose {

/// Smallest B' ⊆ B (by size, then lexicographically) with rk^n(A/B') = rk^n(A/B).
inline ElementSet minimal_rank_base(RankEngine& eng, ElementSet a, ElementSet b, int n) {
    const int target = eng.rank_recursive(a, b, n);
    for (ElementSet s : subsets_up_to(b, b.size()))
        if (eng.rank_recursive(a, s, n) == target) return s;
    return b;
}

/// rank_recursive against rank_by_sequences on every pool pair at every
/// level, plus the bound rk ≤ |acl_n(A)|. Queries are deduplicated on
/// (acl_n(A), cl(B)); the first raw representative is the one evaluated.
inline AxiomReport check_oracle_agreement(const LeveledClosureSystem& sys, const SuiteConfig& cfg) {
    const auto pool = set_pool(sys, cfg, sys.universe(), 1);
    const auto levels = cfg.levels_of(sys);
    return run_items(sys, cfg, "oracle-agreement", levels.size() * pool.size(), [&](std::size_t item, RankEngine& eng) {
        AxiomReport r;
        const int n = levels[item / pool.size()];
        const ElementSet a = pool[item % pool.size()];
        const ElementSet xa = sys.acl(a, n);
        std::vector<ElementSet> seen;
        for (ElementSet b : pool) {
            const ElementSet cb = sys.closure(b);
            if (std::find(seen.begin(), seen.end(), cb) != seen.end()) continue;
            seen.push_back(cb);
            ++r.checked;
            const int rec = eng.rank_recursive(a, b, n);
            const RankCertificate cert = eng.rank_by_sequences({a, b, n});
            if (rec != cert.value || cert.value > xa.size() || !eng.is_ncs({a, b, n}, cert.witness)) {
                ++r.failures;
                r.witnesses.push_back({"oracle-mismatch", n, {{"A", a}, {"B", b}},
                                       {{"recursive", rec}, {"sequences", cert.value}}, cert.witness});
            }
        }
        return r;
    });
}

/// Rank laws (a)-(d), locality, level monotonicity and, when a group is
/// present, type-determinacy. A ranges over the pool, B over subsets of A
/// where containment matters, and C, D over the pool.
inline std::vector<AxiomReport> check_rank_laws(const LeveledClosureSystem& sys, const SuiteConfig& cfg,
                                                bool modular = false) {
    const auto pool = set_pool(sys, cfg, sys.universe(), 2);
    const auto classes = closure_classes(sys, pool);
    const auto levels = cfg.levels_of(sys);
    const std::size_t items = levels.size() * pool.size();
    auto at = [&](std::size_t item) { return std::make_pair(levels[item / pool.size()], pool[item % pool.size()]); };
    std::vector<AxiomReport> out;

    out.push_back(run_items(sys, cfg, "rank-self-zero", items, [&](std::size_t i, RankEngine& eng) {
        AxiomReport r;
        auto [n, a] = at(i);
        ++r.checked;
        if (eng.rank_recursive(a, a, n) != 0) {
            ++r.failures;
            r.witnesses.push_back({"rk(A/A) != 0", n, {{"A", a}}, {}});
        }
        return r;
    }));

    out.push_back(run_items(sys, cfg, "rank-monotone-in-A", items, [&](std::size_t i, RankEngine& eng) {
        AxiomReport r;
        auto [n, a] = at(i);
        for_each_subset(a, [&](ElementSet b) {
            for (ElementSet c : classes) {
                ++r.checked;
                const int ra = eng.rank_recursive(a, c, n), rb = eng.rank_recursive(b, c, n);
                if (ra < rb) {
                    ++r.failures;
                    r.witnesses.push_back({"rk(A/C) < rk(B/C)", n, {{"A", a}, {"B", b}, {"C", c}},
                                           {{"rkA", ra}, {"rkB", rb}}});
                }
            }
        });
        return r;
    }));

    out.push_back(run_items(sys, cfg, "rank-antitone-in-base", items, [&](std::size_t i, RankEngine& eng) {
        AxiomReport r;
        auto [n, a] = at(i);
        for (ElementSet d : pool) {
            for_each_subset(d, [&](ElementSet c) {
                ++r.checked;
                const int rc = eng.rank_recursive(a, c, n), rd = eng.rank_recursive(a, d, n);
                if (rc < rd) {
                    ++r.failures;
                    r.witnesses.push_back({"rk(A/C) < rk(A/D)", n, {{"A", a}, {"C", c}, {"D", d}},
                                           {{"rkC", rc}, {"rkD", rd}}});
                }
            });
        }
        return r;
    }));

    out.push_back(run_items(sys, cfg, modular ? "rank-modularity" : "rank-superadditive", items,
                            [&](std::size_t i, RankEngine& eng) {
        AxiomReport r;
        auto [n, a] = at(i);
        for_each_subset(a, [&](ElementSet b) {
            for (ElementSet c : classes) {
                ++r.checked;
                const int lhs = eng.rank_recursive(a, c, n);
                const int rb = eng.rank_recursive(b, c, n);
                const int rab = eng.rank_recursive(a, b | c, n);
                if (lhs < rb + rab || (modular && lhs != rb + rab)) {
                    ++r.failures;
                    r.witnesses.push_back({modular ? "rk(A/C) != rk(B/C) + rk(A/BC)" : "rk(A/C) < rk(B/C) + rk(A/BC)",
                                           n, {{"A", a}, {"B", b}, {"C", c}},
                                           {{"rkA/C", lhs}, {"rkB/C", rb}, {"rkA/BC", rab}}});
                }
            }
        });
        return r;
    }));

    out.push_back(run_items(sys, cfg, "rank-locality", items, [&](std::size_t i, RankEngine& eng) {
        AxiomReport r;
        auto [n, a] = at(i);
        for (ElementSet b : pool) {
            ++r.checked;
            const ElementSet bp = minimal_rank_base(eng, a, b, n);
            if (!bp.subset_of(b) || eng.rank_recursive(a, bp, n) != eng.rank_recursive(a, b, n)) {
                ++r.failures;
                r.witnesses.push_back({"no finite B' with equal rank", n, {{"A", a}, {"B", b}}, {}});
            }
            // Part (i): a strict drop over C ⊇ B is caused by a subset of C.
            for (ElementSet c : pool) {
                if (!b.subset_of(c)) continue;
                const int rb = eng.rank_recursive(a, b, n);
                if (eng.rank_recursive(a, c, n) >= rb) continue;
                ++r.checked;
                bool found = false;
                for_each_subset(c, [&](ElementSet cp) {
                    if (!found && eng.rank_recursive(a, b | cp, n) < rb) found = true;
                });
                if (!found) {
                    ++r.failures;
                    r.witnesses.push_back({"no finite C' causing the drop", n, {{"A", a}, {"B", b}, {"C", c}}, {}});
                }
            }
        }
        return r;
    }));

    out.push_back(run_items(sys, cfg, "rank-level-monotone", pool.size(), [&](std::size_t i, RankEngine& eng) {
        AxiomReport r;
        const ElementSet a = pool[i];
        for (ElementSet c : classes) {
            for (int n = 0; n < sys.max_level(); ++n) {
                ++r.checked;
                const int lo = eng.rank_recursive(a, c, n), hi = eng.rank_recursive(a, c, n + 1);
                if (lo > hi) {
                    ++r.failures;
                    r.witnesses.push_back({"rk^n > rk^{n+1}", n, {{"A", a}, {"C", c}}, {{"low", lo}, {"high", hi}}});
                }
            }
        }
        return r;
    }));

    if (sys.has_group()) {
        const PermGroup& g = sys.group().value();
        std::vector<const Perm*> sigmas;
        if (g.order() <= 64) {
            for (const Perm& p : g.elements()) sigmas.push_back(&p);
        } else {
            std::mt19937_64 rng(splitmix64(cfg.seed + 7));
            std::uniform_int_distribution<std::size_t> pick(0, g.order() - 1);
            for (int k = 0; k < 32; ++k) sigmas.push_back(&g.elements()[pick(rng)]);
        }
        out.push_back(run_items(sys, cfg, "rank-type-determinacy", items, [&](std::size_t i, RankEngine& eng) {
            AxiomReport r;
            auto [n, a] = at(i);
            for (ElementSet b : pool) {
                const int base = eng.rank_recursive(a, b, n);
                for (const Perm* s : sigmas) {
                    ++r.checked;
                    const int moved = eng.rank_recursive(apply(*s, a), apply(*s, b), n);
                    if (moved != base) {
                        ++r.failures;
                        r.witnesses.push_back({"rank changed under automorphism", n, {{"A", a}, {"B", b}},
                                               {{"rk", base}, {"rkImage", moved}}});
                    }
                }
            }
            return r;
        }));
    }
    return out;
}

/// Theorem-level checks on a level where exchange holds: every n-ccs has
/// rank length, several independently built n-ccs agree on core indices and
/// prefix closures, long n-ccs are n-cs, the chain decomposition holds, and
/// the transformation from an n-cs succeeds.
inline std::vector<AxiomReport> check_coordination(const LeveledClosureSystem& sys, const SuiteConfig& cfg, int n) {
    const auto pool = set_pool(sys, cfg, sys.universe(), 3);
    const auto classes = closure_classes(sys, pool);
    std::vector<Tiebreak> orders;
    orders.emplace_back();
    Tiebreak desc;
    for (Pos p = sys.size() - 1; p >= 0; --p) desc.push_back(p);
    orders.push_back(desc);
    {
        Tiebreak shuffled = identity_perm(sys.size());
        std::mt19937_64 rng(splitmix64(cfg.seed + 11));
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        orders.push_back(shuffled);
    }
    std::vector<AxiomReport> out;

    out.push_back(run_items(sys, cfg, "nccs-length-and-uniqueness", pool.size(), [&](std::size_t i,
                                                                                      RankEngine& eng) {
        AxiomReport r;
        const ElementSet a = pool[i];
        for (ElementSet c : classes) {
            ++r.checked;
            const RankQuery q{a, c, n};
            const int alpha = eng.rank_recursive(q);
            std::vector<CoordSequence> built;
            for (const auto& ord : orders) built.push_back(build_nccs(eng, q, ord));
            built.push_back(transform_ncs_to_nccs(eng, q, eng.build_ncs(q)).nccs);
            bool ok = true;
            for (const auto& cs : built) {
                ok = ok && static_cast<int>(cs.elements.size()) == alpha && is_nccs(eng, q, cs) &&
                     eng.is_ncs(q, cs.elements) && cs.core_indices == built.front().core_indices;
                if (!ok) break;
                for (int k : cs.core_indices) {
                    const ElementSet mine = sys.closure(detail::prefix_set(cs.elements, k) | c);
                    const ElementSet first = sys.closure(detail::prefix_set(built.front().elements, k) | c);
                    ok = ok && mine == first;
                }
            }
            if (!ok) {
                ++r.failures;
                r.witnesses.push_back({"n-ccs disagreement", n, {{"A", a}, {"B", c}}, {{"rank", alpha}},
                                       built.front().elements});
            }
        }
        return r;
    }));

    out.push_back(run_items(sys, cfg, "chain-decomposition", pool.size(), [&](std::size_t i, RankEngine& eng) {
        AxiomReport r;
        const std::vector<Pos> t = pool[i].to_vector();
        for (ElementSet c : classes) {
            ++r.checked;
            int sum = 0, bound = 0;
            ElementSet pre;
            for (Pos p : t) {
                sum += eng.rank_of(p, pre | c, n);
                bound += eng.rank_of(p, c, n);
                pre.insert(p);
            }
            const int total = eng.rank_recursive(pool[i], c, n);
            if (total != sum || sum > bound) {
                ++r.failures;
                r.witnesses.push_back({"chain sum differs from rank", n, {{"A", pool[i]}, {"C", c}},
                                       {{"rank", total}, {"sum", sum}, {"bound", bound}}});
            }
        }
        return r;
    }));

    out.push_back(run_items(sys, cfg, "nccs-base-transfer", pool.size(), [&](std::size_t i, RankEngine& eng) {
        AxiomReport r;
        const ElementSet b = pool[i];
        for (ElementSet c : classes) {
            for (ElementSet a : pool) {
                if (a.size() > 1) break;
                const ElementSet ac = sys.closure(a | c);
                const int over_ac = eng.rank_recursive(b, ac, n), over_c = eng.rank_recursive(b, c, n);
                if (over_ac != over_c) continue;
                ++r.checked;
                const CoordSequence s1 = build_nccs(eng, {b, ac, n});
                const CoordSequence s2 = build_nccs(eng, {b, c, n});
                if (!is_nccs(eng, {b, c, n}, s1) || !is_nccs(eng, {b, ac, n}, s2)) {
                    ++r.failures;
                    r.witnesses.push_back({"n-ccs does not transfer between equal-rank bases", n,
                                           {{"B", b}, {"A", a}, {"C", c}}, {{"rank", over_c}}});
                }
            }
        }
        return r;
    }));
    return out;
}

}  // namespace geoclose
