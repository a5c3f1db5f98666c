#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geoclose/independence.hpp"
#include "geoclose/pregeometry.hpp"

namespace geoclose {

/// Solution sets of a formula φ(x, ā), keyed by parameter tuple. The
/// parameter tuples form a union of orbits of the pointwise stabilizer of
/// `stabilizer_of`, and fibers move with the parameters.
struct DefinableFamily {
    std::string name;
    ElementSet stabilizer_of;
    std::map<std::vector<Pos>, ElementSet> fibers;

    bool has(const std::vector<Pos>& a) const { return fibers.count(a) > 0; }
    const ElementSet& fiber(const std::vector<Pos>& a) const {
        auto it = fibers.find(a);
        if (it == fibers.end()) throw ParameterUnknown("parameter tuple not in the family");
        return it->second;
    }
};

/// Throws RelationNotInvariant unless the parameters are closed under the
/// stabilizer and fiber(σā) = σ(fiber(ā)).
inline void validate_family(const LeveledClosureSystem& sys, const DefinableFamily& fam) {
    const PermGroup& g = sys.require_group();
    for (const auto& [a, f] : fam.fibers) {
        for (Pos p : a) sys.require_in_universe(ElementSet::single(p));
        sys.require_in_universe(f);
    }
    for (const Perm* s : g.pointwise_stabilizer(fam.stabilizer_of)) {
        for (const auto& [a, f] : fam.fibers) {
            auto it = fam.fibers.find(apply(*s, a));
            if (it == fam.fibers.end()) throw RelationNotInvariant("family parameters are not closed under the stabilizer");
            if (it->second != apply(*s, f)) throw RelationNotInvariant("family fibers are not equivariant");
        }
    }
}

/// The family "x ∈ class p" on an equivalence example: parameters are the
/// class elements, fibers their member reals.
inline DefinableFamily class_membership_family(const LeveledClosureSystem& sys) {
    DefinableFamily fam;
    fam.name = "class-membership";
    for (Pos p = 0; p < sys.size(); ++p) {
        if (sys.element(p).level != 1) continue;
        ElementSet members;
        for (Pos r : sys.reals())
            if (sys.closure(ElementSet::single(r)).contains(p)) members.insert(r);
        fam.fibers[{p}] = members;
    }
    return fam;
}

struct DividingResult {
    bool divides = false;
    std::size_t orbit_size = 0;
    int threshold = 0;
    bool k_inconsistent = false;
};

/// The orbit of ā under Stab(C ∪ stabilizer_of) has more than `threshold`
/// members (default |C| + 1) and no element lies in k of its fibers.
inline DividingResult strongly_divides_detail(const LeveledClosureSystem& sys, const DefinableFamily& fam,
                                              const std::vector<Pos>& a, ElementSet c, int k,
                                              std::optional<int> threshold = std::nullopt) {
    const PermGroup& g = sys.require_group();
    if (!fam.has(a)) throw ParameterUnknown("parameter tuple not in the family");
    sys.require_in_universe(c);
    if (k < 1) throw Error("k must be at least 1");
    DividingResult r;
    r.threshold = threshold ? *threshold : c.size() + 1;
    const auto orbit = g.orbit(a, c | fam.stabilizer_of);
    r.orbit_size = orbit.size();
    std::vector<int> count(sys.size(), 0);
    int worst = 0;
    for (const auto& b : orbit)
        for (Pos x : fam.fiber(b)) worst = std::max(worst, ++count[x]);
    r.k_inconsistent = worst < k;
    r.divides = static_cast<int>(r.orbit_size) > r.threshold && r.k_inconsistent;
    return r;
}

inline bool strongly_divides(const LeveledClosureSystem& sys, const DefinableFamily& fam, const std::vector<Pos>& a,
                             ElementSet c, int k, std::optional<int> threshold = std::nullopt) {
    return strongly_divides_detail(sys, fam, a, c, k, threshold).divides;
}

struct ProbeConfig {
    int k = 2;
    std::optional<int> threshold;
    int max_base_size = 2;
    std::size_t witness_cap = 16;
    std::uint64_t seed = 0;
};

/// For every base C up to the size bound, parameter b and x ∈ fiber(b) with
/// φ(x, b) strongly dividing over C: b ⊆ cl({x} ∪ C') and b ⊄ cl(C'), with
/// C' = C ∪ stabilizer_of. Disagreements are reported, not thrown.
inline AxiomReport strong_dividing_implies_acl(const LeveledClosureSystem& sys, const DefinableFamily& fam,
                                               const ProbeConfig& cfg = {}) {
    AxiomReport rep;
    rep.axiom = "strong-dividing-acl";
    rep.seed = cfg.seed;
    sys.require_group();
    for (ElementSet c : subsets_up_to(sys.universe(), cfg.max_base_size)) {
        const ElementSet base = c | fam.stabilizer_of;
        const ElementSet over_c = sys.closure(base);
        for (const auto& [b, fiber] : fam.fibers) {
            if (!strongly_divides(sys, fam, b, c, cfg.k, cfg.threshold)) continue;
            const ElementSet bs = ElementSet::from_range(b);
            for (Pos x : fiber) {
                ++rep.checked;
                const bool in_xc = bs.subset_of(sys.closure(base.with(x)));
                const bool in_c = bs.subset_of(over_c);
                if (in_xc && !in_c) continue;
                ++rep.failures;
                if (rep.witnesses.size() < cfg.witness_cap)
                    rep.witnesses.push_back(
                        {"strong-dividing-acl", 0, {{"C", c}, {"x", ElementSet::single(x)}, {"b", bs}},
                         {{"in_cl_xC", in_xc}, {"in_cl_C", in_c}}, b});
            }
        }
    }
    rep.finish();
    return rep;
}

/// Strong dividing over C ∪ D for some D of size ≤ bound, searched by size
/// then lexicographically. The threshold follows the enlarged base unless
/// given explicitly. Returns the first such D.
inline std::optional<std::vector<Pos>> thorn_divides_bounded(const LeveledClosureSystem& sys, const DefinableFamily& fam,
                                                             const std::vector<Pos>& a, ElementSet c, int k,
                                                             int witness_bound, std::optional<int> threshold = std::nullopt,
                                                             long long budget = default_budget()) {
    if (witness_bound < 0 || witness_bound > kMaxUniverse) throw Error("witness bound out of range");
    long long nodes = 0;
    const ElementSet rest = sys.universe() - c;
    for (int size = 0; size <= witness_bound; ++size) {
        std::optional<std::vector<Pos>> found;
        for_each_subset_of_size(rest, size, [&](ElementSet d) {
            if (found) return;
            if (++nodes > budget) throw SearchBudgetExceeded(budget);
            if (strongly_divides(sys, fam, a, c | d, k, threshold)) found = d.to_vector();
        });
        if (found) return found;
    }
    return std::nullopt;
}

/// One disjunct ψ(x, b̄) of a user-supplied finite list.
struct Disjunct {
    const DefinableFamily* family = nullptr;
    std::vector<Pos> parameter;
};

struct ThornForkResult {
    bool covered = false;
    bool forks = false;
    std::vector<std::optional<std::vector<Pos>>> witnesses;
};

/// φ(x, ā) thorn-forks over C against the given disjuncts: its fiber lies in
/// the union of the disjunct fibers and each disjunct thorn-divides over C.
inline ThornForkResult thorn_forks(const LeveledClosureSystem& sys, const DefinableFamily& fam, const std::vector<Pos>& a,
                                   const std::vector<Disjunct>& disjuncts, ElementSet c, int k, int witness_bound,
                                   std::optional<int> threshold = std::nullopt) {
    ThornForkResult r;
    ElementSet cover;
    for (const Disjunct& d : disjuncts) cover |= d.family->fiber(d.parameter);
    r.covered = fam.fiber(a).subset_of(cover);
    r.forks = r.covered;
    for (const Disjunct& d : disjuncts) {
        r.witnesses.push_back(thorn_divides_bounded(sys, *d.family, d.parameter, c, k, witness_bound, threshold));
        if (!r.witnesses.back()) r.forks = false;
    }
    return r;
}

/// For a, b ∈ M_n and pooled C with b ∈ acl_n(aC) \ acl_n(C): a ⫝̸ⁿ_C b.
/// Requires exchange at level n; a violation throws TheoremContradiction.
inline AxiomReport dependence_bridge_check(const LeveledClosureSystem& sys, const SuiteConfig& cfg, int n) {
    {
        RankEngine eng(sys, cfg.budget);
        if (auto w = check_exchange_all(eng, n)) throw ExchangeViolation(*w);
    }
    const ElementSet mn = sys.level_mask(n);
    const auto bases = closure_classes(sys, set_pool(sys, cfg, sys.universe(), 0x6b));
    const std::vector<Pos> pts = mn.to_vector();
    AxiomReport rep = run_items(sys, cfg, "dependence-bridge", bases.size(), [&](std::size_t i, RankEngine& eng) {
        AxiomReport part;
        const ElementSet c = bases[i];
        const ElementSet over_c = sys.acl(c, n);
        for (Pos a : pts) {
            const ElementSet over_ac = sys.acl(c.with(a), n);
            for (Pos b : pts) {
                if (!over_ac.contains(b) || over_c.contains(b)) continue;
                ++part.checked;
                if (indep_verdict(eng, ElementSet::single(a), ElementSet::single(b), c, n))
                    throw TheoremContradiction("rank-1 dependence without forking: a=" + sys.name_of(a) +
                                               " b=" + sys.name_of(b));
            }
        }
        return part;
    });
    return rep;
}

}  // namespace geoclose
