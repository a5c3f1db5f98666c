#pragma once

#include <map>
#include <optional>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "geoclose/independence.hpp"
#include "geoclose/pregeometry.hpp"

namespace geoclose {

namespace detail {

inline std::string letter_label(int i) {
    if (i < 26) return std::string(1, static_cast<char>('a' + i));
    return "p" + std::to_string(i);
}

inline std::vector<std::vector<long long>> ids_of_perms(const LeveledClosureSystem& sys) {
    std::vector<std::vector<long long>> out;
    if (!sys.group()) return out;
    for (const Perm& g : sys.group()->generators()) {
        std::vector<long long> row;
        for (Pos p = 0; p < sys.size(); ++p) row.push_back(sys.id_of(g[p]));
        out.push_back(std::move(row));
    }
    return out;
}

/// A generating set for the group formed by `all`, chosen greedily.
inline std::vector<Perm> generating_subset(int degree, const std::vector<Perm>& all) {
    std::vector<Perm> gens;
    std::set<Perm> closure{identity_perm(degree)};
    for (const Perm& p : all) {
        if (closure.count(p)) continue;
        gens.push_back(p);
        std::vector<Perm> frontier(closure.begin(), closure.end());
        for (std::size_t i = 0; i < frontier.size(); ++i) {
            for (const Perm& g : gens) {
                Perm h = compose(g, frontier[i]);
                if (closure.insert(h).second) frontier.push_back(std::move(h));
            }
        }
    }
    return gens;
}

}  // namespace detail

/// Reals grouped into `classes` classes of `class_size` each, plus one
/// level-1 element per class; each real adds its class to any set. Reals of
/// class j get ids j*class_size.., class elements follow. The group is the
/// full wreath product, given by a transposition and a cycle inside class 0
/// and a transposition and a cycle of whole classes.
inline LeveledClosureSystem build_equivalence_example(int classes, int class_size) {
    if (classes < 2 || class_size < 2) throw Error("equivalence example needs at least 2 classes of size 2");
    const long long reals = static_cast<long long>(classes) * class_size;
    if (reals + classes > kMaxUniverse) throw UniverseTooLarge(static_cast<int>(reals + classes), kMaxUniverse);
    std::vector<Element> els;
    for (int i = 0; i < reals; ++i) els.push_back({i, 0, detail::letter_label(i)});
    for (int j = 0; j < classes; ++j) els.push_back({reals + j, 1, "[" + detail::letter_label(j * class_size) + "]"});
    RulesClosure rules;
    for (int i = 0; i < reals; ++i)
        rules.rules.push_back({ElementSet::single(i), ElementSet::single(static_cast<Pos>(reals + i / class_size))});

    const int total = static_cast<int>(reals) + classes;
    auto real = [&](int cls, int idx) { return cls * class_size + idx; };
    std::vector<std::vector<long long>> gens;
    auto push = [&](const Perm& p) { gens.emplace_back(p.begin(), p.end()); };
    {
        Perm t = identity_perm(total);
        std::swap(t[real(0, 0)], t[real(0, 1)]);
        push(t);
    }
    if (class_size > 2) {
        Perm c = identity_perm(total);
        for (int i = 0; i < class_size; ++i) c[real(0, i)] = real(0, (i + 1) % class_size);
        push(c);
    }
    {
        Perm t = identity_perm(total);
        for (int i = 0; i < class_size; ++i) std::swap(t[real(0, i)], t[real(1, i)]);
        std::swap(t[reals], t[reals + 1]);
        push(t);
    }
    if (classes > 2) {
        Perm c = identity_perm(total);
        for (int j = 0; j < classes; ++j) {
            for (int i = 0; i < class_size; ++i) c[real(j, i)] = real((j + 1) % classes, i);
            c[reals + j] = static_cast<Pos>(reals + (j + 1) % classes);
        }
        push(c);
    }
    return LeveledClosureSystem(std::move(els), 1, std::move(rules), std::move(gens));
}

/// An equivalence relation on k-tuples of base reals, listed as its classes.
struct QuotientRelation {
    int arity = 1;
    std::vector<std::vector<std::vector<Pos>>> classes;
    int level = 1;
};

struct QuotientSpec {
    int base_size = 0;
    std::vector<QuotientRelation> relations;
    int threshold = 1;
};

/// Adds one element per class of each relation at its declared level,
/// extends the base group to act on classes, and closes with the
/// orbit-threshold rule iterated to a fixpoint.
inline LeveledClosureSystem build_quotient_system(const QuotientSpec& spec, const LeveledClosureSystem& base) {
    if (base.size() != spec.base_size) throw Error("quotient spec base size does not match the base system");
    for (Pos p = 0; p < base.size(); ++p)
        if (base.element(p).level != 0) throw Error("quotient base must consist of reals");
    const PermGroup& g = base.require_group();

    struct ClassRef {
        std::size_t rel, cls;
    };
    std::vector<std::map<std::vector<Pos>, std::size_t>> owner(spec.relations.size());
    int max_level = 0;
    for (std::size_t r = 0; r < spec.relations.size(); ++r) {
        const auto& rel = spec.relations[r];
        if (rel.arity < 1 || rel.level < 1) throw NotEquivalence("relation needs arity ≥ 1 and level ≥ 1");
        max_level = std::max(max_level, rel.level);
        std::size_t expected = 1;
        for (int i = 0; i < rel.arity; ++i) expected *= static_cast<std::size_t>(spec.base_size);
        for (std::size_t c = 0; c < rel.classes.size(); ++c) {
            if (rel.classes[c].empty()) throw NotEquivalence("empty class");
            for (const auto& t : rel.classes[c]) {
                if (static_cast<int>(t.size()) != rel.arity) throw NotEquivalence("tuple of wrong arity");
                for (Pos p : t)
                    if (p < 0 || p >= spec.base_size) throw NotEquivalence("tuple entry outside the base");
                if (!owner[r].emplace(t, c).second) throw NotEquivalence("classes overlap");
            }
        }
        if (owner[r].size() != expected) throw NotEquivalence("classes do not cover every tuple");
    }

    std::vector<Element> els = base.elements();
    long long next_id = els.empty() ? 0 : els.back().id + 1;
    std::vector<std::vector<Pos>> class_pos(spec.relations.size());
    for (std::size_t r = 0; r < spec.relations.size(); ++r) {
        for (std::size_t c = 0; c < spec.relations[r].classes.size(); ++c) {
            class_pos[r].push_back(static_cast<Pos>(els.size()));
            els.push_back({next_id++, spec.relations[r].level,
                           "q" + std::to_string(r) + "_" + std::to_string(c)});
        }
    }
    std::vector<std::vector<long long>> gens;
    for (const Perm& s : g.generators()) {
        std::vector<long long> row(els.size());
        for (Pos p = 0; p < base.size(); ++p) row[p] = els[s[p]].id;
        for (std::size_t r = 0; r < spec.relations.size(); ++r) {
            const auto& rel = spec.relations[r];
            for (std::size_t c = 0; c < rel.classes.size(); ++c) {
                const std::size_t image = owner[r].at(apply(s, rel.classes[c].front()));
                for (const auto& t : rel.classes[c])
                    if (owner[r].at(apply(s, t)) != image)
                        throw RelationNotInvariant("relation " + std::to_string(r) + " is not invariant");
                row[class_pos[r][c]] = els[class_pos[r][image]].id;
            }
        }
        gens.push_back(std::move(row));
    }
    return LeveledClosureSystem(std::move(els), std::max(max_level, base.max_level()),
                                OrbitClosure{spec.threshold}, std::move(gens));
}

/// Pure set of `size` reals with the full symmetric group.
inline LeveledClosureSystem build_pure_set(int size) {
    std::vector<Element> els;
    for (int i = 0; i < size; ++i) els.push_back({i, 0, detail::letter_label(i)});
    std::vector<std::vector<long long>> gens;
    if (size >= 2) {
        std::vector<long long> t(size), c(size);
        for (int i = 0; i < size; ++i) t[i] = c[i] = i;
        std::swap(t[0], t[1]);
        for (int i = 0; i < size; ++i) c[i] = (i + 1) % size;
        gens = {t, c};
    }
    return LeveledClosureSystem(std::move(els), 0, RulesClosure{}, std::move(gens));
}

/// Quotient of a base by the equality relation on single reals.
inline QuotientSpec equality_quotient_spec(int size) {
    QuotientSpec q;
    q.base_size = size;
    QuotientRelation rel;
    for (Pos p = 0; p < size; ++p) rel.classes.push_back({{p}});
    q.relations.push_back(rel);
    return q;
}

/// A graph on level-0 vertices with `levels` further levels. Level ℓ holds
/// one copy of each vertex, the class of the constant ℓ-tuple (v,...,v)
/// under equality. A vertex and its copies are interalgebraic and nothing
/// else is algebraic, so closure is generated by singletons. The group is
/// the automorphism group of the graph acting on every level.
inline LeveledClosureSystem build_trivial_acl_graph(const std::vector<std::vector<int>>& adjacency, int levels) {
    const int v = static_cast<int>(adjacency.size());
    for (int i = 0; i < v; ++i) {
        if (static_cast<int>(adjacency[i].size()) != v) throw Error("adjacency matrix must be square");
        if (adjacency[i][i]) throw Error("adjacency must be irreflexive");
        for (int j = 0; j < v; ++j)
            if (adjacency[i][j] != adjacency[j][i]) throw Error("adjacency must be symmetric");
    }
    const int total = v * (levels + 1);
    if (total > kMaxUniverse) throw UniverseTooLarge(total, kMaxUniverse);
    std::vector<Element> els;
    for (int l = 0; l <= levels; ++l)
        for (int i = 0; i < v; ++i)
            els.push_back({static_cast<long long>(l) * v + i, l,
                           l == 0 ? "v" + std::to_string(i) : "v" + std::to_string(i) + "^" + std::to_string(l)});
    RulesClosure rules;
    for (int i = 0; i < v; ++i) {
        ElementSet fam;
        for (int l = 0; l <= levels; ++l) fam.insert(l * v + i);
        for (int l = 0; l <= levels; ++l) rules.rules.push_back({ElementSet::single(l * v + i), fam});
    }

    // All graph automorphisms by backtracking.
    std::vector<Perm> autos;
    Perm img(v, -1);
    std::vector<bool> used(v, false);
    std::function<void(int)> extend = [&](int i) {
        if (i == v) {
            autos.push_back(img);
            return;
        }
        for (int c = 0; c < v; ++c) {
            if (used[c]) continue;
            bool ok = true;
            for (int j = 0; j < i && ok; ++j) ok = adjacency[i][j] == adjacency[c][img[j]];
            if (!ok) continue;
            img[i] = c;
            used[c] = true;
            extend(i + 1);
            used[c] = false;
            img[i] = -1;
        }
    };
    extend(0);
    std::vector<std::vector<long long>> gens;
    for (const Perm& p : detail::generating_subset(v, autos)) {
        std::vector<long long> row(total);
        for (int l = 0; l <= levels; ++l)
            for (int i = 0; i < v; ++i) row[l * v + i] = static_cast<long long>(l) * v + p[i];
        gens.push_back(std::move(row));
    }
    return LeveledClosureSystem(std::move(els), levels, std::move(rules), std::move(gens));
}

/// Six reals x, y, z, u, v, w with the single rule {x, y} → z. Every element
/// has rank 1 over ∅, z ∈ cl({x, y}) \ cl({y}) and x ∉ cl({y, z}), so
/// exchange fails over ∅.
inline LeveledClosureSystem build_nonexchange_example() {
    std::vector<Element> els;
    const char* names[] = {"x", "y", "z", "u", "v", "w"};
    for (int i = 0; i < 6; ++i) els.push_back({i, 0, names[i]});
    RulesClosure rules;
    rules.rules.push_back({ElementSet::of({0, 1}), ElementSet::single(2)});
    return LeveledClosureSystem(std::move(els), 0, std::move(rules));
}

/// The Fano plane: points 0..6, lines {i, i+1, i+3} mod 7, any two points of
/// a line spanning the third. The group is generated by x ↦ x+1 and x ↦ 2x.
inline LeveledClosureSystem build_fano_plane() {
    std::vector<Element> els;
    for (int i = 0; i < 7; ++i) els.push_back({i, 0, "p" + std::to_string(i)});
    RulesClosure rules;
    for (int i = 0; i < 7; ++i) {
        const Pos line[3] = {i, (i + 1) % 7, (i + 3) % 7};
        for (int j = 0; j < 3; ++j)
            rules.rules.push_back({ElementSet::of({line[(j + 1) % 3], line[(j + 2) % 3]}), ElementSet::single(line[j])});
    }
    std::vector<std::vector<long long>> gens(2, std::vector<long long>(7));
    for (int i = 0; i < 7; ++i) {
        gens[0][i] = (i + 1) % 7;
        gens[1][i] = (2 * i) % 7;
    }
    return LeveledClosureSystem(std::move(els), 0, std::move(rules), std::move(gens));
}

/// Seeded random rules-based system: levels drawn uniformly from
/// [0, max_level], then `rule_count` Horn rules with one or two premises and
/// a single conclusion. Rule iteration always yields a valid operator.
inline LeveledClosureSystem random_rules_system(std::uint64_t seed, int size, int max_level, int rule_count) {
    if (size < 1 || size > kMaxUniverse) throw UniverseTooLarge(size, kMaxUniverse);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> level(0, max_level), pos(0, size - 1), arity(1, 2);
    std::vector<Element> els;
    for (int i = 0; i < size; ++i) els.push_back({i, level(rng), "e" + std::to_string(i)});
    // Keep at least one real.
    els[0].level = 0;
    RulesClosure rules;
    for (int r = 0; r < rule_count; ++r) {
        ElementSet premise;
        const int k = arity(rng);
        while (premise.size() < k) premise.insert(pos(rng));
        Pos c = pos(rng);
        while (premise.contains(c)) c = pos(rng);
        rules.rules.push_back({premise, ElementSet::single(c)});
    }
    return LeveledClosureSystem(std::move(els), max_level, std::move(rules));
}

/// Level- and closure-preserving bijection from `a` to `b` (by position), if
/// one exists. Closure agreement is checked on every subset for universes
/// up to the dense limit, otherwise on subsets of size at most 3.
inline std::optional<Perm> find_isomorphism(const LeveledClosureSystem& a, const LeveledClosureSystem& b) {
    if (a.size() != b.size() || a.max_level() != b.max_level()) return std::nullopt;
    const int n = a.size();
    auto lift = [](const Perm& f, ElementSet s) { return apply(f, s); };
    Perm f(n, -1);
    std::vector<bool> used(n, false);
    std::vector<ElementSet> a_single(n), b_single(n);
    for (Pos p = 0; p < n; ++p) {
        a_single[p] = a.closure(ElementSet::single(p));
        b_single[p] = b.closure(ElementSet::single(p));
    }
    auto full_check = [&]() {
        const int bound = n <= LeveledClosureSystem::kDenseLimit ? n : 3;
        for (ElementSet s : subsets_up_to(a.universe(), bound))
            if (lift(f, a.closure(s)) != b.closure(lift(f, s))) return false;
        return true;
    };
    std::optional<Perm> found;
    std::function<void(Pos)> extend = [&](Pos p) {
        if (found) return;
        if (p == n) {
            if (full_check()) found = f;
            return;
        }
        for (Pos q = 0; q < n; ++q) {
            if (used[q] || a.element(p).level != b.element(q).level) continue;
            if (a_single[p].size() != b_single[q].size()) continue;
            f[p] = q;
            used[q] = true;
            bool ok = true;
            // Singleton and pair closures restricted to already mapped elements.
            for (Pos r = 0; r <= p && ok; ++r) {
                const ElementSet pair = ElementSet::of({r, p});
                const ElementSet ca = a.closure(pair), cb = b.closure(ElementSet::of({f[r], q}));
                for (Pos x = 0; x <= p && ok; ++x) ok = ca.contains(x) == cb.contains(f[x]);
            }
            if (ok) extend(p + 1);
            used[q] = false;
            f[p] = -1;
        }
    };
    extend(0);
    return found;
}

// ---------------------------------------------------------------------------
// Fuzzer

struct SymmetryWitness {
    ElementSet a, b, c;
    int level = 0;
    friend bool operator==(const SymmetryWitness&, const SymmetryWitness&) = default;
};

struct Finding {
    enum class Kind { exchange, symmetry } kind = Kind::exchange;
    std::uint64_t trial = 0;
    std::optional<LeveledClosureSystem> system;  // shrunk
    ExchangeWitness exchange;
    SymmetryWitness symmetry;
};

struct FuzzConfig {
    std::uint64_t seed = 0;
    int universe_size = 7;
    int trials = 20;
    int max_level = 1;
    int rule_count = 6;
    int threads = 1;
    int symmetry_set_size = 2;
    std::optional<LeveledClosureSystem> injected;
};

struct FuzzCase {
    FuzzConfig config;
    std::vector<Finding> findings;
};

/// A symmetry failure: A ⫝̸ⁿ_C B and yet B ⫝ⁿ_C A, with B ⊆ M_n.
inline bool symmetry_fails(RankEngine& eng, const SymmetryWitness& w) {
    const auto& sys = eng.system();
    if (!w.b.subset_of(sys.level_mask(w.level))) return false;
    return !indep_verdict(eng, w.a, w.b, w.c, w.level) && indep_verdict(eng, w.b, w.a, w.c, w.level);
}

namespace detail {

inline ElementSet remap(ElementSet s, ElementSet keep) {
    ElementSet out;
    int i = 0;
    for (Pos p : keep) {
        if (s.contains(p)) out.insert(i);
        ++i;
    }
    return out;
}

inline std::vector<Pos> remap(const std::vector<Pos>& t, ElementSet keep) {
    std::vector<Pos> out;
    for (Pos p : t) out.push_back(remap(ElementSet::single(p), keep).front());
    return out;
}

/// Elements ordered for removal: highest level first, then highest id.
inline std::vector<Pos> removal_order(const LeveledClosureSystem& sys) {
    std::vector<Pos> out = sys.universe().to_vector();
    std::sort(out.begin(), out.end(), [&](Pos x, Pos y) {
        const int lx = sys.element(x).level, ly = sys.element(y).level;
        return lx != ly ? lx > ly : x > y;
    });
    return out;
}

inline std::pair<LeveledClosureSystem, ExchangeWitness> shrink_exchange(LeveledClosureSystem sys, ExchangeWitness w) {
    bool changed = true;
    while (changed) {
        changed = false;
        ElementSet needed = ElementSet::from_range(w.tuple) | w.base;
        for (Pos p : removal_order(sys)) {
            if (needed.contains(p)) continue;
            const ElementSet keep = sys.universe().without(p);
            LeveledClosureSystem sub = induced_subsystem(sys, keep);
            ExchangeWitness sw{remap(w.base, keep), w.level, remap(w.tuple, keep)};
            RankEngine eng(sub);
            if (sw.level <= sub.max_level() && replays(eng, sw)) {
                sys = std::move(sub);
                w = std::move(sw);
                changed = true;
                break;
            }
        }
        if (changed) continue;
        RankEngine eng(sys);
        for (Pos p : w.base) {
            ExchangeWitness sw = w;
            sw.base.erase(p);
            if (replays(eng, sw)) {
                w = std::move(sw);
                changed = true;
                break;
            }
        }
        if (changed) continue;
        for (std::size_t i = 1; i + 1 < w.tuple.size(); ++i) {
            ExchangeWitness sw = w;
            sw.tuple.erase(sw.tuple.begin() + static_cast<long>(i));
            if (replays(eng, sw)) {
                w = std::move(sw);
                changed = true;
                break;
            }
        }
    }
    return {std::move(sys), std::move(w)};
}

inline std::pair<LeveledClosureSystem, SymmetryWitness> shrink_symmetry(LeveledClosureSystem sys, SymmetryWitness w) {
    bool changed = true;
    while (changed) {
        changed = false;
        const ElementSet needed = w.a | w.b | w.c;
        for (Pos p : removal_order(sys)) {
            if (needed.contains(p)) continue;
            const ElementSet keep = sys.universe().without(p);
            LeveledClosureSystem sub = induced_subsystem(sys, keep);
            SymmetryWitness sw{remap(w.a, keep), remap(w.b, keep), remap(w.c, keep), w.level};
            RankEngine eng(sub);
            if (symmetry_fails(eng, sw)) {
                sys = std::move(sub);
                w = sw;
                changed = true;
                break;
            }
        }
        if (changed) continue;
        RankEngine eng(sys);
        for (ElementSet* s : {&w.c, &w.a, &w.b}) {
            for (Pos p : *s) {
                SymmetryWitness sw = w;
                ElementSet* target = s == &w.c ? &sw.c : s == &w.a ? &sw.a : &sw.b;
                target->erase(p);
                if (symmetry_fails(eng, sw)) {
                    w = sw;
                    changed = true;
                    break;
                }
            }
            if (changed) break;
        }
    }
    return {std::move(sys), w};
}

/// Findings for one system: the first exchange failure at each level and
/// the first symmetry failure at each level, each shrunk.
inline std::vector<Finding> probe_system(const LeveledClosureSystem& sys, std::uint64_t trial, int set_size) {
    std::vector<Finding> out;
    RankEngine eng(sys);
    for (int n = 0; n <= sys.max_level(); ++n) {
        if (auto w = check_exchange_all(eng, n)) {
            auto [small, sw] = shrink_exchange(with_table_closure(sys), *w);
            Finding f;
            f.kind = Finding::Kind::exchange;
            f.trial = trial;
            f.system = std::move(small);
            f.exchange = sw;
            out.push_back(std::move(f));
        }
    }
    SuiteConfig cfg;
    cfg.max_set_size = set_size;
    cfg.witness_cap = 1;
    for (int n = 0; n <= sys.max_level(); ++n) {
        const AxiomReport rep = suite_symmetry(sys, cfg, n);
        for (const Witness& wv : rep.witnesses) {
            SymmetryWitness w{*wv.set("A"), *wv.set("B"), *wv.set("C"), n};
            if (!symmetry_fails(eng, w)) continue;  // rank-form failure only
            auto [small, sw] = shrink_symmetry(with_table_closure(sys), w);
            Finding f;
            f.kind = Finding::Kind::symmetry;
            f.trial = trial;
            f.system = std::move(small);
            f.symmetry = sw;
            out.push_back(std::move(f));
            break;
        }
    }
    return out;
}

}  // namespace detail

/// Random systems per trial (seed splitmix64(seed + i)), each probed for
/// exchange and symmetry failures; findings are shrunk and listed in trial
/// order. An injected system is probed first as trial 0 and shifts the
/// random trials to 1..trials.
inline FuzzCase fuzz_counterexamples(const FuzzConfig& cfg) {
    FuzzCase fc;
    fc.config = cfg;
    const int offset = cfg.injected ? 1 : 0;
    const int total = cfg.trials + offset;
    std::vector<std::vector<Finding>> per(total);
    auto run = [&](int t) {
        if (cfg.injected && t == 0) {
            per[t] = detail::probe_system(*cfg.injected, 0, cfg.symmetry_set_size);
            return;
        }
        const std::uint64_t i = static_cast<std::uint64_t>(t - offset);
        const LeveledClosureSystem sys =
            random_rules_system(splitmix64(cfg.seed + i), cfg.universe_size, cfg.max_level, cfg.rule_count);
        per[t] = detail::probe_system(sys, static_cast<std::uint64_t>(t), cfg.symmetry_set_size);
    };
    const int threads = std::max(1, std::min(cfg.threads, total));
    if (threads == 1) {
        for (int t = 0; t < total; ++t) run(t);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                for (int t = w; t < total; t += threads) run(t);
            });
        for (auto& th : pool) th.join();
    }
    for (auto& v : per)
        for (auto& f : v) fc.findings.push_back(std::move(f));
    return fc;
}

/// The random system of trial t in a fuzz run.
inline LeveledClosureSystem fuzz_trial_system(const FuzzConfig& cfg, std::uint64_t trial) {
    if (cfg.injected && trial == 0) return *cfg.injected;
    const std::uint64_t i = trial - (cfg.injected ? 1 : 0);
    return random_rules_system(splitmix64(cfg.seed + i), cfg.universe_size, cfg.max_level, cfg.rule_count);
}

}  // namespace geoclose
