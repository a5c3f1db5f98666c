#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "geoclose/element_set.hpp"
#include "geoclose/errors.hpp"
#include "geoclose/perm_group.hpp"

namespace geoclose {

struct Element {
    long long id = 0;
    int level = 0;  // least n with the element in M_n; level 0 means real
    std::string label;
};

/// Horn rule: whenever `premise` is contained in the set, add `conclusion`.
struct Rule {
    ElementSet premise;
    ElementSet conclusion;
};

/// Closure generated by iterating rules to a fixpoint. Always a valid
/// closure operator.
struct RulesClosure {
    std::vector<Rule> rules;
};

/// Explicit table. A listed set maps to its entry verbatim; an unlisted set S
/// maps to S together with the entries of every listed subset of S. Listed
/// entries are taken as given, so a table can encode an invalid operator.
struct TableClosure {
    std::vector<std::pair<ElementSet, ElementSet>> entries;
};

/// e is added to S when its orbit under the pointwise stabilizer of S has at
/// most `threshold` members; the rule is iterated until nothing changes.
struct OrbitClosure {
    int threshold = 1;
};

using ClosureOperator = std::variant<RulesClosure, TableClosure, OrbitClosure>;

/// Finite universe with level tags, a closure operator standing in for
/// acl^eq, and optional automorphisms. Immutable after construction; every
/// accessor is safe to call concurrently.
class LeveledClosureSystem {
public:
    /// Universes up to this size get a precomputed closure table.
    static constexpr int kDenseLimit = 20;

    /// `generators_by_id`: each generator lists, for the i-th element of
    /// `elements` (in the given order), the id of its image.
    LeveledClosureSystem(std::vector<Element> elements, int max_level, ClosureOperator op,
                         std::optional<std::vector<std::vector<long long>>> generators_by_id = std::nullopt)
        : max_level_(max_level), op_(std::move(op)) {
        if (elements.size() > static_cast<std::size_t>(kMaxUniverse))
            throw UniverseTooLarge(static_cast<int>(elements.size()), kMaxUniverse);
        if (max_level < 0) throw InvalidSystem("maxLevel must be non-negative");

        std::vector<std::size_t> order(elements.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return elements[a].id < elements[b].id; });
        for (std::size_t i = 0; i < order.size(); ++i) {
            const Element& e = elements[order[i]];
            if (e.id < 0) throw InvalidSystem("element ids must be non-negative");
            if (i > 0 && elements[order[i - 1]].id == e.id)
                throw InvalidSystem("duplicate element id " + std::to_string(e.id));
            if (e.level < 0 || e.level > max_level)
                throw InvalidSystem("element " + std::to_string(e.id) + " has level outside [0, maxLevel]");
            elements_.push_back(e);
            pos_by_id_.emplace(e.id, static_cast<Pos>(i));
        }
        universe_ = ElementSet::first_n(size());
        level_masks_.assign(max_level_ + 1, ElementSet{});
        for (Pos p = 0; p < size(); ++p)
            for (int n = elements_[p].level; n <= max_level_; ++n) level_masks_[n].insert(p);

        if (generators_by_id) {
            std::vector<Perm> gens;
            for (const auto& g : *generators_by_id) {
                if (g.size() != elements.size())
                    throw InvalidSystem("automorphism generator has wrong length");
                Perm p(size());
                for (std::size_t i = 0; i < g.size(); ++i) p[pos_of(elements[i].id)] = pos_of(g[i]);
                if (!is_bijection(p)) throw InvalidSystem("automorphism generator is not a bijection");
                gens.push_back(std::move(p));
            }
            group_ = PermGroup(size(), std::move(gens));
        }
        if (std::holds_alternative<OrbitClosure>(op_) && !group_) throw NoGroup();
        if (auto* t = std::get_if<TableClosure>(&op_)) {
            for (const auto& [k, v] : t->entries) {
                if (!k.subset_of(universe_) || !v.subset_of(universe_))
                    throw InvalidSystem("closure table mentions elements outside the universe");
                table_index_.emplace(k, v);
            }
        }
        if (auto* r = std::get_if<RulesClosure>(&op_)) {
            for (const Rule& rule : r->rules)
                if (!rule.premise.subset_of(universe_) || !rule.conclusion.subset_of(universe_))
                    throw InvalidSystem("closure rule mentions elements outside the universe");
        }
        if (size() <= kDenseLimit) {
            auto dense = std::make_shared<std::vector<std::uint64_t>>(std::size_t{1} << size());
            for (std::uint64_t s = 0; s < dense->size(); ++s) (*dense)[s] = evaluate(ElementSet(s)).bits();
            dense_ = std::move(dense);
        }
    }

    int size() const { return static_cast<int>(elements_.size()); }
    int max_level() const { return max_level_; }
    ElementSet universe() const { return universe_; }
    const std::vector<Element>& elements() const { return elements_; }
    const Element& element(Pos p) const { return elements_.at(p); }
    const ClosureOperator& op() const { return op_; }
    const std::optional<PermGroup>& group() const { return group_; }
    bool has_group() const { return group_.has_value(); }
    const PermGroup& require_group() const {
        if (!group_) throw NoGroup();
        return *group_;
    }

    /// Elements of level at most n, i.e. M_n.
    ElementSet level_mask(int n) const {
        if (n < 0 || n > max_level_) throw Error("level " + std::to_string(n) + " outside [0, maxLevel]");
        return level_masks_[n];
    }
    ElementSet reals() const { return level_masks_[0]; }

    Pos pos_of(long long id) const {
        auto it = pos_by_id_.find(id);
        if (it == pos_by_id_.end()) throw UnknownElement(id);
        return it->second;
    }
    long long id_of(Pos p) const { return elements_.at(p).id; }
    std::string name_of(Pos p) const {
        const Element& e = elements_.at(p);
        return e.label.empty() ? std::to_string(e.id) : e.label;
    }

    /// Resolves a label or a decimal id.
    Pos resolve(const std::string& token) const {
        for (Pos p = 0; p < size(); ++p)
            if (elements_[p].label == token) return p;
        try {
            std::size_t used = 0;
            long long id = std::stoll(token, &used);
            if (used == token.size()) return pos_of(id);
        } catch (const std::logic_error&) {
        }
        throw UnknownElement(token);
    }

    ElementSet set_of_ids(const std::vector<long long>& ids) const {
        ElementSet s;
        for (long long id : ids) s.insert(pos_of(id));
        return s;
    }
    std::vector<long long> ids_of(ElementSet s) const {
        std::vector<long long> out;
        for (Pos p : s) out.push_back(id_of(p));
        return out;
    }
    std::vector<long long> ids_of(const std::vector<Pos>& seq) const {
        std::vector<long long> out;
        for (Pos p : seq) out.push_back(id_of(p));
        return out;
    }

    void require_in_universe(ElementSet s) const {
        if (!s.subset_of(universe_)) throw UnknownElement(static_cast<long long>((s - universe_).front()));
    }

    /// The full closure cl(S), standing in for acl^eq(S).
    ElementSet closure(ElementSet s) const {
        if (dense_) return ElementSet((*dense_)[s.bits()]);
        return evaluate(s);
    }

    /// acl^n(S) = cl(S) ∩ M_n.
    ElementSet acl(ElementSet s, int n) const { return closure(s) & level_mask(n); }

    /// Applies the operator's definition directly, bypassing the table.
    ElementSet evaluate(ElementSet s) const {
        return std::visit([&](const auto& o) { return eval_op(o, s); }, op_);
    }

private:
    ElementSet eval_op(const RulesClosure& r, ElementSet s) const {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const Rule& rule : r.rules) {
                if (rule.premise.subset_of(s) && !rule.conclusion.subset_of(s)) {
                    s |= rule.conclusion;
                    changed = true;
                }
            }
        }
        return s;
    }

    ElementSet eval_op(const TableClosure& t, ElementSet s) const {
        if (auto it = table_index_.find(s); it != table_index_.end()) return it->second;
        ElementSet r = s;
        for (const auto& [k, v] : t.entries)
            if (k.subset_of(s)) r |= v;
        return r;
    }

    ElementSet eval_op(const OrbitClosure& o, ElementSet s) const {
        while (true) {
            const auto stab = group_->pointwise_stabilizer(s);
            ElementSet next = s;
            for (Pos e : universe_ - s) {
                ElementSet orbit;
                for (const Perm* g : stab) {
                    orbit.insert((*g)[e]);
                    if (orbit.size() > o.threshold) break;
                }
                if (orbit.size() <= o.threshold) next.insert(e);
            }
            if (next == s) return s;
            s = next;
        }
    }

    std::vector<Element> elements_;
    int max_level_ = 0;
    ClosureOperator op_;
    std::optional<PermGroup> group_;
    ElementSet universe_;
    std::vector<ElementSet> level_masks_;
    std::unordered_map<long long, Pos> pos_by_id_;
    std::unordered_map<ElementSet, ElementSet> table_index_;
    std::shared_ptr<const std::vector<std::uint64_t>> dense_;
};

// ---------------------------------------------------------------------------
// Validation

enum class Axiom { extensive, monotone, idempotent, automorphism_level, automorphism_commutes };

inline const char* to_string(Axiom a) {
    switch (a) {
        case Axiom::extensive: return "extensive";
        case Axiom::monotone: return "monotone";
        case Axiom::idempotent: return "idempotent";
        case Axiom::automorphism_level: return "automorphism-preserves-levels";
        case Axiom::automorphism_commutes: return "automorphism-commutes-with-closure";
    }
    return "?";
}

struct Violation {
    Axiom axiom;
    ElementSet first;    // A
    ElementSet second;   // B for monotonicity (A ⊆ B), unused otherwise
    int generator = -1;  // automorphism violations only
};

struct ValidationReport {
    std::vector<Violation> violations;  // at most one per axiom (and generator)
    long long checked_subsets = 0;
    bool exhaustive = false;
    bool ok() const { return violations.empty(); }
    const Violation* find(Axiom a) const {
        for (const Violation& v : violations)
            if (v.axiom == a) return &v;
        return nullptr;
    }
};

struct ValidationOptions {
    int universe_bound = 64;
    int exhaustive_limit = 20;
    int subset_size = 4;
    int random_subsets = 10'000;
    std::uint64_t seed = 0;
    bool require_exhaustive = false;
};

/// Checks extensivity, monotonicity, idempotence and automorphism coherence.
/// Subsets are visited by increasing size, so each reported witness is of
/// minimal size among the visited sets.
inline ValidationReport validate(const LeveledClosureSystem& sys, const ValidationOptions& opt = {}) {
    const int n = sys.size();
    if (n > opt.universe_bound) throw UniverseTooLarge(n, opt.universe_bound);
    if (opt.require_exhaustive && n > opt.exhaustive_limit) throw UniverseTooLarge(n, opt.exhaustive_limit);

    ValidationReport rep;
    rep.exhaustive = n <= opt.exhaustive_limit;
    std::vector<ElementSet> sets;
    if (rep.exhaustive) {
        sets = subsets_up_to(sys.universe(), n);
    } else {
        sets = subsets_up_to(sys.universe(), opt.subset_size);
        std::mt19937_64 rng(opt.seed);
        std::vector<ElementSet> extra;
        for (int i = 0; i < opt.random_subsets; ++i) extra.push_back(ElementSet(rng() & sys.universe().bits()));
        std::stable_sort(extra.begin(), extra.end(),
                         [](ElementSet a, ElementSet b) { return a.size() < b.size(); });
        sets.insert(sets.end(), extra.begin(), extra.end());
    }

    const auto* gens = sys.group() ? &sys.group()->generators() : nullptr;
    std::vector<bool> gen_level_bad;
    if (gens) {
        gen_level_bad.assign(gens->size(), false);
        for (std::size_t g = 0; g < gens->size(); ++g) {
            for (Pos p = 0; p < n; ++p) {
                if (sys.element((*gens)[g][p]).level != sys.element(p).level) {
                    rep.violations.push_back({Axiom::automorphism_level, ElementSet::single(p), {}, static_cast<int>(g)});
                    gen_level_bad[g] = true;
                    break;
                }
            }
        }
    }

    bool ext = false, mono = false, idem = false;
    std::vector<bool> gen_commute_bad(gens ? gens->size() : 0, false);
    for (ElementSet a : sets) {
        ++rep.checked_subsets;
        const ElementSet ca = sys.closure(a);
        if (!ext && !a.subset_of(ca)) {
            rep.violations.push_back({Axiom::extensive, a, {}});
            ext = true;
        }
        if (!idem && sys.closure(ca) != ca) {
            rep.violations.push_back({Axiom::idempotent, a, {}});
            idem = true;
        }
        if (!mono) {
            for (Pos x : sys.universe() - a) {
                if (!ca.subset_of(sys.closure(a.with(x)))) {
                    rep.violations.push_back({Axiom::monotone, a, a.with(x)});
                    mono = true;
                    break;
                }
            }
        }
        if (gens) {
            for (std::size_t g = 0; g < gens->size(); ++g) {
                if (gen_commute_bad[g]) continue;
                const Perm& s = (*gens)[g];
                if (apply(s, ca) != sys.closure(apply(s, a))) {
                    rep.violations.push_back({Axiom::automorphism_commutes, a, {}, static_cast<int>(g)});
                    gen_commute_bad[g] = true;
                }
            }
        }
    }
    return rep;
}

/// Regression check for m < n: acl_m(A) ⊆ acl_n(A), and an
/// element of level at most m outside acl_m(A) is also outside acl_n(A).
inline bool level_monotone_check(const LeveledClosureSystem& sys, ElementSet a, int m, int n) {
    if (!(m < n) || n > sys.max_level() || m < 0) throw Error("level_monotone_check requires 0 <= m < n <= maxLevel");
    sys.require_in_universe(a);
    const ElementSet am = sys.acl(a, m);
    const ElementSet an = sys.acl(a, n);
    return am.subset_of(an) && (an & sys.level_mask(m)) == am;
}

/// All closed sets cl(S). Exhaustive for universes up to the dense limit;
/// otherwise closures of subsets of size at most `max_generator_size`.
inline std::vector<ElementSet> closed_sets(const LeveledClosureSystem& sys, int max_generator_size = 3) {
    std::vector<ElementSet> out;
    if (sys.size() <= LeveledClosureSystem::kDenseLimit) {
        for_each_subset(sys.universe(), [&](ElementSet s) {
            if (sys.closure(s) == s) out.push_back(s);
        });
    } else {
        for (ElementSet s : subsets_up_to(sys.universe(), max_generator_size)) out.push_back(sys.closure(s));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    std::stable_sort(out.begin(), out.end(), [](ElementSet a, ElementSet b) { return a.size() < b.size(); });
    return out;
}

/// Minimal table for the operator restricted to `keep`: cl'(S) = cl(S) ∩ keep.
/// Positions of `keep` are renumbered in ascending order.
inline TableClosure restricted_table(const LeveledClosureSystem& sys, ElementSet keep) {
    const std::vector<Pos> kept = keep.to_vector();
    const int m = static_cast<int>(kept.size());
    if (m > LeveledClosureSystem::kDenseLimit) throw UniverseTooLarge(m, LeveledClosureSystem::kDenseLimit);
    auto lift = [&](ElementSet local) {
        ElementSet g;
        for (Pos p : local) g.insert(kept[p]);
        return g;
    };
    auto lower = [&](ElementSet global) {
        ElementSet l;
        for (int i = 0; i < m; ++i)
            if (global.contains(kept[i])) l.insert(i);
        return l;
    };
    TableClosure t;
    for (ElementSet s : subsets_up_to(ElementSet::first_n(m), m)) {
        const ElementSet actual = lower(sys.closure(lift(s)));
        ElementSet predicted = s;
        for (const auto& [k, v] : t.entries)
            if (k.subset_of(s)) predicted |= v;
        if (predicted != actual) t.entries.emplace_back(s, actual);
    }
    return t;
}

/// Induced subsystem on `keep` with closure cl(S) ∩ keep. The restriction of
/// a valid closure operator is again valid. Automorphisms are dropped.
inline LeveledClosureSystem induced_subsystem(const LeveledClosureSystem& sys, ElementSet keep) {
    std::vector<Element> els;
    for (Pos p : keep) els.push_back(sys.element(p));
    return LeveledClosureSystem(std::move(els), sys.max_level(), restricted_table(sys, keep));
}

/// Same universe, levels and group, with the closure materialized as a table.
inline LeveledClosureSystem with_table_closure(const LeveledClosureSystem& sys) {
    std::optional<std::vector<std::vector<long long>>> gens;
    if (sys.group()) {
        gens.emplace();
        for (const Perm& g : sys.group()->generators()) {
            std::vector<long long> row;
            for (Pos p = 0; p < sys.size(); ++p) row.push_back(sys.id_of(g[p]));
            gens->push_back(std::move(row));
        }
    }
    return LeveledClosureSystem(sys.elements(), sys.max_level(), restricted_table(sys, sys.universe()), gens);
}

/// Soft elimination at finite scale: whenever a ∈ M_n lies in cl(B ∪ C) \ cl(C)
/// with B ⊆ M_n, some single b ∈ B already puts a in cl({b} ∪ C). C ranges
/// over every closed set; B over subsets of M_n up to `max_b` members.
inline bool is_trivial_up_to(const LeveledClosureSystem& sys, int n, int max_b = 64) {
    const ElementSet mn = sys.level_mask(n);
    for (ElementSet c : closed_sets(sys)) {
        for (ElementSet b : subsets_up_to(mn - c, std::min(max_b, (mn - c).size()))) {
            const ElementSet gained = (sys.closure(b | c) - c) & mn;
            ElementSet single;
            for (Pos x : b) single |= sys.closure(c.with(x));
            if (!gained.subset_of(single)) return false;
        }
    }
    return true;
}

}  // namespace geoclose
