#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "geoclose/rank.hpp"

namespace geoclose {

enum class Outcome { pass, fail, not_witnessed };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::pass: return "pass";
        case Outcome::fail: return "fail";
        case Outcome::not_witnessed: return "not-witnessed";
    }
    return "?";
}

/// A named bundle of sets and numbers describing one checked instance.
struct Witness {
    std::string kind;
    int level = 0;
    std::vector<std::pair<std::string, ElementSet>> sets;
    std::vector<std::pair<std::string, long long>> values = {};
    std::vector<Pos> tuple = {};

    const ElementSet* set(const std::string& name) const {
        for (const auto& [k, v] : sets)
            if (k == name) return &v;
        return nullptr;
    }
    long long value(const std::string& name, long long fallback = -1) const {
        for (const auto& [k, v] : values)
            if (k == name) return v;
        return fallback;
    }
};

struct AxiomReport {
    std::string axiom;
    Outcome outcome = Outcome::pass;
    long long checked = 0;
    long long failures = 0;
    long long not_witnessed = 0;
    std::vector<Witness> witnesses;
    std::uint64_t seed = 0;

    void merge(AxiomReport&& o, std::size_t cap) {
        checked += o.checked;
        failures += o.failures;
        not_witnessed += o.not_witnessed;
        for (auto& w : o.witnesses)
            if (witnesses.size() < cap) witnesses.push_back(std::move(w));
    }
    void finish() {
        outcome = failures > 0 ? Outcome::fail : not_witnessed > 0 ? Outcome::not_witnessed : Outcome::pass;
    }
};

/// Bounds shared by every suite. Universes up to `exhaustive_universe`
/// elements are enumerated exhaustively (all sets up to `max_set_size`);
/// larger ones use `random_pool` seeded random sets plus all singletons.
struct SuiteConfig {
    int max_set_size = 3;
    int exhaustive_universe = 14;
    int random_pool = 48;
    std::uint64_t seed = 0;
    int threads = 1;
    std::size_t witness_cap = 16;
    std::vector<int> levels;  // empty: every level
    long long budget = default_budget();

    std::vector<int> levels_of(const LeveledClosureSystem& sys) const {
        if (!levels.empty()) return levels;
        std::vector<int> out;
        for (int n = 0; n <= sys.max_level(); ++n) out.push_back(n);
        return out;
    }
};

/// Stateless splitting rule for per-item seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Sets drawn from `within`, either every subset up to the size bound or a
/// seeded sample (always including ∅ and the singletons).
inline std::vector<ElementSet> set_pool(const LeveledClosureSystem& sys, const SuiteConfig& cfg, ElementSet within,
                                        std::uint64_t salt = 0) {
    if (sys.size() <= cfg.exhaustive_universe) return subsets_up_to(within, cfg.max_set_size);
    std::vector<ElementSet> out = subsets_up_to(within, std::min(1, cfg.max_set_size));
    std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(salt)));
    const std::vector<Pos> items = within.to_vector();
    if (items.empty()) return out;
    std::uniform_int_distribution<int> size_dist(2, std::max(2, cfg.max_set_size));
    std::uniform_int_distribution<std::size_t> pick(0, items.size() - 1);
    for (int i = 0; i < cfg.random_pool; ++i) {
        ElementSet s;
        const int k = std::min<int>(size_dist(rng), static_cast<int>(items.size()));
        while (s.size() < k) s.insert(items[pick(rng)]);
        out.push_back(s);
    }
    std::sort(out.begin(), out.end(), [](ElementSet a, ElementSet b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Distinct closures of the given sets, ascending.
inline std::vector<ElementSet> closure_classes(const LeveledClosureSystem& sys, const std::vector<ElementSet>& sets) {
    std::vector<ElementSet> out;
    out.reserve(sets.size());
    for (ElementSet s : sets) out.push_back(sys.closure(s));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Runs `work(i, engine)` for i in [0, count) on `threads` workers, each
/// with its own engine, and merges the per-item reports in index order, so
/// the result does not depend on the thread count.
inline AxiomReport run_items(const LeveledClosureSystem& sys, const SuiteConfig& cfg, const std::string& axiom,
                             std::size_t count, const std::function<AxiomReport(std::size_t, RankEngine&)>& work) {
    std::vector<AxiomReport> parts(count);
    const int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(std::max<std::size_t>(count, 1))));
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&](int t) {
        RankEngine eng(sys, cfg.budget);
        try {
            for (std::size_t i = t; i < count; i += threads) parts[i] = work(i, eng);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!error) error = std::current_exception();
        }
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    AxiomReport rep;
    rep.axiom = axiom;
    rep.seed = cfg.seed;
    for (auto& p : parts) rep.merge(std::move(p), cfg.witness_cap);
    rep.finish();
    return rep;
}

}  // namespace geoclose
