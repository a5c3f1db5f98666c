#pragma once

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geoclose/rank_laws.hpp"
#include "geoclose/report.hpp"

namespace geoclose::cli {

enum Exit : int { ok = 0, failure = 1, parse_error = 2, invalid_system = 3, disagreement = 4, replay_mismatch = 5 };

struct Options {
    std::string spec, format = "json", out;
    std::uint64_t seed = 0;
    int threads = 1;
    int n = 0;
    std::string a, b, c;
    bool c_given = false;
    bool ccs = false;
    std::string verify;
    int k_max = 2;
    int max_set = 3;
    int exhaustive_universe = 14;
    int pool = 48;
    std::vector<int> levels;
    std::string family;
    int k = 2;
    int witness_bound = 1;
    int universe = 7, trials = 20, max_level = 1, rules = 6, symmetry_set = 2;
    std::string inject;
    std::string fuzz_case, witness;
    std::string example;
    int classes = 3, class_size = 3, size = 6, graph_levels = 1;
    std::string adjacency, quotient, base;
};

/// Element tokens separated by commas or whitespace, each a label or an id.
inline ElementSet parse_set(const LeveledClosureSystem& sys, const std::string& text) {
    ElementSet s;
    std::string tok;
    auto flush = [&] {
        if (!tok.empty()) s.insert(sys.resolve(tok));
        tok.clear();
    };
    for (char ch : text) {
        if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) flush();
        else tok += ch;
    }
    flush();
    return s;
}

class Runner {
public:
    Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

    int emit(const std::string& command, const Json& config, const LeveledClosureSystem* sys, Json result,
             const Options& o) {
        const Json rep = envelope(command, o.seed, config, sys ? spec_hash(*sys) : std::string(), std::move(result));
        const std::string text = o.format == "text" ? render_text(rep, sys) : dump(rep);
        if (!o.out.empty()) io::write_file(o.out, text);
        out_ << text;
        return Exit::ok;
    }

    /// Loads and validates the spec, printing the violation on failure.
    std::optional<LeveledClosureSystem> load(const Options& o, int& code) {
        LeveledClosureSystem sys = load_system(o.spec);
        const ValidationReport rep = validate(sys);
        if (!rep.ok()) {
            err_ << "invalid system: " << to_string(rep.violations.front().axiom) << " fails on "
                 << dump(io::ids(sys, rep.violations.front().first));
            code = Exit::invalid_system;
            return std::nullopt;
        }
        return sys;
    }

    SuiteConfig suite_config(const Options& o) const {
        SuiteConfig cfg;
        cfg.max_set_size = o.max_set;
        cfg.exhaustive_universe = o.exhaustive_universe;
        cfg.random_pool = o.pool;
        cfg.seed = o.seed;
        cfg.threads = o.threads;
        cfg.levels = o.levels;
        return cfg;
    }

    int cmd_validate(const Options& o) {
        LeveledClosureSystem sys = load_system(o.spec);
        ValidationOptions vo;
        vo.seed = o.seed;
        const ValidationReport rep = validate(sys, vo);
        Json vs = Json::array();
        for (const Violation& v : rep.violations) {
            Json j{{"axiom", to_string(v.axiom)}, {"first", io::ids(sys, v.first)}, {"second", io::ids(sys, v.second)}};
            if (v.generator >= 0) j["generator"] = v.generator;
            vs.push_back(std::move(j));
        }
        Json result{{"ok", rep.ok()},
                    {"exhaustive", rep.exhaustive},
                    {"checkedSubsets", rep.checked_subsets},
                    {"size", sys.size()},
                    {"maxLevel", sys.max_level()},
                    {"violations", std::move(vs)}};
        if (sys.has_group()) result["groupOrder"] = sys.group()->order();
        emit("validate", Json{{"spec", o.spec}}, &sys, std::move(result), o);
        return rep.ok() ? Exit::ok : Exit::invalid_system;
    }

    int cmd_rank(const Options& o) {
        int code = 0;
        auto sys = load(o, code);
        if (!sys) return code;
        RankEngine eng(*sys);
        const RankQuery q{parse_set(*sys, o.a), parse_set(*sys, o.b), o.n};
        const int rec = eng.rank_recursive(q);
        const RankCertificate cert = eng.build_ncs(q);
        const auto greedy = eng.greedy_rank(q);
        Json result{{"A", io::ids(*sys, q.a)},
                    {"B", io::ids(*sys, q.b)},
                    {"n", q.n},
                    {"aclA", io::ids(*sys, sys->acl(q.a, q.n))},
                    {"recursive", rec},
                    {"sequences", cert.value},
                    {"certificate", certificate_to_json(*sys, cert)},
                    {"greedy", {{"value", greedy.certificate.value},
                                {"witness", io::ids(*sys, greedy.certificate.witness)},
                                {"optimal", greedy.optimal}}}};
        if (o.ccs) {
            const CoordSequence cs = build_nccs(eng, q);
            result["ccs"] = {{"elements", io::ids(*sys, cs.elements)}, {"coreIndices", cs.core_indices}};
        }
        int status = rec == cert.value ? Exit::ok : Exit::disagreement;
        if (!o.verify.empty()) {
            const CertificateFile f = certificate_from_json(*sys, io::read_json(o.verify));
            bool good = f.certificate.value == rec && static_cast<int>(f.certificate.witness.size()) == rec &&
                        eng.is_ncs(q, f.certificate.witness);
            if (good && f.core_indices) good = is_nccs(eng, q, CoordSequence{f.certificate.witness, *f.core_indices});
            result["verified"] = good;
            if (!good && status == Exit::ok) status = Exit::replay_mismatch;
        }
        Json config{{"A", o.a}, {"B", o.b}, {"n", o.n}, {"ccs", o.ccs}};
        emit("rank", config, &*sys, std::move(result), o);
        return status;
    }

    int cmd_indep(const Options& o) {
        int code = 0;
        auto sys = load(o, code);
        if (!sys) return code;
        RankEngine eng(*sys);
        const IndependenceQuery q{parse_set(*sys, o.a), parse_set(*sys, o.b), parse_set(*sys, o.c), o.n};
        const IndependenceResult r = indep(eng, q);
        Json result{{"A", io::ids(*sys, q.a)},
                    {"B", io::ids(*sys, q.b)},
                    {"C", io::ids(*sys, q.c)},
                    {"n", q.n},
                    {"independent", r.independent},
                    {"wholeSetVerdict", r.whole_set_verdict},
                    {"subsetsAgree", r.subsets_agree},
                    {"rankOverC", certificate_to_json(*sys, r.over_c)},
                    {"rankOverBC", certificate_to_json(*sys, r.over_bc)}};
        if (r.failing_subset) result["failingSubset"] = io::ids(*sys, *r.failing_subset);
        emit("indep", Json{{"A", o.a}, {"B", o.b}, {"C", o.c}, {"n", o.n}}, &*sys, std::move(result), o);
        return Exit::ok;
    }

    int cmd_exchange(const Options& o) {
        int code = 0;
        auto sys = load(o, code);
        if (!sys) return code;
        RankEngine eng(*sys);
        std::optional<ExchangeWitness> w;
        if (o.c_given) w = check_exchange(eng, sys->closure(parse_set(*sys, o.c)), o.n, o.k_max);
        else w = check_exchange_all(eng, o.n, o.k_max);
        Json result{{"n", o.n}, {"outcome", w ? "fail" : "pass"}};
        if (w) result["witness"] = exchange_witness_to_json(*sys, *w);
        emit("exchange", Json{{"n", o.n}, {"C", o.c_given ? Json(o.c) : Json(nullptr)}, {"kMax", o.k_max}}, &*sys, std::move(result), o);
        return Exit::ok;
    }

    int cmd_suite(const Options& o) {
        int code = 0;
        auto sys = load(o, code);
        if (!sys) return code;
        const SuiteConfig cfg = suite_config(o);
        Json reports = Json::array();
        long long hard = 0;
        auto add = [&](const AxiomReport& r, std::optional<int> level, bool is_hard) {
            Json j = report_to_json(*sys, r);
            j["level"] = level ? Json(*level) : Json(nullptr);
            j["hard"] = is_hard;
            if (is_hard && r.outcome == Outcome::fail) ++hard;
            reports.push_back(std::move(j));
        };
        add(check_oracle_agreement(*sys, cfg), std::nullopt, true);
        for (const auto& r : check_rank_laws(*sys, cfg)) add(r, std::nullopt, true);
        add(suite_monotonicity(*sys, cfg), std::nullopt, true);
        add(suite_transitivity(*sys, cfg), std::nullopt, true);
        add(suite_finite_character(*sys, cfg), std::nullopt, true);
        add(suite_locality(*sys, cfg), std::nullopt, true);
        if (sys->has_group()) {
            add(suite_invariance(*sys, cfg), std::nullopt, true);
            add(suite_extension(*sys, cfg), std::nullopt, true);
        }
        Json exchange = Json::array();
        bool all_exchange = true;
        for (int n : cfg.levels_of(*sys)) {
            RankEngine eng(*sys, cfg.budget);
            const auto w = check_exchange_all(eng, n);
            Json ej{{"n", n}, {"outcome", w ? "fail" : "pass"}};
            if (w) ej["witness"] = exchange_witness_to_json(*sys, *w);
            exchange.push_back(std::move(ej));
            // Symmetry failures are theorem contradictions only under exchange.
            add(suite_symmetry(*sys, cfg, n), n, !w);
            if (w) {
                all_exchange = false;
                continue;
            }
            for (const auto& r : check_coordination(*sys, cfg, n)) add(r, n, true);
            add(dependence_bridge_check(*sys, cfg, n), n, true);
        }
        if (all_exchange)
            for (const auto& r : check_rank_laws(*sys, cfg, true))
                if (r.axiom == "rank-modularity") add(r, std::nullopt, true);
        Json soft{{"softEI", false}};
        try {
            (void)verify_soft_ei(*sys);
            soft["softEI"] = true;
            add(softEI_collapse_check(*sys, cfg), std::nullopt, true);
        } catch (const NotSoftEI& e) {
            soft["missing"] = sys->id_of(e.element());
        }
        if (!o.family.empty()) {
            const DefinableFamily fam = family_from_json(*sys, io::read_json(o.family));
            ProbeConfig pc;
            pc.k = o.k;
            pc.seed = o.seed;
            add(strong_dividing_implies_acl(*sys, fam, pc), std::nullopt, false);
        }
        Json result{{"exchange", std::move(exchange)},
                    {"softElimination", std::move(soft)},
                    {"reports", std::move(reports)},
                    {"hardFailures", hard}};
        Json config{{"maxSetSize", cfg.max_set_size}, {"exhaustiveUniverse", cfg.exhaustive_universe},
                    {"randomPool", cfg.random_pool},  {"levels", cfg.levels},
                    {"family", o.family}};
        emit("suite", config, &*sys, std::move(result), o);
        return hard > 0 ? Exit::disagreement : Exit::ok;
    }

    FuzzConfig fuzz_config(const Options& o) const {
        FuzzConfig c;
        c.seed = o.seed;
        c.universe_size = o.universe;
        c.trials = o.trials;
        c.max_level = o.max_level;
        c.rule_count = o.rules;
        c.threads = o.threads;
        c.symmetry_set_size = o.symmetry_set;
        if (!o.inject.empty()) c.injected = load_system(o.inject);
        return c;
    }

    int cmd_fuzz(const Options& o) {
        const FuzzConfig c = fuzz_config(o);
        const FuzzCase fc = fuzz_counterexamples(c);
        const Json config = fuzz_config_to_json(c);
        emit("fuzz", config, c.injected ? &*c.injected : nullptr, fuzz_case_to_json(fc), o);
        return Exit::ok;
    }

    int cmd_replay(const Options& o) {
        Json result;
        bool confirmed = true;
        const LeveledClosureSystem* shown = nullptr;
        std::optional<LeveledClosureSystem> sys;
        if (!o.fuzz_case.empty()) {
            Json j = io::read_json(o.fuzz_case);
            if (j.contains("tool")) j = j.at("result");
            const LoadedFuzzCase lc = fuzz_case_from_json(j);
            Json checks = Json::array();
            for (const LoadedFinding& f : lc.findings) {
                const bool ok = witness_replays(f.system, f.witness);
                confirmed = confirmed && ok;
                checks.push_back({{"trial", f.trial}, {"replays", ok}});
            }
            FuzzConfig cfg = lc.config;
            cfg.threads = o.threads;
            const bool regenerated = fuzz_case_to_json(fuzz_counterexamples(cfg)).dump() == j.dump();
            confirmed = confirmed && regenerated;
            result = Json{{"findings", std::move(checks)}, {"regenerated", regenerated}};
        } else {
            if (o.spec.empty() || o.witness.empty()) throw ParseError("replay needs --case, or --spec with --witness");
            int code = 0;
            sys = load(o, code);
            if (!sys) return code;
            shown = &*sys;
            Json wj = io::read_json(o.witness);
            if (wj.contains("tool")) wj = wj.at("result").at("witness");
            const AnyWitness w = witness_from_json(*sys, wj);
            confirmed = witness_replays(*sys, w);
            result = Json{{"witness", wj}};
        }
        result["confirmed"] = confirmed;
        emit("replay", Json{{"case", o.fuzz_case}, {"spec", o.spec}, {"witnessFile", o.witness}}, shown,
             std::move(result), o);
        return confirmed ? Exit::ok : Exit::replay_mismatch;
    }

    int cmd_build_example(const Options& o) {
        std::optional<LeveledClosureSystem> sys;
        if (o.example == "equivalence") {
            sys = build_equivalence_example(o.classes, o.class_size);
        } else if (o.example == "nonexchange") {
            sys = build_nonexchange_example();
        } else if (o.example == "fano") {
            sys = build_fano_plane();
        } else if (o.example == "pure-set") {
            sys = build_pure_set(o.size);
        } else if (o.example == "equality-quotient") {
            sys = build_quotient_system(equality_quotient_spec(o.size), build_pure_set(o.size));
        } else if (o.example == "quotient") {
            if (o.quotient.empty() || o.base.empty()) throw ParseError("quotient needs --quotient and --base");
            sys = build_quotient_system(quotient_from_json(io::read_json(o.quotient)), load_system(o.base));
        } else if (o.example == "graph") {
            if (o.adjacency.empty()) throw ParseError("graph needs --adjacency");
            const Json adj = io::read_json(o.adjacency);
            sys = build_trivial_acl_graph(adj.get<std::vector<std::vector<int>>>(), o.graph_levels);
        } else if (o.example == "random") {
            sys = random_rules_system(o.seed, o.universe, o.max_level, o.rules);
        } else if (o.example == "class-family") {
            const LeveledClosureSystem eq = build_equivalence_example(o.classes, o.class_size);
            const std::string text = dump(family_to_json(eq, class_membership_family(eq)));
            if (!o.out.empty()) io::write_file(o.out, text);
            out_ << text;
            return Exit::ok;
        } else {
            throw ParseError("unknown example '" + o.example + "'");
        }
        const std::string text = dump(system_to_json(*sys));
        if (!o.out.empty()) io::write_file(o.out, text);
        out_ << text;
        return Exit::ok;
    }

private:
    std::ostream& out_;
    std::ostream& err_;
};

/// Parses and runs one command line; returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Leveled closure systems: ranks, independence and exchange"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* s, bool needs_spec) {
        auto* opt = s->add_option("--spec", o.spec, "structure spec (JSON)");
        if (needs_spec) opt->required();
        s->add_option("--seed", o.seed, "seed");
        s->add_option("--format", o.format, "json or text")->check(CLI::IsMember({"json", "text"}));
        s->add_option("--out", o.out, "also write the report here");
        s->add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1, 256));
    };
    auto* validate_cmd = app.add_subcommand("validate", "check closure axioms and group coherence");
    common(validate_cmd, true);

    auto* rank_cmd = app.add_subcommand("rank", "n-rank by both methods, with certificates");
    common(rank_cmd, true);
    rank_cmd->add_option("--A", o.a)->required();
    rank_cmd->add_option("--B", o.b);
    rank_cmd->add_option("--n", o.n)->required();
    rank_cmd->add_flag("--ccs", o.ccs, "also print an n-ccs with core indices");
    rank_cmd->add_option("--verify", o.verify, "certificate file to replay");

    auto* indep_cmd = app.add_subcommand("indep", "decide A independent from B over C at level n");
    common(indep_cmd, true);
    indep_cmd->add_option("--A", o.a)->required();
    indep_cmd->add_option("--B", o.b);
    indep_cmd->add_option("--C", o.c);
    indep_cmd->add_option("--n", o.n)->required();

    auto* exchange_cmd = app.add_subcommand("exchange", "search for an exchange failure");
    common(exchange_cmd, true);
    exchange_cmd->add_option("--n", o.n)->required();
    auto* exchange_base = exchange_cmd->add_option("--C", o.c, "single base (default: every closed base)");
    exchange_cmd->add_option("--kmax", o.k_max)->check(CLI::Range(2, 64));

    auto* suite_cmd = app.add_subcommand("suite", "run every axiom and rank-law suite");
    common(suite_cmd, true);
    suite_cmd->add_option("--max-set", o.max_set)->check(CLI::Range(0, 8));
    suite_cmd->add_option("--exhaustive-universe", o.exhaustive_universe);
    suite_cmd->add_option("--pool", o.pool);
    suite_cmd->add_option("--levels", o.levels);
    suite_cmd->add_option("--family", o.family, "family spec for the strong-dividing probe");
    suite_cmd->add_option("--k", o.k)->check(CLI::Range(1, 64));

    auto* fuzz_cmd = app.add_subcommand("fuzz", "random systems probed for exchange and symmetry failures");
    common(fuzz_cmd, false);
    fuzz_cmd->add_option("--universe", o.universe)->check(CLI::Range(1, LeveledClosureSystem::kDenseLimit));
    fuzz_cmd->add_option("--trials", o.trials)->check(CLI::Range(0, 1000000));
    fuzz_cmd->add_option("--max-level", o.max_level)->check(CLI::Range(0, 8));
    fuzz_cmd->add_option("--rules", o.rules)->check(CLI::Range(0, 10000));
    fuzz_cmd->add_option("--symmetry-set", o.symmetry_set)->check(CLI::Range(0, 4));
    fuzz_cmd->add_option("--inject", o.inject, "spec probed as trial 0");

    auto* replay_cmd = app.add_subcommand("replay", "confirm a fuzz case or witness file");
    common(replay_cmd, false);
    replay_cmd->add_option("--case", o.fuzz_case);
    replay_cmd->add_option("--witness", o.witness);

    auto* build_cmd = app.add_subcommand("build-example", "emit a builder's structure spec");
    build_cmd->add_option("name", o.example,
                          "equivalence | nonexchange | fano | pure-set | equality-quotient | quotient | graph | random | "
                          "class-family")
        ->required();
    build_cmd->add_option("--classes", o.classes);
    build_cmd->add_option("--class-size", o.class_size);
    build_cmd->add_option("--size", o.size);
    build_cmd->add_option("--levels", o.graph_levels);
    build_cmd->add_option("--adjacency", o.adjacency, "JSON 0/1 matrix");
    build_cmd->add_option("--quotient", o.quotient);
    build_cmd->add_option("--base", o.base);
    build_cmd->add_option("--universe", o.universe);
    build_cmd->add_option("--max-level", o.max_level);
    build_cmd->add_option("--rules", o.rules);
    build_cmd->add_option("--seed", o.seed);
    build_cmd->add_option("--out", o.out);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Exit::ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return Exit::parse_error;
    }

    o.c_given = exchange_base->count() > 0;
    Runner r(out, err);
    try {
        if (*validate_cmd) return r.cmd_validate(o);
        if (*rank_cmd) return r.cmd_rank(o);
        if (*indep_cmd) return r.cmd_indep(o);
        if (*exchange_cmd) return r.cmd_exchange(o);
        if (*suite_cmd) return r.cmd_suite(o);
        if (*fuzz_cmd) return r.cmd_fuzz(o);
        if (*replay_cmd) return r.cmd_replay(o);
        if (*build_cmd) return r.cmd_build_example(o);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return Exit::parse_error;
    } catch (const UnknownElement& e) {
        err << "parse error: " << e.what() << "\n";
        return Exit::parse_error;
    } catch (const nlohmann::json::exception& e) {
        err << "parse error: " << e.what() << "\n";
        return Exit::parse_error;
    } catch (const InvalidSystem& e) {
        err << "invalid system: " << e.what() << "\n";
        return Exit::invalid_system;
    } catch (const UniverseTooLarge& e) {
        err << "invalid system: " << e.what() << "\n";
        return Exit::invalid_system;
    } catch (const TheoremContradiction& e) {
        err << "contradiction: " << e.what() << "\n";
        return Exit::disagreement;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return Exit::failure;
    }
    return Exit::failure;
}

inline int main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace geoclose::cli
