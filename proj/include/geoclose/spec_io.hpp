#pragma once

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "geoclose/coordination.hpp"
#include "geoclose/forking_probe.hpp"
#include "geoclose/structure_lab.hpp"

namespace geoclose {

using Json = nlohmann::ordered_json;

namespace io {

inline void expect_object(const Json& j, const std::string& what, std::initializer_list<const char*> required,
                          std::initializer_list<const char*> optional = {}) {
    if (!j.is_object()) throw ParseError(what + ": expected an object");
    for (const char* k : required)
        if (!j.contains(k)) throw ParseError(what + ": missing field '" + k + "'");
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (const char* r : required) known = known || k == r;
        for (const char* o : optional) known = known || k == o;
        if (!known) throw ParseError(what + ": unknown field '" + k + "'");
    }
}

template <typename T>
T get(const Json& j, const char* key, const std::string& what) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(what + "." + key + ": " + e.what());
    }
}

inline std::vector<long long> id_list(const Json& j, const std::string& what) {
    if (!j.is_array()) throw ParseError(what + ": expected an array of ids");
    std::vector<long long> out;
    for (const Json& v : j) {
        if (!v.is_number_integer()) throw ParseError(what + ": ids must be integers");
        out.push_back(v.get<long long>());
    }
    return out;
}

inline Json ids(const LeveledClosureSystem& sys, ElementSet s) { return Json(sys.ids_of(s)); }
inline Json ids(const LeveledClosureSystem& sys, const std::vector<Pos>& t) { return Json(sys.ids_of(t)); }

inline ElementSet set_of(const LeveledClosureSystem& sys, const Json& j, const std::string& what) {
    return sys.set_of_ids(id_list(j, what));
}

inline std::vector<Pos> tuple_of(const LeveledClosureSystem& sys, const Json& j, const std::string& what) {
    std::vector<Pos> out;
    for (long long id : id_list(j, what)) out.push_back(sys.pos_of(id));
    return out;
}

inline Json parse_text(const std::string& text, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(what + ": " + e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Json read_json(const std::string& path) { return parse_text(read_file(path), path); }

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

}  // namespace io

// ---------------------------------------------------------------------------
// Structure specs

inline Json system_to_json(const LeveledClosureSystem& sys) {
    Json j;
    Json els = Json::array();
    for (const Element& e : sys.elements()) {
        Json ej{{"id", e.id}, {"level", e.level}};
        if (!e.label.empty()) ej["label"] = e.label;
        els.push_back(std::move(ej));
    }
    j["elements"] = std::move(els);
    j["maxLevel"] = sys.max_level();
    Json cl;
    std::visit(
        [&](const auto& op) {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, RulesClosure>) {
                cl["kind"] = "rules";
                cl["rules"] = Json::array();
                for (const Rule& r : op.rules)
                    cl["rules"].push_back({{"premise", io::ids(sys, r.premise)}, {"conclusion", io::ids(sys, r.conclusion)}});
            } else if constexpr (std::is_same_v<T, TableClosure>) {
                cl["kind"] = "table";
                cl["entries"] = Json::array();
                for (const auto& [k, v] : op.entries)
                    cl["entries"].push_back({{"set", io::ids(sys, k)}, {"closure", io::ids(sys, v)}});
            } else {
                cl["kind"] = "orbit";
                cl["threshold"] = op.threshold;
            }
        },
        sys.op());
    j["closure"] = std::move(cl);
    if (sys.group()) {
        Json gens = Json::array();
        for (const Perm& g : sys.group()->generators()) gens.push_back(io::ids(sys, g));
        j["automorphisms"] = {{"generators", std::move(gens)}};
    }
    return j;
}

inline LeveledClosureSystem system_from_json(const Json& j) {
    io::expect_object(j, "spec", {"elements", "maxLevel", "closure"}, {"automorphisms"});
    if (!j["elements"].is_array()) throw ParseError("spec.elements: expected an array");
    std::vector<Element> els;
    for (const Json& e : j["elements"]) {
        io::expect_object(e, "element", {"id", "level"}, {"label"});
        Element el{io::get<long long>(e, "id", "element"), io::get<int>(e, "level", "element"), ""};
        if (e.contains("label")) el.label = io::get<std::string>(e, "label", "element");
        els.push_back(std::move(el));
    }
    const int max_level = io::get<int>(j, "maxLevel", "spec");

    // Positions follow ascending id.
    std::vector<long long> sorted;
    for (const Element& e : els) sorted.push_back(e.id);
    std::sort(sorted.begin(), sorted.end());
    auto pos = [&](long long id) {
        auto it = std::lower_bound(sorted.begin(), sorted.end(), id);
        if (it == sorted.end() || *it != id) throw UnknownElement(id);
        return static_cast<Pos>(it - sorted.begin());
    };
    auto set = [&](const Json& v, const std::string& what) {
        ElementSet s;
        for (long long id : io::id_list(v, what)) s.insert(pos(id));
        return s;
    };

    const Json& cl = j["closure"];
    if (!cl.is_object() || !cl.contains("kind")) throw ParseError("spec.closure: missing field 'kind'");
    const std::string kind = io::get<std::string>(cl, "kind", "closure");
    ClosureOperator op;
    if (kind == "rules") {
        io::expect_object(cl, "closure", {"kind", "rules"});
        RulesClosure r;
        for (const Json& rule : cl["rules"]) {
            io::expect_object(rule, "rule", {"premise", "conclusion"});
            r.rules.push_back({set(rule["premise"], "rule.premise"), set(rule["conclusion"], "rule.conclusion")});
        }
        op = std::move(r);
    } else if (kind == "table") {
        io::expect_object(cl, "closure", {"kind", "entries"});
        TableClosure t;
        for (const Json& entry : cl["entries"]) {
            io::expect_object(entry, "entry", {"set", "closure"});
            t.entries.emplace_back(set(entry["set"], "entry.set"), set(entry["closure"], "entry.closure"));
        }
        op = std::move(t);
    } else if (kind == "orbit") {
        io::expect_object(cl, "closure", {"kind"}, {"threshold"});
        OrbitClosure o;
        if (cl.contains("threshold")) o.threshold = io::get<int>(cl, "threshold", "closure");
        if (o.threshold < 0) throw ParseError("closure.threshold must be non-negative");
        op = o;
    } else {
        throw ParseError("closure.kind must be table, rules or orbit");
    }

    std::optional<std::vector<std::vector<long long>>> gens;
    if (j.contains("automorphisms")) {
        const Json& a = j["automorphisms"];
        io::expect_object(a, "automorphisms", {"generators"});
        gens.emplace();
        for (const Json& g : a["generators"]) gens->push_back(io::id_list(g, "generator"));
    }
    return LeveledClosureSystem(std::move(els), max_level, std::move(op), std::move(gens));
}

inline LeveledClosureSystem load_system(const std::string& path) { return system_from_json(io::read_json(path)); }

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Certificates and witnesses

inline Json certificate_to_json(const LeveledClosureSystem& sys, const RankCertificate& cert,
                                const CoordSequence* ccs = nullptr) {
    Json j{{"value", cert.value}, {"witness", io::ids(sys, cert.witness)}};
    if (ccs) j["coreIndices"] = ccs->core_indices;
    return j;
}

struct CertificateFile {
    RankCertificate certificate;
    std::optional<std::vector<int>> core_indices;
};

inline CertificateFile certificate_from_json(const LeveledClosureSystem& sys, const Json& j) {
    io::expect_object(j, "certificate", {"value", "witness"}, {"coreIndices"});
    CertificateFile f;
    f.certificate.value = io::get<int>(j, "value", "certificate");
    f.certificate.witness = io::tuple_of(sys, j["witness"], "certificate.witness");
    if (j.contains("coreIndices")) f.core_indices = io::get<std::vector<int>>(j, "coreIndices", "certificate");
    return f;
}

inline Json exchange_witness_to_json(const LeveledClosureSystem& sys, const ExchangeWitness& w) {
    return Json{{"violationKind", "exchange-fail"}, {"C", io::ids(sys, w.base)}, {"n", w.level},
                {"tuple", io::ids(sys, w.tuple)}};
}

inline Json symmetry_witness_to_json(const LeveledClosureSystem& sys, const SymmetryWitness& w) {
    return Json{{"violationKind", "symmetry-fail"}, {"A", io::ids(sys, w.a)}, {"B", io::ids(sys, w.b)},
                {"C", io::ids(sys, w.c)}, {"n", w.level}};
}

using AnyWitness = std::variant<ExchangeWitness, SymmetryWitness>;

inline AnyWitness witness_from_json(const LeveledClosureSystem& sys, const Json& j) {
    if (!j.is_object() || !j.contains("violationKind")) throw ParseError("witness: missing field 'violationKind'");
    const std::string kind = io::get<std::string>(j, "violationKind", "witness");
    if (kind == "exchange-fail") {
        io::expect_object(j, "witness", {"violationKind", "C", "n", "tuple"});
        return ExchangeWitness{io::set_of(sys, j["C"], "witness.C"), io::get<int>(j, "n", "witness"),
                               io::tuple_of(sys, j["tuple"], "witness.tuple")};
    }
    if (kind == "symmetry-fail") {
        io::expect_object(j, "witness", {"violationKind", "A", "B", "C", "n"});
        return SymmetryWitness{io::set_of(sys, j["A"], "witness.A"), io::set_of(sys, j["B"], "witness.B"),
                               io::set_of(sys, j["C"], "witness.C"), io::get<int>(j, "n", "witness")};
    }
    throw ParseError("witness.violationKind must be exchange-fail or symmetry-fail");
}

/// True iff the witness still shows its violation on `sys`.
inline bool witness_replays(const LeveledClosureSystem& sys, const AnyWitness& w) {
    RankEngine eng(sys);
    if (auto* e = std::get_if<ExchangeWitness>(&w)) return e->level <= sys.max_level() && replays(eng, *e);
    const auto& s = std::get<SymmetryWitness>(w);
    return s.level <= sys.max_level() && symmetry_fails(eng, s);
}

// ---------------------------------------------------------------------------
// Suite reports

inline Json witness_to_json(const LeveledClosureSystem& sys, const Witness& w) {
    Json j{{"kind", w.kind}, {"n", w.level}};
    Json sets = Json::object();
    for (const auto& [k, v] : w.sets) sets[k] = io::ids(sys, v);
    j["sets"] = std::move(sets);
    if (!w.values.empty()) {
        Json vals = Json::object();
        for (const auto& [k, v] : w.values) vals[k] = v;
        j["values"] = std::move(vals);
    }
    if (!w.tuple.empty()) j["tuple"] = io::ids(sys, w.tuple);
    return j;
}

inline Json report_to_json(const LeveledClosureSystem& sys, const AxiomReport& r) {
    Json ws = Json::array();
    for (const Witness& w : r.witnesses) ws.push_back(witness_to_json(sys, w));
    return Json{{"axiom", r.axiom},       {"outcome", to_string(r.outcome)},
                {"checked", r.checked},   {"failures", r.failures},
                {"notWitnessed", r.not_witnessed}, {"witnesses", std::move(ws)},
                {"seed", r.seed}};
}

// ---------------------------------------------------------------------------
// Families

inline std::string tuple_key(const LeveledClosureSystem& sys, const std::vector<Pos>& t) {
    std::string k;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) k += ",";
        k += std::to_string(sys.id_of(t[i]));
    }
    return k;
}

inline Json family_to_json(const LeveledClosureSystem& sys, const DefinableFamily& fam) {
    Json params = Json::array(), fibers = Json::object();
    for (const auto& [a, f] : fam.fibers) {
        params.push_back(io::ids(sys, a));
        fibers[tuple_key(sys, a)] = io::ids(sys, f);
    }
    Json j{{"stabilizerOf", io::ids(sys, fam.stabilizer_of)}, {"parameters", std::move(params)},
           {"fibers", std::move(fibers)}};
    if (!fam.name.empty()) j["name"] = fam.name;
    return j;
}

/// Loads a family and validates equivariance against the system's group.
inline DefinableFamily family_from_json(const LeveledClosureSystem& sys, const Json& j) {
    io::expect_object(j, "family", {"stabilizerOf", "parameters", "fibers"}, {"name"});
    DefinableFamily fam;
    if (j.contains("name")) fam.name = io::get<std::string>(j, "name", "family");
    fam.stabilizer_of = io::set_of(sys, j["stabilizerOf"], "family.stabilizerOf");
    if (!j["fibers"].is_object()) throw ParseError("family.fibers: expected an object");
    for (const Json& p : j["parameters"]) {
        const std::vector<Pos> a = io::tuple_of(sys, p, "family.parameters");
        const std::string key = tuple_key(sys, a);
        if (!j["fibers"].contains(key)) throw ParseError("family.fibers: no fiber for parameter " + key);
        fam.fibers[a] = io::set_of(sys, j["fibers"][key], "family.fibers");
    }
    if (fam.fibers.size() != j["fibers"].size()) throw ParseError("family.fibers: fiber without a listed parameter");
    validate_family(sys, fam);
    return fam;
}

// ---------------------------------------------------------------------------
// Quotient specs

inline QuotientSpec quotient_from_json(const Json& j) {
    io::expect_object(j, "quotient", {"baseSize", "relations"}, {"threshold"});
    QuotientSpec q;
    q.base_size = io::get<int>(j, "baseSize", "quotient");
    if (j.contains("threshold")) q.threshold = io::get<int>(j, "threshold", "quotient");
    for (const Json& r : j["relations"]) {
        io::expect_object(r, "relation", {"arity", "classes", "level"});
        QuotientRelation rel;
        rel.arity = io::get<int>(r, "arity", "relation");
        rel.level = io::get<int>(r, "level", "relation");
        rel.classes = io::get<std::vector<std::vector<std::vector<Pos>>>>(r, "classes", "relation");
        q.relations.push_back(std::move(rel));
    }
    return q;
}

// ---------------------------------------------------------------------------
// Fuzz cases

inline Json fuzz_config_to_json(const FuzzConfig& c) {
    Json j{{"seed", c.seed},
           {"universeSize", c.universe_size},
           {"trials", c.trials},
           {"maxLevel", c.max_level},
           {"ruleCount", c.rule_count},
           {"symmetrySetSize", c.symmetry_set_size}};
    j["injected"] = c.injected ? system_to_json(*c.injected) : Json(nullptr);
    return j;
}

inline FuzzConfig fuzz_config_from_json(const Json& j) {
    io::expect_object(j, "fuzz config", {"seed", "universeSize", "trials", "maxLevel", "ruleCount", "symmetrySetSize"},
                      {"injected"});
    FuzzConfig c;
    c.seed = io::get<std::uint64_t>(j, "seed", "config");
    c.universe_size = io::get<int>(j, "universeSize", "config");
    c.trials = io::get<int>(j, "trials", "config");
    c.max_level = io::get<int>(j, "maxLevel", "config");
    c.rule_count = io::get<int>(j, "ruleCount", "config");
    c.symmetry_set_size = io::get<int>(j, "symmetrySetSize", "config");
    if (j.contains("injected") && !j["injected"].is_null()) c.injected = system_from_json(j["injected"]);
    return c;
}

inline Json finding_to_json(const Finding& f) {
    const LeveledClosureSystem& sys = *f.system;
    Json j{{"trial", f.trial}, {"system", system_to_json(sys)}};
    j["witness"] = f.kind == Finding::Kind::exchange ? exchange_witness_to_json(sys, f.exchange)
                                                     : symmetry_witness_to_json(sys, f.symmetry);
    return j;
}

inline Json fuzz_case_to_json(const FuzzCase& fc) {
    Json findings = Json::array();
    for (const Finding& f : fc.findings) findings.push_back(finding_to_json(f));
    return Json{{"seed", fc.config.seed}, {"config", fuzz_config_to_json(fc.config)}, {"findings", std::move(findings)}};
}

struct LoadedFinding {
    std::uint64_t trial = 0;
    LeveledClosureSystem system;
    AnyWitness witness;
};

struct LoadedFuzzCase {
    FuzzConfig config;
    std::vector<LoadedFinding> findings;
};

inline LoadedFuzzCase fuzz_case_from_json(const Json& j) {
    io::expect_object(j, "fuzz case", {"seed", "config", "findings"});
    LoadedFuzzCase out;
    out.config = fuzz_config_from_json(j["config"]);
    if (io::get<std::uint64_t>(j, "seed", "fuzz case") != out.config.seed)
        throw ParseError("fuzz case seed does not match its config");
    for (const Json& f : j["findings"]) {
        io::expect_object(f, "finding", {"trial", "system", "witness"});
        LeveledClosureSystem sys = system_from_json(f["system"]);
        AnyWitness w = witness_from_json(sys, f["witness"]);
        out.findings.push_back({io::get<std::uint64_t>(f, "trial", "finding"), std::move(sys), std::move(w)});
    }
    return out;
}

}  // namespace geoclose
