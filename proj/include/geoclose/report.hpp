#pragma once

#include <cstdint>
#include <set>
#include <sstream>
#include <string>

#include "geoclose/spec_io.hpp"

namespace geoclose {

inline constexpr const char* kToolName = "geoclose";
inline constexpr const char* kToolVersion = "0.1.0";

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 0xf];
    return s;
}

inline std::string spec_hash(const LeveledClosureSystem& sys) { return hex64(fnv1a(system_to_json(sys).dump())); }

/// Wraps a command result with tool, version, seed and the hashes of the
/// run configuration and the input spec.
inline Json envelope(const std::string& command, std::uint64_t seed, const Json& config, const std::string& spec_hash,
                     Json result) {
    return Json{{"tool", kToolName},
                {"version", kToolVersion},
                {"command", command},
                {"seed", seed},
                {"configHash", hex64(fnv1a(config.dump()))},
                {"specHash", spec_hash},
                {"config", config},
                {"result", std::move(result)}};
}

namespace detail {

inline const std::set<std::string>& element_keys() {
    static const std::set<std::string> keys{"A", "B", "C", "D", "x", "b", "witness", "tuple", "elements", "premise",
                                            "conclusion", "set", "closure", "first", "second", "stabilizerOf",
                                            "failingSubset", "aclA", "basis", "divider", "sequence"};
    return keys;
}

inline std::string label_list(const LeveledClosureSystem* sys, const Json& arr) {
    std::string s = "{";
    bool first = true;
    for (const Json& v : arr) {
        if (!first) s += ", ";
        first = false;
        if (sys && v.is_number_integer()) {
            try {
                s += sys->name_of(sys->pos_of(v.get<long long>()));
                continue;
            } catch (const UnknownElement&) {
            }
        }
        s += v.dump();
    }
    return s + "}";
}

inline void render(std::ostringstream& out, const LeveledClosureSystem* sys, const Json& j, int indent, bool elements) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            const bool el = elements || element_keys().count(k) > 0 || k == "sets";
            if (v.is_object() || (v.is_array() && !v.empty() && (v.front().is_object() || v.front().is_array()) &&
                                  !(el && v.front().is_array()))) {
                out << pad << k << ":\n";
                render(out, sys, v, indent + 1, k == "sets");
            } else if (v.is_array()) {
                bool ints = true;
                for (const Json& x : v) ints = ints && x.is_number_integer();
                if (el && ints) {
                    out << pad << k << ": " << label_list(sys, v) << "\n";
                } else if (el) {
                    out << pad << k << ":";
                    for (const Json& x : v) out << " " << label_list(sys, x);
                    out << "\n";
                } else {
                    out << pad << k << ": " << v.dump() << "\n";
                }
            } else {
                out << pad << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
            }
        }
    } else if (j.is_array()) {
        std::size_t i = 0;
        for (const Json& v : j) {
            out << pad << "- [" << i++ << "]\n";
            render(out, sys, v, indent + 1, elements);
        }
    } else {
        out << pad << j.dump() << "\n";
    }
}

}  // namespace detail

/// Text form of a JSON report: one "key: value" line per field, nested
/// blocks indented, element id lists shown with labels.
inline std::string render_text(const Json& report, const LeveledClosureSystem* sys) {
    std::ostringstream out;
    detail::render(out, sys, report, 0, false);
    return out.str();
}

}  // namespace geoclose
