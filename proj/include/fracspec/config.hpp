#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fracspec/boundary.hpp"
#include "fracspec/decimation.hpp"
#include "fracspec/error.hpp"

namespace fracspec {

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names = {"dim",      "vn",    "graph-eigs", "restrict-form", "walk",
                                                   "phi",      "spiral", "julia",     "spectrum",      "count",
                                                   "renewal",  "zeta",  "casimir",    "heat-trace"};
    return names;
}

enum class KeyType { number, integer, number_list, text, seed };

struct KeySpec {
    std::string name;
    KeyType type;
    std::string fallback;  // default as text, empty when the key has none
    std::string help;
};

// Every recognised key; `section` is "general" or a subcommand name.
const std::map<std::string, std::vector<KeySpec>>& key_table();

struct RunConfig {
    std::string command;
    std::map<std::string, std::string> values;  // validated, defaults not filled in

    bool has(const std::string& key) const;
    std::string text(const std::string& key) const;
    double number(const std::string& key) const;
    std::int64_t integer(const std::string& key) const;
    std::vector<double> numbers(const std::string& key) const;
    std::uint64_t seed() const;
    Boundary bc() const { return parse_boundary(text("bc")); }
    // Every effective value, defaults included, as text.
    std::map<std::string, std::string> echo() const;
};

struct ConfigErrors : ConfigError {
    explicit ConfigErrors(std::vector<std::string> errs);
    std::vector<std::string> errors;
};

// `key = value` lines, `#` comments, `[section]` headers naming "general" or a subcommand.
// `overrides` (command-line flags) replace file values. Throws ConfigErrors listing every problem found.
RunConfig parse_config(const std::string& text, const std::string& command = "",
                       const std::vector<std::pair<std::string, std::string>>& overrides = {});

// Built-in "sg" or the custom system described by p, A, R (and optional growth constants).
SpectralSystem make_system(const RunConfig& cfg);

}  // namespace fracspec
