#include "fracspec/config.hpp"

#include <algorithm>
#include <cmath>
#include <cerrno>
#include <cstdlib>
#include <set>
#include <sstream>

#include "fracspec/zeta.hpp"

namespace fracspec {

const std::map<std::string, std::vector<KeySpec>>& key_table() {
    using K = KeyType;
    static const std::map<std::string, std::vector<KeySpec>> table = {
        {"general",
         {{"system", K::text, "sg", "sg or custom"},
          {"bc", K::text, "dirichlet", "dirichlet or neumann"},
          {"tol", K::number, "1e-10", "target accuracy, > 0"},
          {"seed", K::seed, "0x5EED", "64-bit RNG seed"},
          {"threads", K::integer, "1", "worker threads; results do not depend on it"},
          {"output", K::text, "-", "JSON output path, - for stdout"},
          {"csv", K::text, "", "CSV output path (subcommands with tables)"},
          {"p", K::number_list, "", "custom system: polynomial coefficients, ascending"},
          {"A", K::number_list, "", "custom system: exceptional values"},
          {"R", K::text, "", "custom system: num:den;num:den integer coefficient lists per w"},
          {"zero_modes", K::integer, "0", "custom system: multiplicity of eigenvalue 0"},
          {"x0", K::number, "", "custom system: growth constants start point"},
          {"C1", K::number, "", "custom system: lower growth constant"},
          {"C2", K::number, "", "custom system: upper growth constant"}}},
        {"dim", {{"ratios", K::number_list, "0.5,0.5,0.5", "contraction ratios"}}},
        {"vn", {{"level", K::integer, "2", "n in V_n"}}},
        {"graph-eigs",
         {{"level", K::integer, "3", "graph level"},
          {"mode", K::text, "spectrum", "spectrum or oracle"},
          {"level_lo", K::integer, "4", "oracle: first level"},
          {"level_hi", K::integer, "6", "oracle: last level"},
          {"branches", K::integer, "10", "oracle: branches compared"}}},
        {"restrict-form",
         {{"level", K::integer, "1", "graph level"},
          {"subset", K::number_list, "", "vertex indices kept (default: the three corners)"},
          {"conductance", K::number, "1", "edge conductance"}}},
        {"walk",
         {{"mode", K::text, "hitting", "hitting, branching, returns or pgf"},
          {"level", K::integer, "1", "fine graph level"},
          {"start", K::integer, "-1", "start vertex, -1 for the first corner"},
          {"samples", K::integer, "100000", "Monte Carlo samples"},
          {"step_budget", K::integer, "1000000", "steps allowed per sample"},
          {"generations", K::integer, "10", "branching generations"},
          {"max_steps", K::integer, "320", "return probabilities: steps"},
          {"n_lo", K::integer, "64", "fluctuation band start"},
          {"n_hi", K::integer, "320", "fluctuation band end"},
          {"pgf_num", K::number_list, "0,0,1", "offspring pgf numerator"},
          {"pgf_den", K::number_list, "4,-3", "offspring pgf denominator"}}},
        {"phi",
         {{"coeffs", K::number_list, "0,5,1", "polynomial, ascending"},
          {"z", K::number, "1", "real part of the argument"},
          {"z_im", K::number, "0", "imaginary part"},
          {"theta", K::number, "", "growth profile direction (radians)"},
          {"t0", K::number, "0", "growth profile start in log_lambda |z|"},
          {"t1", K::number, "3", "growth profile end"}}},
        {"spiral",
         {{"coeffs", K::number_list, "0,5,1", "polynomial, ascending"},
          {"z0", K::number, "10", "start point on the real axis"}}},
        {"julia",
         {{"coeffs", K::number_list, "0,5,1", "polynomial, ascending"},
          {"depth", K::integer, "24", "backward iteration depth"},
          {"samples", K::integer, "256", "sampled points"},
          {"a", K::number, "", "quadratic criterion: leading coefficient"},
          {"omega", K::number, "", "quadratic criterion: linear coefficient"}}},
        {"spectrum", {{"X", K::number, "1000", "eigenvalue cutoff"}}},
        {"count", {{"x", K::number, "1000", "argument of N(x)"}}},
        {"renewal",
         {{"gamma", K::number_list, "0.4472135954999579,0.4472135954999579,0.4472135954999579", "ratios gamma_j"},
          {"h", K::number, "0.01", "grid step"},
          {"t0", K::number, "0", "grid start"},
          {"t1", K::number, "20", "grid end"}}},
        {"zeta",
         {{"w", K::number, "", "partial zeta at this w; omit for the assembled zeta"},
          {"s", K::number, "-0.5", "real part of s"},
          {"s_im", K::number, "0", "imaginary part of s"},
          {"recipe", K::text, "corrected", "corrected or published prefactor (partial zeta only)"},
          {"series_cutoff", K::number, "1e6", "eigenvalue cutoff for Re s >= 1"}}},
        {"casimir", {{"recipe", K::text, "corrected", "corrected or published"}}},
        {"heat-trace",
         {{"t_min", K::number, "1e-4", "smallest t"},
          {"t_max", K::number, "1e-3", "largest t"},
          {"t_points", K::integer, "200", "log-spaced points"},
          {"X", K::number, "", "eigenvalue cutoff (default 60 / t_min)"}}},
    };
    return table;
}

ConfigErrors::ConfigErrors(std::vector<std::string> errs)
    : ConfigError([&] {
          std::string s = "invalid configuration:";
          for (auto& e : errs) s += "\n  " + e;
          return s;
      }()),
      errors(std::move(errs)) {}

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
    std::string t = trim(s);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && std::isfinite(out);
}

bool parse_int(const std::string& s, std::int64_t& out) {
    std::string t = trim(s);
    if (t.empty()) return false;
    char* end = nullptr;
    errno = 0;
    long long v = std::strtoll(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size() || errno) return false;
    out = v;
    return true;
}

bool parse_seed(const std::string& s, std::uint64_t& out) {
    std::string t = trim(s);
    if (t.empty() || t[0] == '-') return false;
    char* end = nullptr;
    errno = 0;
    unsigned long long v = std::strtoull(t.c_str(), &end, 0);
    if (end != t.c_str() + t.size() || errno) return false;
    out = v;
    return true;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

bool parse_list(const std::string& s, std::vector<double>& out) {
    out.clear();
    for (auto& item : split(s, ',')) {
        double v;
        if (!parse_double(item, v)) return false;
        out.push_back(v);
    }
    return !out.empty();
}

const KeySpec* find_key(const std::string& section, const std::string& key) {
    auto& t = key_table();
    auto it = t.find(section);
    if (it == t.end()) return nullptr;
    for (auto& k : it->second)
        if (k.name == key) return &k;
    return nullptr;
}

const KeySpec* lookup(const std::string& command, const std::string& key) {
    if (auto k = find_key("general", key)) return k;
    return find_key(command, key);
}

const std::map<std::string, std::vector<std::string>> choices = {
    {"system", {"sg", "custom"}},
    {"bc", {"dirichlet", "neumann"}},
    {"recipe", {"corrected", "published"}},
};

std::string check_value(const std::string& section, const KeySpec& k, const std::string& v) {
    const std::string where = "'" + k.name + "'";
    switch (k.type) {
        case KeyType::number: {
            double x;
            if (!parse_double(v, x)) return "malformed number for " + where + ": '" + v + "'";
            if (k.name == "tol" && !(x > 0 && x < 1)) return "tolerance out of range (0, 1): " + v;
            if ((k.name == "h" || k.name == "X" || k.name == "t_min" || k.name == "t_max" || k.name == "conductance" ||
                 k.name == "series_cutoff") && !(x > 0))
                return where + " must be positive: " + v;
            return "";
        }
        case KeyType::integer: {
            std::int64_t x;
            if (!parse_int(v, x)) return "malformed integer for " + where + ": '" + v + "'";
            if ((k.name == "threads" || k.name == "samples" || k.name == "step_budget" || k.name == "t_points" ||
                 k.name == "branches" || k.name == "depth") && x < 1)
                return where + " must be >= 1: " + v;
            if ((k.name == "level" || k.name == "level_lo" || k.name == "level_hi" || k.name == "generations" ||
                 k.name == "max_steps" || k.name == "zero_modes") && x < 0)
                return where + " must be >= 0: " + v;
            return "";
        }
        case KeyType::number_list: {
            std::vector<double> xs;
            if (!parse_list(v, xs)) return "malformed number list for " + where + ": '" + v + "'";
            return "";
        }
        case KeyType::seed: {
            std::uint64_t x;
            if (!parse_seed(v, x)) return "malformed seed: '" + v + "'";
            return "";
        }
        case KeyType::text: {
            auto it = choices.find(k.name);
            if (it != choices.end() &&
                std::find(it->second.begin(), it->second.end(), v) == it->second.end())
                return "invalid value for " + where + ": '" + v + "'";
            if (k.name == "mode") {
                std::vector<std::string> ok = section == "walk" ? std::vector<std::string>{"hitting", "branching", "returns", "pgf"}
                                                                : std::vector<std::string>{"spectrum", "oracle"};
                if (std::find(ok.begin(), ok.end(), v) == ok.end()) return "invalid value for 'mode': '" + v + "'";
            }
            return "";
        }
    }
    return "";
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& command,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
    RunConfig cfg;
    cfg.command = command;
    std::vector<std::string> errors;
    if (!command.empty() && !key_table().count(command)) errors.push_back("unknown subcommand '" + command + "'");
    std::string section;
    std::set<std::pair<std::string, std::string>> seen;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string at = "line " + std::to_string(lineno) + ": ";
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back(at + "malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!key_table().count(section)) errors.push_back(at + "unknown section [" + section + "]");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back(at + "expected key = value");
            continue;
        }
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        const std::string sec = section.empty() || section == "general" ? command : section;
        const KeySpec* spec = section == "general" ? find_key("general", key) : lookup(sec, key);
        if (!spec) {
            errors.push_back(at + "unknown key '" + key + "'" + (sec.empty() ? "" : " for " + sec));
            continue;
        }
        if (!seen.insert({sec, key}).second) {
            errors.push_back(at + "duplicate key '" + key + "'");
            continue;
        }
        auto err = check_value(sec, *spec, value);
        if (!err.empty()) {
            errors.push_back(at + err);
            continue;
        }
        // Sections for other subcommands are validated but not applied.
        if (sec == command || find_key("general", key)) cfg.values[key] = value;
    }
    std::set<std::string> flagged;
    for (auto& [key, value] : overrides) {
        const KeySpec* spec = lookup(command, key);
        if (!spec) {
            errors.push_back("flag --" + key + ": unknown key" + (command.empty() ? "" : " for " + command));
            continue;
        }
        if (!flagged.insert(key).second) {
            errors.push_back("flag --" + key + " given twice");
            continue;
        }
        auto err = check_value(command, *spec, value);
        if (!err.empty()) {
            errors.push_back("flag --" + key + ": " + err);
            continue;
        }
        cfg.values[key] = value;
    }
    if (cfg.values.count("system") && cfg.values.at("system") == "custom")
        for (const char* k : {"p", "A", "R"})
            if (!cfg.values.count(k)) errors.push_back(std::string("custom system needs '") + k + "'");
    if (!errors.empty()) throw ConfigErrors(errors);
    return cfg;
}

bool RunConfig::has(const std::string& key) const {
    if (values.count(key)) return true;
    auto k = lookup(command, key);
    return k && !k->fallback.empty();
}

std::string RunConfig::text(const std::string& key) const {
    auto it = values.find(key);
    if (it != values.end()) return it->second;
    auto k = lookup(command, key);
    if (!k) throw ConfigError("no such key '" + key + "' for " + command);
    if (k->fallback.empty()) throw ConfigError("missing value for '" + key + "'");
    return k->fallback;
}

double RunConfig::number(const std::string& key) const {
    double v = 0;
    if (!parse_double(text(key), v)) throw ConfigError("malformed number for '" + key + "'");
    return v;
}

std::int64_t RunConfig::integer(const std::string& key) const {
    std::int64_t v = 0;
    if (!parse_int(text(key), v)) throw ConfigError("malformed integer for '" + key + "'");
    return v;
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
    std::vector<double> v;
    if (!parse_list(text(key), v)) throw ConfigError("malformed list for '" + key + "'");
    return v;
}

std::uint64_t RunConfig::seed() const {
    std::uint64_t v = 0;
    if (!parse_seed(text("seed"), v)) throw ConfigError("malformed seed");
    return v;
}

std::map<std::string, std::string> RunConfig::echo() const {
    std::map<std::string, std::string> out;
    for (const char* sec : {"general", command.c_str()}) {
        auto it = key_table().find(sec);
        if (it == key_table().end()) continue;
        for (auto& k : it->second)
            if (values.count(k.name)) out[k.name] = values.at(k.name);
            else if (!k.fallback.empty()) out[k.name] = k.fallback;
    }
    return out;
}

SpectralSystem make_system(const RunConfig& cfg) {
    const Boundary bc = cfg.bc();
    if (cfg.text("system") == "sg") return sg_spectral_system(bc);
    SpectralSystem s;
    s.name = "custom";
    s.bc = bc;
    s.p = PolynomialMap<double>(cfg.numbers("p"));
    s.phi = RealPoincare::solve(s.p);
    s.A = cfg.numbers("A");
    s.zero_modes = static_cast<int>(cfg.integer("zero_modes"));
    for (auto& part : split(cfg.text("R"), ';')) {
        auto nd = split(part, ':');
        if (nd.size() != 2) throw ConfigError("R: each entry must be num:den");
        auto ints = [](const std::string& t) {
            std::vector<double> xs;
            if (!parse_list(t, xs)) throw ConfigError("R: malformed coefficient list '" + t + "'");
            std::vector<long long> out;
            for (double x : xs) {
                if (x != std::round(x)) throw ConfigError("R: coefficients must be integers");
                out.push_back(static_cast<long long>(x));
            }
            return out;
        };
        s.R.push_back(make_gf(ints(nd[0]), ints(nd[1])));
    }
    if (cfg.values.count("C1") && cfg.values.count("C2") && cfg.values.count("x0"))
        s.growth = GrowthConstants{cfg.number("C1"), cfg.number("C2"), cfg.number("x0")};
    else
        s.growth = fit_growth_constants(s.phi, cfg.values.count("x0") ? cfg.number("x0") : 10.0);
    s.validate();
    return s;
}

}  // namespace fracspec
