#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fracspec/commands.hpp"
#include "fracspec/version.hpp"

// fracspec <subcommand> [--config FILE] [--key value ...]
// Flags after the subcommand override keys from the config file.
int main(int argc, char** argv) {
    CLI::App app{"Laplacian spectra and spectral zeta functions on self-similar fractals"};
    app.allow_extras();
    app.set_version_flag("--version", std::string(fracspec::version));
    std::string command, config_path;
    app.add_option("command", command, "subcommand")->required();
    app.add_option("--config", config_path, "key = value configuration file");
    app.footer([] {
        std::string s = "Subcommands:";
        for (auto& c : fracspec::subcommands()) s += " " + c;
        return s + "\nAny config key can be given as --key value (dashes in keys read as underscores).";
    }());
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : fracspec::exit_usage;
    }

    std::string text;
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) {
            std::cerr << "error: cannot read " << config_path << '\n';
            return fracspec::exit_usage;
        }
        std::stringstream ss;
        ss << f.rdbuf();
        text = ss.str();
    }
    auto extras = app.remaining();
    std::vector<std::pair<std::string, std::string>> flags;
    for (std::size_t i = 0; i < extras.size(); ++i) {
        std::string a = extras[i];
        if (a.rfind("--", 0) != 0) {
            std::cerr << "error: unexpected argument '" << a << "'\n";
            return fracspec::exit_usage;
        }
        a = a.substr(2);
        std::string key = a, value;
        auto eq = a.find('=');
        if (eq != std::string::npos) {
            key = a.substr(0, eq);
            value = a.substr(eq + 1);
        } else if (i + 1 < extras.size()) {
            value = extras[++i];
        } else {
            std::cerr << "error: missing value for --" << key << '\n';
            return fracspec::exit_usage;
        }
        for (auto& ch : key)
            if (ch == '-') ch = '_';
        flags.emplace_back(key, value);
    }
    try {
        auto cfg = fracspec::parse_config(text, command, flags);
        return fracspec::run_command(cfg, std::cout, std::cerr);
    } catch (const fracspec::Error& e) {
        std::cerr << e.what() << '\n';
        return fracspec::exit_usage;
    }
}
