#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "polyjet/cli.hpp"

namespace cli = polyjet::cli;

int main(int argc, char** argv) {
    CLI::App app{"Multi-time Hamilton geometry on the dual 1-jet bundle"};
    std::string command;
    std::string manifest_path;
    std::string json_path;
    cli::Overrides overrides;
    app.add_option("command", command, "christoffel | connection | verify | regularity")
        ->required()
        ->check(CLI::IsMember({"christoffel", "connection", "verify", "regularity"}));
    app.add_option("manifest", manifest_path, "manifest JSON file")->required();
    app.add_option("--json", json_path, "also write the JSON report to this path");
    app.add_option("--seed", overrides.seed, "sample-domain seed (overrides POLYJET_SEED and the manifest)");
    app.add_option("--tol", overrides.tol, "single tolerance replacing equiv, law and regularity");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cli::exit_code(polyjet::ErrorCategory::config);
    }

    if (!overrides.seed) {
        if (const char* env = std::getenv("POLYJET_SEED")) {
            try {
                overrides.seed = std::stoull(env);
            } catch (const std::exception&) {
                std::cerr << "error [config]: POLYJET_SEED is not an unsigned integer: " << env << '\n';
                return cli::exit_code(polyjet::ErrorCategory::config);
            }
        }
    }

    try {
        const auto manifest = cli::load_manifest_file(manifest_path, overrides);
        const auto report = cli::run_command(command, manifest);
        std::cout << cli::render_table(report);
        if (!json_path.empty()) {
            std::ofstream out(json_path);
            if (!out) {
                std::cerr << "error [config]: cannot write " << json_path << '\n';
                return cli::exit_code(polyjet::ErrorCategory::config);
            }
            out << cli::to_json(report).dump(2) << '\n';
        }
        return report.exit_code();
    } catch (const polyjet::Error& e) {
        std::cerr << "error [" << polyjet::to_string(e.category()) << "]: " << e.what() << '\n';
        return cli::exit_code(e.category());
    }
}
