// humanet command line: validate scenarios, run them, dump packet traces,
// and compare against the periodic-flood baseline.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "humanet/runner.hpp"

namespace {

int writeOut(const std::string& text, const std::string& outPath) {
    if (outPath.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(outPath, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write " << outPath << "\n";
        return 2;
    }
    out << text;
    return 0;
}

std::optional<humanet::Environment> parseEnv(const std::string& s) {
    if (s == "closed") return humanet::Environment::Closed;
    if (s == "open") return humanet::Environment::Open;
    return std::nullopt;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"humanet: community-scoped MANET service simulator"};
    app.require_subcommand(1);

    std::string path;
    std::string outPath;
    std::string tracePath;
    std::string envName;
    std::uint64_t seed = 0;
    bool seedSet = false;

    auto addCommon = [&](CLI::App* cmd, bool withOut) {
        cmd->add_option("scenario", path, "scenario file")->required();
        cmd->add_option("--env", envName, "override environment (closed|open)");
        cmd->add_option("--seed", seed, "override the scenario seed")
            ->each([&](const std::string&) { seedSet = true; });
        if (withOut) cmd->add_option("--out", outPath, "write output to a file");
    };

    CLI::App* validate = app.add_subcommand("validate", "parse and cross-check a scenario");
    validate->add_option("scenario", path, "scenario file")->required();

    CLI::App* run = app.add_subcommand("run", "run a scenario, print the metrics report");
    addCommon(run, true);
    run->add_option("--trace", tracePath, "also write the packet trace to a file");

    CLI::App* compare =
        app.add_subcommand("compare", "run humanistic and baseline modes, report both");
    addCommon(compare, true);

    CLI::App* trace = app.add_subcommand("trace", "run a scenario, print the packet trace");
    addCommon(trace, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            humanet::loadScenario(path);
            std::cout << "ok\n";
            return 0;
        }

        humanet::Scenario sc = humanet::loadScenario(path);
        humanet::RunOverrides ov;
        if (!envName.empty()) {
            auto env = parseEnv(envName);
            if (!env) {
                std::cerr << "bad --env value '" << envName << "'\n";
                return 2;
            }
            ov.environment = env;
        }
        if (seedSet) ov.seed = seed;
        ov.withBaseline = compare->parsed();

        humanet::RunResult result = humanet::runScenario(sc, ov);

        if (trace->parsed()) {
            int rc = writeOut(result.sim->traceText(), outPath);
            return rc != 0 ? rc : result.exitCode;
        }
        int rc = writeOut(humanet::dumpReport(result.report), outPath);
        if (rc != 0) return rc;
        if (!tracePath.empty()) {
            rc = writeOut(result.sim->traceText(), tracePath);
            if (rc != 0) return rc;
        }
        return result.exitCode;
    } catch (const humanet::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
