#ifndef HUMANET_RUNNER_HPP
#define HUMANET_RUNNER_HPP

#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "humanet/scenario.hpp"
#include "humanet/sim.hpp"

namespace humanet {

struct RunOverrides {
    std::optional<Environment> environment;
    std::optional<std::uint64_t> seed;
    bool withBaseline = false;
};

struct RunResult {
    std::unique_ptr<Simulation> sim;
    Environment environment = Environment::Closed;
    ProtocolConfig config;
    nlohmann::json report;
    int exitCode = 0;
};

// Builds topology and registry from the scenario, schedules the event
// script, runs to idle and assembles the metrics report.
RunResult runScenario(const Scenario& sc, const RunOverrides& ov = {});

// The traditional comparator: no communities, every node floods a
// routing-table update each t_base, data rides fewest-hop paths.
nlohmann::json runBaseline(const Scenario& sc, std::uint64_t seed);

nlohmann::json buildReport(const Simulation& sim, const Scenario& sc, Environment env,
                           const ProtocolConfig& cfg,
                           const std::optional<nlohmann::json>& baseline);

// Stable bytes: sorted keys, two-space indent, trailing newline.
std::string dumpReport(const nlohmann::json& j);

} // namespace humanet

#endif
