#ifndef HUMANET_SCENARIO_HPP
#define HUMANET_SCENARIO_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "humanet/arts.hpp"
#include "humanet/stack_select.hpp"
#include "humanet/types.hpp"

namespace humanet {

struct ScenarioNode {
    NodeId id = 0;
    double x = 0.0;
    double y = 0.0;
    bool misbehaving = false;
    bool gateway = false;
    std::string name; // display label, defaults to N<id>
};

struct ScenarioArt {
    std::string name;
    Slot slot = Slot::Application;
    ArtCategory category = ArtCategory::Layer;
    std::set<std::string> ops;
    std::map<std::string, double> params;
};

struct ScenarioCulture {
    std::string name;
    std::vector<std::string> arts;
};

struct ScenarioFile {
    std::string name;
    std::uint64_t size = 0;   // synthetic seeded content of this length
    std::string path;         // or read bytes from this path
};

struct ScenarioEvent {
    double time = 0.0;
    std::string verb;
    std::vector<std::string> args;
    int line = 0;
};

// Declarative experiment input. Parsed from the line-oriented scenario
// format (see README), fully cross-checked before a run starts.
struct Scenario {
    std::string name = "scenario";
    double duration = 10.0;
    std::uint64_t seed = 0;
    double radioRange = 1.0;
    double lossRate = 0.0;
    std::optional<Environment> environment;

    double tJoin = 1.0;
    double tRefresh = 5.0;
    double tBase = 5.0;
    int rreqTtl = 16;
    int friendTtl = 8;
    int dataTtl = 64;
    int floodTtl = 64;
    std::size_t chunkSize = 1024;
    std::uint32_t window = 4;
    std::uint32_t maxRetries = 16;
    double txCost = 1.0;
    double rxCost = 0.5;
    WatchdogParams watchdog;

    std::vector<ScenarioNode> nodes;
    std::vector<ScenarioArt> arts;
    std::vector<ScenarioCulture> cultures;
    std::vector<ScenarioFile> files;
    std::vector<ScenarioEvent> events;

    std::string displayName(NodeId n) const;
};

Scenario parseScenario(const std::string& text, const std::string& originName);
Scenario loadScenario(const std::string& path);

// Cross-reference validation: node ids, culture names, community labels,
// file names, event times. Throws Err::ValidationError with a line hint.
void validateScenario(const Scenario& s);

// Builds the registry for a run: stock arts and cultures plus whatever
// the scenario defines.
Registry buildRegistry(const Scenario& s);

// Deterministic synthetic payload for size-declared files.
std::string synthesizeFileBytes(const std::string& name, std::uint64_t size, std::uint64_t seed);

Environment classifyEnvironment(const Scenario& s);

} // namespace humanet

#endif
