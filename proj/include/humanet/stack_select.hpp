#ifndef HUMANET_STACK_SELECT_HPP
#define HUMANET_STACK_SELECT_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "humanet/types.hpp"

namespace humanet {

// Closed: cooperative network, minimal threats. Open: uncooperative,
// nodes may misbehave to save themselves.
enum class Environment { Closed, Open };

const char* environmentName(Environment e);

struct ProtocolConfig {
    std::string name;            // "P1" or "P2"
    std::string basicRoutingArt; // "DSR" (P1) or "AODV" (P2)
    bool watchdog = false;

    bool operator==(const ProtocolConfig&) const = default;
};

// Declared environment wins; otherwise a scenario with any flagged
// misbehaving node is treated as open.
Environment classifyEnvironment(std::optional<Environment> declared, bool anyMisbehaving);

// Closed -> P1 (basic only, source-routed). Open -> P2 (basic + watchdog,
// table-driven next hops).
ProtocolConfig selectProtocol(Environment env);

struct WatchdogParams {
    double init = 1.0;
    double dropPenalty = 0.2;
    double forwardReward = 0.05;
    double threshold = 0.5;
};

// Per-observer relay scores. Allocated lazily on the first observation so
// closed-environment runs carry zero add-on state.
class ReputationTable {
public:
    ReputationTable() = default;
    explicit ReputationTable(NodeId owner, WatchdogParams params)
        : owner_(owner), params_(params) {}

    void observe(NodeId relay, bool forwarded);
    double score(NodeId relay) const;
    bool excluded(NodeId relay) const { return score(relay) < params_.threshold; }
    NodeId owner() const { return owner_; }
    std::uint64_t observations() const { return observations_; }
    const std::map<NodeId, double>& scores() const { return scores_; }

private:
    NodeId owner_ = 0;
    WatchdogParams params_;
    std::map<NodeId, double> scores_;
    std::uint64_t observations_ = 0;
};

} // namespace humanet

#endif
