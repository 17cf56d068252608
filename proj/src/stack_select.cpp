#include "humanet/stack_select.hpp"

#include <algorithm>

namespace humanet {

const char* environmentName(Environment e) {
    return e == Environment::Closed ? "closed" : "open";
}

Environment classifyEnvironment(std::optional<Environment> declared, bool anyMisbehaving) {
    if (declared) return *declared;
    return anyMisbehaving ? Environment::Open : Environment::Closed;
}

ProtocolConfig selectProtocol(Environment env) {
    if (env == Environment::Closed) return {"P1", "DSR", false};
    return {"P2", "AODV", true};
}

void ReputationTable::observe(NodeId relay, bool forwarded) {
    observations_++;
    double s = score(relay);
    if (forwarded)
        s = std::min(1.0, s + params_.forwardReward);
    else
        s = std::max(0.0, s - params_.dropPenalty);
    scores_[relay] = s;
}

double ReputationTable::score(NodeId relay) const {
    auto it = scores_.find(relay);
    return it == scores_.end() ? params_.init : it->second;
}

} // namespace humanet
