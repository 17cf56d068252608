#ifndef HUMANET_COUNTERS_HPP
#define HUMANET_COUNTERS_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "humanet/types.hpp"

namespace humanet {

// Global transmission counters. Conservation is kept at delivery-attempt
// granularity: a unicast is one attempt, a broadcast is one attempt per
// neighbor (or one phantom no-neighbor attempt when nobody is in range),
// and every attempt ends up either delivered or in exactly one drop
// bucket. Handler-side ttl discards are also drops; duplicate receptions
// count as delivered.
struct TxCounters {
    std::uint64_t broadcasts = 0;
    std::uint64_t unicasts = 0;
    std::uint64_t controlTx = 0;
    std::uint64_t dataTx = 0;
    std::uint64_t friendRelays = 0;

    std::uint64_t attempts = 0;
    std::uint64_t delivered = 0;
    std::uint64_t droppedLoss = 0;
    std::uint64_t droppedMisbehaving = 0;
    std::uint64_t droppedNoNeighbor = 0;
    std::uint64_t droppedTtl = 0;

    std::map<NodeId, std::uint64_t> perNodeTx;
    std::map<NodeId, std::uint64_t> perNodeDataTx;
    std::map<NodeId, std::uint64_t> perNodeRx;
    // tx per node per community, for the participation report
    std::map<CommunityId, std::map<NodeId, std::uint64_t>> perCommunityTx;

    std::uint64_t transmissions() const { return broadcasts + unicasts; }
    std::uint64_t dropped() const {
        return droppedLoss + droppedMisbehaving + droppedNoNeighbor + droppedTtl;
    }
};

// Flood bookkeeping: how many flood waves were originated per packet
// kind, and how many transmissions each kind has cost in total.
struct FloodCounters {
    std::map<std::string, std::uint64_t> started;
    std::map<std::string, std::uint64_t> txByKind;
};

} // namespace humanet

#endif
