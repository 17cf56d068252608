#ifndef HUMANET_PROTOCOL_HPP
#define HUMANET_PROTOCOL_HPP

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "humanet/machine.hpp"
#include "humanet/packet.hpp"
#include "humanet/stack_select.hpp"
#include "humanet/types.hpp"

namespace humanet {

enum class CommunityPhase { Announced, Collecting, Committed };

// What a member node keeps about one community it belongs to.
struct CommunityMembership {
    CommunityId cid;
    std::string mc;
    NodeId si = 0;
    Mid myMid = kProvisionalMid;
    bool committed = false;
    std::vector<CtEntry> ct;            // entries for the other members
    std::map<Mid, NodeId> memberHosts;  // includes self once committed
};

// Initiator-side community lifecycle state.
struct SiCommunityState {
    CommunityId cid;
    std::string mc;
    std::string label;
    CommunityPhase phase = CommunityPhase::Announced;
    double joinDeadline = 0.0;
    std::vector<std::pair<NodeId, Path>> joiners; // (host, path si->joiner), arrival order
    Mid nextMid = 1;                              // 0 is the initiator
};

// A routed packet waiting for table recovery at some member hop.
struct PendingSend {
    Packet pkt;
    double queuedAt = 0.0;
};

// Everything one node owns. Mutated only from the node's own event
// handlers; nodes interact strictly through packets.
struct NodeState {
    NodeId id = 0;

    std::set<PacketId> seenFloods;
    std::set<PacketId> deliveredApp; // final-delivery dedup

    // Learned from the MCSTART flood: previous hop toward the initiator,
    // plus the announced culture, per community.
    std::map<CommunityId, NodeId> reverseNext;
    std::map<CommunityId, std::pair<std::string, NodeId>> announcements; // cid -> (mc, si)

    std::map<CommunityId, CommunityMembership> memberships;
    std::map<CommunityId, SiCommunityState> initiated;
    std::map<CommunityId, std::string> society; // cid -> mc (the society table)

    std::deque<Machine> machines;
    std::map<std::string, std::size_t> machineByCulture; // culture -> index

    std::uint32_t nextPktSeq = 0;
    std::uint32_t nextCidSeq = 0;

    // watchdog (allocated lazily; closed runs never touch it)
    std::optional<ReputationTable> reputation;

    std::map<std::pair<CommunityId, Mid>, std::vector<PendingSend>> pending;
    std::set<std::pair<CommunityId, Mid>> recovering;

    bool isMemberOf(const CommunityId& cid) const {
        auto it = memberships.find(cid);
        return it != memberships.end() && it->second.committed;
    }

    Machine* machineOf(const std::string& culture) {
        auto it = machineByCulture.find(culture);
        return it == machineByCulture.end() ? nullptr : &machines[it->second];
    }

    const CtEntry* findEntry(const CommunityId& cid, Mid dst) const {
        auto it = memberships.find(cid);
        if (it == memberships.end()) return nullptr;
        for (const CtEntry& e : it->second.ct)
            if (e.mid == dst) return &e;
        return nullptr;
    }

    bool excludes(NodeId relay) const { return reputation && reputation->excluded(relay); }
    bool pathExcluded(const Path& p) const {
        if (!reputation) return false;
        for (NodeId n : p)
            if (n != id && reputation->excluded(n)) return true;
        return false;
    }
};

} // namespace humanet

#endif
