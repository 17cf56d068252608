#ifndef HUMANET_PACKET_HPP
#define HUMANET_PACKET_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "humanet/types.hpp"

namespace humanet {

enum class PacketKind {
    McStart,
    McJoin,
    CTable,
    Rreq,
    Rrep,
    Friend,
    Data,
    Ack,
    WatchReport,
};

const char* kindName(PacketKind k);

// One community-table row as carried inside CTABLE and RREP packets.
struct CtEntry {
    Mid mid = 0;
    CommunityId cid;
    Path path; // path[0] = owner host, path.back() = member host

    auto operator<=>(const CtEntry&) const = default;
};

// Simulator packet. The wire serialization (serializePacket) emits the
// fields in declaration order: kind, id, cid, mc, srcMid, dstMid, ttl,
// trace, payload, inner, then the kind-specific extensions route,
// entries, members. Relays mutate only ttl / trace / route position;
// the id stays stable end to end.
struct Packet {
    PacketKind kind = PacketKind::Data;
    PacketId id;
    CommunityId cid = kNoCommunity;
    std::string mc;                   // MCSTART / CTABLE only
    Mid srcMid = kProvisionalMid;     // routed kinds
    Mid dstMid = kProvisionalMid;
    int ttl = 0;
    Path trace;                       // hops visited so far, origin first
    std::map<std::string, std::string> payload; // op name + args, or raw under "data"
    std::shared_ptr<const Packet> inner;        // FRIEND wraps one routed packet

    Path route;                    // planned forward path (source routing)
    std::vector<CtEntry> entries;  // CTABLE / RREP table content
    std::map<Mid, NodeId> members; // CTABLE / RREP mid -> host map

    bool isFlood() const {
        return kind == PacketKind::McStart || kind == PacketKind::Rreq ||
               (kind == PacketKind::Friend && route.empty()) || kind == PacketKind::CTable;
    }

    // The kind that decides data-plane vs control-plane handling,
    // unwrapping FRIEND.
    PacketKind effectiveKind() const {
        if (kind == PacketKind::Friend && inner) return inner->effectiveKind();
        return kind;
    }

    bool isDataPlane() const {
        PacketKind k = effectiveKind();
        return k == PacketKind::Data || k == PacketKind::Ack;
    }
};

std::string serializePacket(const Packet& p);

// Removes cycles from a walk: whenever a node reappears, everything after
// its first occurrence is cut. [N4,N2,N1] + [N1,N3] collapses to
// [N4,N2,N1,N3].
Path removeLoops(const Path& walk);

// Concatenation + loop removal, the re-rooting step used when a table
// learned at one node is translated to another root.
Path rerootPath(const Path& toOwner, const Path& ownerToMember);

} // namespace humanet

#endif
