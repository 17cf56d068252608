#include "humanet/packet.hpp"

#include <map>
#include <sstream>

namespace humanet {

const char* kindName(PacketKind k) {
    switch (k) {
        case PacketKind::McStart: return "MCSTART";
        case PacketKind::McJoin: return "MCJOIN";
        case PacketKind::CTable: return "CTABLE";
        case PacketKind::Rreq: return "RREQ";
        case PacketKind::Rrep: return "RREP";
        case PacketKind::Friend: return "FRIEND";
        case PacketKind::Data: return "DATA";
        case PacketKind::Ack: return "ACK";
        case PacketKind::WatchReport: return "WATCH-REPORT";
    }
    return "?";
}

std::string serializePacket(const Packet& p) {
    std::ostringstream os;
    os << kindName(p.kind);
    os << " id=" << str(p.id);
    os << " cid=" << str(p.cid);
    os << " mc=" << (p.mc.empty() ? "-" : p.mc);
    os << " src_mid=";
    if (p.srcMid == kProvisionalMid) os << "-"; else os << p.srcMid;
    os << " dst_mid=";
    if (p.dstMid == kProvisionalMid) os << "-"; else os << p.dstMid;
    os << " ttl=" << p.ttl;
    os << " trace=" << str(p.trace);
    os << " payload={";
    bool first = true;
    for (const auto& [k, v] : p.payload) {
        if (!first) os << ",";
        first = false;
        // long values (chunk bytes) dump as length#digest to keep traces lean
        if (v.size() > 64)
            os << k << "=" << v.size() << "#" << fnv1a64(v);
        else
            os << k << "=" << v;
    }
    os << "}";
    os << " inner=";
    if (p.inner) os << "{" << serializePacket(*p.inner) << "}"; else os << "-";
    if (!p.route.empty()) os << " route=" << str(p.route);
    if (!p.entries.empty()) {
        os << " entries=[";
        for (std::size_t i = 0; i < p.entries.size(); ++i) {
            if (i) os << ",";
            const CtEntry& e = p.entries[i];
            os << "(" << e.mid << "," << str(e.cid) << "," << str(e.path) << ")";
        }
        os << "]";
    }
    if (!p.members.empty()) {
        os << " members=[";
        bool f = true;
        for (const auto& [mid, host] : p.members) {
            if (!f) os << ",";
            f = false;
            os << mid << ":" << host;
        }
        os << "]";
    }
    return os.str();
}

Path removeLoops(const Path& walk) {
    Path out;
    std::map<NodeId, std::size_t> at;
    for (NodeId n : walk) {
        auto it = at.find(n);
        if (it != at.end()) {
            // Revisit: cut the loop, keep the walk through the first visit.
            while (out.size() > it->second + 1) {
                at.erase(out.back());
                out.pop_back();
            }
        } else {
            at[n] = out.size();
            out.push_back(n);
        }
    }
    return out;
}

Path rerootPath(const Path& toOwner, const Path& ownerToMember) {
    Path walk = toOwner;
    walk.insert(walk.end(), ownerToMember.begin(), ownerToMember.end());
    return removeLoops(walk);
}

} // namespace humanet
