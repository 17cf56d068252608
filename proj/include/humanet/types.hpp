#ifndef HUMANET_TYPES_HPP
#define HUMANET_TYPES_HPP

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace humanet {

// Node identifiers are dense in [0, N) for the lifetime of a run.
using NodeId = std::uint32_t;

// Machine identity within one community. The service initiator always
// holds mid 0; joiners get the next ids in join-arrival order.
using Mid = std::uint32_t;

constexpr Mid kProvisionalMid = 0xffffffffu;

// Community ids are namespaced by the initiating node, so no global
// coordination is needed to keep them unique.
struct CommunityId {
    NodeId si = 0;
    std::uint32_t seq = 0;

    auto operator<=>(const CommunityId&) const = default;
};

// Sentinel for packets that belong to no community (baseline floods,
// watch reports).
constexpr CommunityId kNoCommunity{0xffffffffu, 0xffffffffu};

// (origin, origin-local counter): unique per packet instance. Relays keep
// the id stable while mutating ttl/trace, so floods can deduplicate.
struct PacketId {
    NodeId origin = 0;
    std::uint32_t seq = 0;

    auto operator<=>(const PacketId&) const = default;
};

using Path = std::vector<NodeId>;

std::string str(const CommunityId& cid);
std::string str(const PacketId& pid);
std::string str(const Path& path);

std::string hexEncode(const std::string& bytes);
std::string hexDecode(const std::string& hex);
std::uint64_t fnv1a64(const std::string& bytes);

std::ostream& operator<<(std::ostream& os, const CommunityId& cid);
std::ostream& operator<<(std::ostream& os, const PacketId& pid);

} // namespace humanet

#endif
