#include "humanet/service_state.hpp"

#include <sstream>

namespace humanet {

namespace {

// Content digest so big payload buffers don't bloat the serialization.
std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

std::string serializeState(const ServiceState& s) {
    std::ostringstream os;
    os << "sends{";
    for (const auto& [id, t] : s.sends) {
        os << id << ":(" << t.peer << "," << t.bytes.size() << "#" << fnv1a(t.bytes) << ","
           << t.chunkSize << "," << t.window << "," << t.totalChunks << "," << t.base << ","
           << t.nextSeq << "," << t.chunkSends << "," << t.retransmissions << ","
           << t.baseRetries << "," << t.timerGeneration << "," << t.done << "," << t.failed
           << ")";
    }
    os << "}recvs{";
    for (const auto& [id, r] : s.recvs) {
        os << id << ":(" << r.peer << "," << r.expected << "," << r.total << ","
           << r.bytes.size() << "#" << fnv1a(r.bytes) << "," << r.deliveredSeqs.size() << ","
           << r.complete << ")";
    }
    os << "}names{";
    for (const auto& [n, mid] : s.names) os << n << ":" << mid << ";";
    os << "}files{";
    for (const auto& [n, bytes] : s.files) os << n << ":" << bytes.size() << "#" << fnv1a(bytes) << ";";
    os << "}kv{";
    for (const auto& [k, v] : s.kv) os << k << "=" << v << ";";
    os << "}";
    return os.str();
}

} // namespace humanet
