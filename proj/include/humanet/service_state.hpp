#ifndef HUMANET_SERVICE_STATE_HPP
#define HUMANET_SERVICE_STATE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "humanet/types.hpp"

namespace humanet {

// Sender side of one go-back-N transfer. base <= nextSeq <= base + window
// holds at every step; the transfer is complete when base reaches
// totalChunks and the sink's bytes equal the source bytes.
struct TransferSession {
    std::string fileId;
    Mid peer = kProvisionalMid;
    std::string bytes; // source payload
    std::size_t chunkSize = 1024;
    std::uint32_t window = 4;
    std::uint32_t totalChunks = 0;
    std::uint32_t base = 0;
    std::uint32_t nextSeq = 0;
    std::uint32_t chunkSends = 0;      // first-time sends
    std::uint32_t retransmissions = 0; // go-back-N resends
    std::uint32_t baseRetries = 0;
    std::uint32_t maxRetries = 16;
    std::uint64_t timerGeneration = 0;
    bool done = false;
    bool failed = false;
};

// Sink side: cumulative in-order acceptance, duplicates re-acked but
// never delivered twice.
struct RxFileState {
    Mid peer = kProvisionalMid;
    std::uint32_t expected = 0;
    std::uint32_t total = 0;
    std::string bytes;
    std::vector<std::uint32_t> deliveredSeqs;
    bool complete = false;
};

// Everything a machine mutates while serving. Kept serializable so gate
// isolation (rejected invoke leaves state byte-identical) is checkable.
struct ServiceState {
    std::map<std::string, TransferSession> sends;
    std::map<std::string, RxFileState> recvs;
    std::map<std::string, Mid> names;         // gateway name records
    std::map<std::string, std::string> files; // local file store
    std::map<std::string, std::string> kv;    // scratch counters (sessions, echoes, ...)
};

std::string serializeState(const ServiceState& s);

} // namespace humanet

#endif
