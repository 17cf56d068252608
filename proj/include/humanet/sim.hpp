#ifndef HUMANET_SIM_HPP
#define HUMANET_SIM_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "humanet/arts.hpp"
#include "humanet/engine.hpp"
#include "humanet/error.hpp"
#include "humanet/machine.hpp"
#include "humanet/protocol.hpp"
#include "humanet/scenario.hpp"
#include "humanet/stack_select.hpp"
#include "humanet/topology.hpp"

namespace humanet {

struct RunParams {
    double duration = 0.0; // 0: run until idle with no periodic refresh
    std::uint64_t seed = 0;
    double lossRate = 0.0;
    double tJoin = 1.0;
    double tRefresh = 5.0;
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
};

struct OutcomeEvent {
    double time = 0.0;
    NodeId node = 0;
    Err code = Err::ValidationError;
    std::string detail;
};

struct AppDelivery {
    double time = 0.0;
    CommunityId cid;
    NodeId host = 0;
    std::string op;
    PacketId pkt;
    OpArgs args;
};

struct InstallEvent {
    double time = 0.0;
    NodeId node = 0;
    CtEntry entry;
};

struct Observation {
    double time = 0.0;
    NodeId observer = 0;
    NodeId relay = 0;
    bool forwarded = false;
};

struct TransferReport {
    std::string fileId;
    NodeId src = 0;
    NodeId dst = 0;
    CommunityId cid;
    std::uint32_t chunks = 0;
    std::uint32_t chunkSends = 0;
    std::uint32_t retransmissions = 0;
    bool completed = false;
    bool failed = false;
    bool bytesMatch = false;
};

struct ResolutionReport {
    std::string name;
    NodeId requester = 0;
    NodeId answeredBy = 0;
    bool answeredByGateway = false;
    bool found = false;
    Mid mid = kProvisionalMid;
    bool replied = false;
};

struct CommunityInfo {
    CommunityId cid;
    std::string label;
    std::string mc;
    NodeId si = 0;
};

// One complete protocol run: engine, per-node protocol state, machine
// registry and service handlers. Owns everything; independent instances
// can run in parallel, nothing is shared.
class Simulation {
public:
    Simulation(Registry registry, Topology topo, RunParams params,
               ProtocolConfig proto = {"P1", "DSR", false});

    Engine& engine() { return engine_; }
    const Engine& engine() const { return engine_; }
    const Registry& registry() const { return registry_; }
    const ProtocolConfig& protocol() const { return proto_; }
    const RunParams& params() const { return params_; }

    NodeState& node(NodeId n) { return nodes_.at(n); }
    const NodeState& node(NodeId n) const { return nodes_.at(n); }
    std::size_t nodeCount() const { return nodes_.size(); }
    const Machine* machineAt(NodeId host, const std::string& culture) const;

    void setGateway(NodeId n, bool flag);
    bool isGateway(NodeId n) const;
    void addFile(const std::string& name, std::string bytes) { files_[name] = std::move(bytes); }
    const std::map<std::string, std::string>& files() const { return files_; }
    std::string synthesizeBytes(const std::string& tag, std::size_t size) const;

    // ---- community protocol operations ----
    std::optional<CommunityId> startService(NodeId si, const std::string& culture,
                                            const std::string& label = "");
    bool joinService(NodeId n, const CommunityId& cid);
    // Post-commit join; same wire flow, the initiator assigns the next mid.
    bool lateJoin(NodeId n, const CommunityId& cid);

    // Routed data-plane send from a member's machine. Returns false when
    // refused synchronously (not a member, op missing from the stack).
    bool sendOp(NodeId src, const CommunityId& cid, NodeId dstHost, const std::string& op,
                OpArgs args);

    void rreqRecover(NodeId origin, const CommunityId& cid, Mid dstMid);
    // Last-resort scoped flood through non-members carrying one routed packet.
    bool sendFriendFlood(NodeId sender, Packet inner);

    // ---- services ----
    bool ftpPut(NodeId src, const CommunityId& cid, NodeId dstHost, const std::string& fileId);
    bool ftpGet(NodeId requester, const CommunityId& cid, NodeId holder, const std::string& fileId);
    bool nameRegister(NodeId src, const CommunityId& cid, const std::string& name, NodeId target);
    bool nameResolve(NodeId src, const CommunityId& cid, const std::string& name);
    bool telnetLogin(NodeId src, const CommunityId& cid, NodeId dstHost);
    bool cbrStart(NodeId src, const CommunityId& cid, NodeId dstHost, std::uint32_t count,
                  double interval, std::size_t size);

    // ---- model operations (humanism layer) ----
    Machine& instantiateMachine(const std::string& culture, NodeId host);
    InvokeStatus invoke(Machine& m, const std::string& op, const OpArgs& args,
                        const Packet* src = nullptr);

    double run(); // drains the event queue, returns final time

    // ---- observability ----
    const std::vector<OutcomeEvent>& outcomes() const { return outcomes_; }
    const std::vector<AppDelivery>& appLog() const { return appLog_; }
    const std::vector<InstallEvent>& installLog() const { return installLog_; }
    const std::vector<Observation>& observationLog() const { return observationLog_; }
    const std::vector<TransferReport>& transfers() const { return transfers_; }
    const std::vector<ResolutionReport>& resolutions() const { return resolutions_; }
    const std::vector<CommunityInfo>& communities() const { return communities_; }
    std::uint64_t isolationViolations() const { return isolationViolations_; }
    std::uint64_t dataOriginated() const { return dataOriginated_; }
    std::uint64_t dataDeliveredDistinct() const;
    std::uint64_t watchdogTablesAllocated() const;
    double deliveryRatio() const;
    std::string communityLabel(const CommunityId& cid) const;
    const std::string& traceText() const { return trace_; }

    void noteOutcome(NodeId node, Err code, const std::string& detail);

private:
    // dispatch
    void dispatch(NodeId target, const Packet& pkt);
    void handleMcStart(NodeId self, const Packet& pkt);
    void handleMcJoin(NodeId self, const Packet& pkt);
    void handleCTable(NodeId self, const Packet& pkt);
    void handleRreq(NodeId self, const Packet& pkt);
    void handleRrep(NodeId self, const Packet& pkt);
    void handleFriend(NodeId self, const Packet& pkt);
    void handleRouted(NodeId self, const Packet& pkt);
    void handleWatchReport(NodeId self, const Packet& pkt);

    void commitCommunity(NodeId si, const CommunityId& cid);
    void multicastTable(NodeId si, const CommunityId& cid);
    void scheduleRefresh(NodeId si, const CommunityId& cid);
    void installSeededTable(NodeId self, const Packet& pkt);
    void installEntry(NodeId self, const CommunityId& cid, Mid mid, Path path);
    void mergeRrep(NodeId self, const Packet& pkt);
    void mergeEntriesFrom(NodeId self, const Packet& pkt, const Path& toResponder);
    void finishRecovery(NodeId origin, const CommunityId& cid, Mid dstMid);

    // data plane
    Packet makeDataPacket(NodeId src, const CommunityMembership& m, Mid dstMid,
                          PacketKind kind, OpArgs args);
    bool routePacket(NodeId self, Packet pkt);      // member-side table send
    void forwardRouted(NodeId self, Packet pkt);    // next-hop step
    void deliverRouted(NodeId self, const Packet& pkt);
    void queuePending(NodeId self, const CommunityId& cid, Mid dstMid, Packet pkt);
    void flushPending(NodeId self, const CommunityId& cid);

    // plumbing
    PacketId newPacketId(NodeId origin);
    void transmitPacket(NodeId sender, const Packet& pkt, TxMode mode,
                        std::optional<NodeId> dest);
    double rangeFor(const std::string& mc) const;
    double delayFor(const std::string& mc) const;
    const CommunityMembership* membershipOf(NodeId n, const CommunityId& cid) const;
    Machine* communityMachine(NodeId n, const CommunityId& cid);
    std::optional<Mid> midOfHost(NodeId self, const CommunityId& cid, NodeId host) const;

    // services wiring
    void registerServiceOps();
    void pumpWindow(NodeId host, Machine& m, const std::string& fileId);
    void armTimer(NodeId host, Machine& m, const std::string& fileId);
    void onTransferTimeout(NodeId host, const CommunityId& cid, const std::string& fileId,
                           std::uint64_t generation);
    void finishTransfer(NodeId host, Machine& m, const std::string& fileId, bool failed);
    double transferRto(NodeId host, const Machine& m, const std::string& fileId) const;
    TransferReport* transferReport(const std::string& fileId, NodeId src);

    Registry registry_;
    Engine engine_;
    RunParams params_;
    ProtocolConfig proto_;
    OpDispatcher dispatcher_;

    std::vector<NodeState> nodes_;
    std::vector<bool> gateway_;
    std::map<std::string, std::string> files_;
    std::map<CommunityId, std::string> labels_;

    std::vector<OutcomeEvent> outcomes_;
    std::vector<AppDelivery> appLog_;
    std::vector<InstallEvent> installLog_;
    std::vector<Observation> observationLog_;
    std::vector<TransferReport> transfers_;
    std::vector<ResolutionReport> resolutions_;
    std::vector<CommunityInfo> communities_;
    std::uint64_t isolationViolations_ = 0;
    std::uint64_t dataOriginated_ = 0;
    std::set<PacketId> friendAbsorbed_;
    std::string trace_;
};

} // namespace humanet

#endif
