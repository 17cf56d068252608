#include "humanet/sim.hpp"

#include <algorithm>
#include <cassert>

namespace humanet {

Simulation::Simulation(Registry registry, Topology topo, RunParams params, ProtocolConfig proto)
    : registry_(std::move(registry)), engine_(std::move(topo)), params_(params), proto_(proto) {
    nodes_.resize(engine_.topology().size());
    gateway_.assign(engine_.topology().size(), false);
    for (std::size_t i = 0; i < nodes_.size(); ++i) nodes_[i].id = static_cast<NodeId>(i);
    engine_.setSeed(params_.seed);
    engine_.setLossRate(params_.lossRate);
    engine_.setDeliverHandler([this](NodeId t, const Packet& p) { dispatch(t, p); });
    engine_.setTraceSink([this](const std::string& line) {
        trace_ += line;
        trace_ += '\n';
    });
    registerServiceOps();
}

void Simulation::setGateway(NodeId n, bool flag) {
    if (n >= gateway_.size()) throw Error(Err::UnknownNode, std::to_string(n));
    gateway_[n] = flag;
}

bool Simulation::isGateway(NodeId n) const { return n < gateway_.size() && gateway_[n]; }

double Simulation::run() { return engine_.runUntilIdle(); }

void Simulation::noteOutcome(NodeId node, Err code, const std::string& detail) {
    outcomes_.push_back({engine_.now(), node, code, detail});
}

std::string Simulation::communityLabel(const CommunityId& cid) const {
    auto it = labels_.find(cid);
    return it == labels_.end() ? str(cid) : it->second;
}

std::uint64_t Simulation::dataDeliveredDistinct() const {
    std::set<PacketId> ids;
    for (const AppDelivery& d : appLog_)
        if (d.op != "ack") ids.insert(d.pkt);
    return ids.size();
}

double Simulation::deliveryRatio() const {
    if (dataOriginated_ == 0) return 1.0;
    return double(dataDeliveredDistinct()) / double(dataOriginated_);
}

std::uint64_t Simulation::watchdogTablesAllocated() const {
    std::uint64_t n = 0;
    for (const NodeState& s : nodes_)
        if (s.reputation) n++;
    return n;
}

// ---------------------------------------------------------------- model ops

Machine& Simulation::instantiateMachine(const std::string& culture, NodeId host) {
    const CultureSpec& spec = registry_.culture(culture); // throws UnknownCulture
    (void)spec;
    if (host >= nodes_.size()) throw Error(Err::UnknownNode, std::to_string(host));
    NodeState& n = nodes_[host];
    if (n.machineByCulture.count(culture))
        throw Error(Err::DuplicateMachine,
                    culture + " already instantiated on node " + std::to_string(host));
    Machine m;
    m.mc = culture;
    m.host = host;
    n.machines.push_back(std::move(m));
    n.machineByCulture[culture] = n.machines.size() - 1;
    return n.machines.back();
}

InvokeStatus Simulation::invoke(Machine& m, const std::string& op, const OpArgs& args,
                                const Packet* src) {
    return dispatcher_.invoke(registry_, m, op, args, src);
}

// --------------------------------------------------------------- plumbing

PacketId Simulation::newPacketId(NodeId origin) {
    return {origin, nodes_.at(origin).nextPktSeq++};
}

double Simulation::rangeFor(const std::string& mc) const {
    double base = engine_.topology().radioRange();
    if (!mc.empty() && registry_.hasCulture(mc)) return base * registry_.culture(mc).rangeFactor();
    return base;
}

double Simulation::delayFor(const std::string& mc) const {
    if (!mc.empty() && registry_.hasCulture(mc)) return registry_.culture(mc).hopDelay();
    return 0.01;
}

void Simulation::transmitPacket(NodeId sender, const Packet& pkt, TxMode mode,
                                std::optional<NodeId> dest) {
    std::string mc = pkt.mc;
    if (mc.empty() && pkt.cid != kNoCommunity) {
        const NodeState& n = nodes_.at(sender);
        auto it = n.announcements.find(pkt.cid);
        if (it != n.announcements.end()) mc = it->second.first;
    }
    if (pkt.kind == PacketKind::Friend && !nodes_.at(sender).isMemberOf(pkt.cid))
        engine_.counters().friendRelays++;
    engine_.transmit(sender, pkt, mode, dest, rangeFor(mc), delayFor(mc));
}

const CommunityMembership* Simulation::membershipOf(NodeId n, const CommunityId& cid) const {
    const NodeState& s = nodes_.at(n);
    auto it = s.memberships.find(cid);
    return it == s.memberships.end() ? nullptr : &it->second;
}

Machine* Simulation::communityMachine(NodeId n, const CommunityId& cid) {
    NodeState& s = nodes_.at(n);
    auto it = s.memberships.find(cid);
    if (it == s.memberships.end()) return nullptr;
    return s.machineOf(it->second.mc);
}

const Machine* Simulation::machineAt(NodeId host, const std::string& culture) const {
    const NodeState& s = nodes_.at(host);
    auto it = s.machineByCulture.find(culture);
    return it == s.machineByCulture.end() ? nullptr : &s.machines[it->second];
}

std::optional<Mid> Simulation::midOfHost(NodeId self, const CommunityId& cid, NodeId host) const {
    const CommunityMembership* mem = membershipOf(self, cid);
    if (!mem) return std::nullopt;
    for (const auto& [mid, h] : mem->memberHosts)
        if (h == host) return mid;
    return std::nullopt;
}

// --------------------------------------------------------------- dispatch

void Simulation::dispatch(NodeId target, const Packet& pkt) {
    switch (pkt.kind) {
        case PacketKind::McStart: handleMcStart(target, pkt); break;
        case PacketKind::McJoin: handleMcJoin(target, pkt); break;
        case PacketKind::CTable: handleCTable(target, pkt); break;
        case PacketKind::Rreq: handleRreq(target, pkt); break;
        case PacketKind::Rrep: handleRrep(target, pkt); break;
        case PacketKind::Friend: handleFriend(target, pkt); break;
        case PacketKind::Data:
        case PacketKind::Ack: handleRouted(target, pkt); break;
        case PacketKind::WatchReport: handleWatchReport(target, pkt); break;
    }
}

} // namespace humanet
