// Community lifecycle: MCSTART flood, MCJOIN collection, table commit and
// multicast, path routing with RREQ recovery, friend relay through
// non-members.

#include <algorithm>
#include <cassert>

#include "humanet/sim.hpp"

namespace humanet {

namespace {
constexpr std::size_t kPendingLimit = 64;
}

// ------------------------------------------------------------- start/join

std::optional<CommunityId> Simulation::startService(NodeId si, const std::string& culture,
                                                    const std::string& label) {
    const CultureSpec& spec = registry_.culture(culture); // throws UnknownCulture
    if (si >= nodes_.size()) throw Error(Err::UnknownNode, std::to_string(si));
    // A name service is only startable from a node that can reach the
    // outside world; the initiator is the community's first member, so
    // flagging it guarantees the community always contains a gateway.
    if (spec.hasArt("NameService") && !isGateway(si)) {
        noteOutcome(si, Err::GatewayMissing, culture + ": initiator is not an internet gateway");
        return std::nullopt;
    }
    NodeState& n = nodes_[si];
    if (n.machineByCulture.count(culture)) {
        noteOutcome(si, Err::DuplicateMachine, culture + " already hosted on initiator");
        return std::nullopt;
    }

    CommunityId cid{si, n.nextCidSeq++};
    labels_[cid] = label.empty() ? str(cid) : label;
    communities_.push_back({cid, labels_[cid], culture, si});

    Machine& m = instantiateMachine(culture, si);
    m.mid = 0;
    m.cid = cid;

    CommunityMembership mem;
    mem.cid = cid;
    mem.mc = culture;
    mem.si = si;
    mem.myMid = 0;
    mem.memberHosts[0] = si;
    n.memberships[cid] = std::move(mem);
    n.announcements[cid] = {culture, si};

    SiCommunityState st;
    st.cid = cid;
    st.mc = culture;
    st.label = labels_[cid];
    st.phase = CommunityPhase::Collecting;
    st.joinDeadline = engine_.now() + params_.tJoin;
    n.initiated[cid] = std::move(st);

    Packet pkt;
    pkt.kind = PacketKind::McStart;
    pkt.id = newPacketId(si);
    pkt.cid = cid;
    pkt.mc = culture;
    pkt.ttl = params_.floodTtl;
    pkt.trace = {si};
    n.seenFloods.insert(pkt.id);
    engine_.floods().started["MCSTART"]++;
    transmitPacket(si, pkt, TxMode::Broadcast, std::nullopt);

    engine_.scheduleTimer(n.initiated[cid].joinDeadline, si,
                          [this, si, cid] { commitCommunity(si, cid); });
    return cid;
}

void Simulation::handleMcStart(NodeId self, const Packet& pkt) {
    NodeState& n = nodes_[self];
    if (!n.seenFloods.insert(pkt.id).second) {
        engine_.tracePacket(pkt, self, "dup-ignore");
        return;
    }
    // First arrival wins: the previous hop becomes the route toward the
    // initiator, which is how MCJOIN finds its way back.
    n.reverseNext[pkt.cid] = pkt.trace.back();
    n.announcements[pkt.cid] = {pkt.mc, pkt.cid.si};
    if (pkt.ttl > 1) {
        Packet fwd = pkt;
        fwd.ttl--;
        fwd.trace.push_back(self);
        transmitPacket(self, fwd, TxMode::Broadcast, std::nullopt);
    }
}

bool Simulation::joinService(NodeId nid, const CommunityId& cid) {
    if (nid >= nodes_.size()) throw Error(Err::UnknownNode, std::to_string(nid));
    NodeState& n = nodes_[nid];
    if (nid == cid.si) return true; // the initiator is a member by construction
    auto ann = n.announcements.find(cid);
    if (ann == n.announcements.end()) {
        noteOutcome(nid, Err::NotAnnounced, str(cid) + " never announced here");
        return false;
    }
    if (n.memberships.count(cid)) return true; // duplicate join: idempotent
    const std::string& mc = ann->second.first;
    if (n.machineByCulture.count(mc)) {
        noteOutcome(nid, Err::DuplicateMachine, "one machine per culture per host");
        return false;
    }
    auto rn = n.reverseNext.find(cid);
    if (rn == n.reverseNext.end()) {
        noteOutcome(nid, Err::JoinFailed, "initiator unreachable");
        return false;
    }

    Machine& m = instantiateMachine(mc, nid);
    m.cid = cid;

    CommunityMembership mem;
    mem.cid = cid;
    mem.mc = mc;
    mem.si = cid.si;
    n.memberships[cid] = std::move(mem);

    Packet pkt;
    pkt.kind = PacketKind::McJoin;
    pkt.id = newPacketId(nid);
    pkt.cid = cid;
    pkt.ttl = params_.floodTtl;
    pkt.trace = {nid};
    transmitPacket(nid, pkt, TxMode::Unicast, rn->second);
    return true;
}

bool Simulation::lateJoin(NodeId n, const CommunityId& cid) { return joinService(n, cid); }

void Simulation::handleMcJoin(NodeId self, const Packet& pkt) {
    NodeState& n = nodes_[self];
    const CommunityId cid = pkt.cid;
    if (self != cid.si) {
        auto rn = n.reverseNext.find(cid);
        if (rn == n.reverseNext.end()) {
            noteOutcome(self, Err::JoinFailed, "relay has no reverse route");
            return;
        }
        if (pkt.ttl <= 0) {
            engine_.noteTtlDrop(pkt, self);
            return;
        }
        Packet fwd = pkt;
        fwd.ttl--;
        fwd.trace.push_back(self);
        transmitPacket(self, fwd, TxMode::Unicast, rn->second);
        return;
    }

    auto sit = n.initiated.find(cid);
    if (sit == n.initiated.end()) return;
    SiCommunityState& st = sit->second;
    NodeId joiner = pkt.trace.front();
    if (joiner == self) return;

    Path siToJoiner;
    siToJoiner.push_back(self);
    for (auto r = pkt.trace.rbegin(); r != pkt.trace.rend(); ++r) siToJoiner.push_back(*r);

    if (st.phase != CommunityPhase::Committed) {
        for (const auto& [host, path] : st.joiners)
            if (host == joiner) return; // duplicate join: idempotent
        st.joiners.emplace_back(joiner, siToJoiner);
        return;
    }

    // Post-commit join: hand out the next mid and publish the grown table.
    CommunityMembership& mem = n.memberships[cid];
    for (const auto& [mid, host] : mem.memberHosts)
        if (host == joiner) return; // already a member, no new mid
    Mid mid = st.nextMid++;
    mem.memberHosts[mid] = joiner;
    installEntry(self, cid, mid, siToJoiner);
    multicastTable(self, cid);
}

// ------------------------------------------------------------------ commit

void Simulation::commitCommunity(NodeId si, const CommunityId& cid) {
    NodeState& n = nodes_[si];
    auto sit = n.initiated.find(cid);
    if (sit == n.initiated.end()) return;
    SiCommunityState& st = sit->second;
    if (st.phase == CommunityPhase::Committed) return;
    st.phase = CommunityPhase::Committed;

    CommunityMembership& mem = n.memberships[cid];
    mem.committed = true;
    mem.memberHosts[0] = si;
    for (const auto& [joiner, path] : st.joiners) {
        Mid mid = st.nextMid++;
        mem.memberHosts[mid] = joiner;
        installEntry(si, cid, mid, path);
    }
    n.society[cid] = st.mc;
    multicastTable(si, cid);
    if (registry_.culture(st.mc).proactiveRouting()) scheduleRefresh(si, cid);
}

void Simulation::multicastTable(NodeId si, const CommunityId& cid) {
    NodeState& n = nodes_[si];
    CommunityMembership& mem = n.memberships[cid];
    for (const auto& [mid, host] : mem.memberHosts) {
        if (host == si) continue;
        const CtEntry* e = n.findEntry(cid, mid);
        if (!e) continue;
        Packet pkt;
        pkt.kind = PacketKind::CTable;
        pkt.id = newPacketId(si);
        pkt.cid = cid;
        pkt.mc = mem.mc;
        pkt.srcMid = 0;
        pkt.dstMid = mid;
        pkt.ttl = params_.dataTtl;
        pkt.trace = {si};
        pkt.route = e->path;
        pkt.entries = mem.ct;
        pkt.members = mem.memberHosts;
        if (pkt.route.size() < 2) continue;
        transmitPacket(si, pkt, TxMode::Unicast, pkt.route[1]);
    }
}

void Simulation::scheduleRefresh(NodeId si, const CommunityId& cid) {
    if (params_.duration <= 0.0) return;
    double next = engine_.now() + params_.tRefresh;
    if (next > params_.duration) return;
    engine_.scheduleTimer(next, si, [this, si, cid] {
        multicastTable(si, cid);
        scheduleRefresh(si, cid);
    });
}

void Simulation::handleCTable(NodeId self, const Packet& pkt) {
    if (pkt.route.empty()) return;
    if (pkt.route.back() != self) {
        if (pkt.ttl <= 0) {
            engine_.noteTtlDrop(pkt, self);
            return;
        }
        Packet fwd = pkt;
        fwd.ttl--;
        fwd.trace.push_back(self);
        auto it = std::find(fwd.route.begin(), fwd.route.end(), self);
        if (it == fwd.route.end() || it + 1 == fwd.route.end()) return;
        transmitPacket(self, fwd, TxMode::Unicast, *(it + 1));
        return;
    }
    installSeededTable(self, pkt);
}

void Simulation::installSeededTable(NodeId self, const Packet& pkt) {
    NodeState& n = nodes_[self];
    const CommunityId cid = pkt.cid;
    CommunityMembership& mem = n.memberships[cid]; // created on join; default-init otherwise
    mem.cid = cid;
    mem.mc = pkt.mc;
    mem.si = cid.si;
    mem.myMid = pkt.dstMid;
    mem.committed = true;
    mem.memberHosts = pkt.members;
    n.society[cid] = pkt.mc;
    n.announcements[cid] = {pkt.mc, cid.si};
    if (Machine* m = n.machineOf(pkt.mc)) {
        m->mid = pkt.dstMid;
        m->cid = cid;
    }

    const CtEntry* self_entry = nullptr;
    for (const CtEntry& e : pkt.entries)
        if (e.mid == mem.myMid) self_entry = &e;
    if (!self_entry) return;

    Path revSelf(self_entry->path.rbegin(), self_entry->path.rend());
    installEntry(self, cid, 0, revSelf);
    for (const CtEntry& e : pkt.entries) {
        if (e.mid == mem.myMid) continue;
        Path p = rerootPath(revSelf, e.path);
        if (n.pathExcluded(p)) continue;
        installEntry(self, cid, e.mid, p);
    }
    flushPending(self, cid);
}

void Simulation::installEntry(NodeId self, const CommunityId& cid, Mid mid, Path path) {
    NodeState& n = nodes_[self];
    auto mit = n.memberships.find(cid);
    if (mit == n.memberships.end()) return;
    CommunityMembership& mem = mit->second;
    if (path.empty() || path.front() != self || mid == mem.myMid) return;
    if (!engine_.topology().validWalk(path, rangeFor(mem.mc))) return;
    std::erase_if(mem.ct, [&](const CtEntry& e) { return e.mid == mid; });
    CtEntry entry{mid, cid, std::move(path)};
    installLog_.push_back({engine_.now(), self, entry});
    mem.ct.push_back(std::move(entry));
}

// ---------------------------------------------------------------- recovery

void Simulation::rreqRecover(NodeId origin, const CommunityId& cid, Mid dstMid) {
    NodeState& n = nodes_.at(origin);
    if (!n.isMemberOf(cid)) {
        noteOutcome(origin, Err::RecoveryFailed, "recovery from non-member");
        return;
    }
    auto key = std::make_pair(cid, dstMid);
    if (n.recovering.count(key)) return;
    n.recovering.insert(key);

    Packet pkt;
    pkt.kind = PacketKind::Rreq;
    pkt.id = newPacketId(origin);
    pkt.cid = cid;
    pkt.srcMid = n.memberships[cid].myMid;
    pkt.dstMid = dstMid;
    pkt.ttl = params_.rreqTtl;
    pkt.trace = {origin};
    n.seenFloods.insert(pkt.id);
    engine_.floods().started["RREQ"]++;
    if (params_.rreqTtl > 0) transmitPacket(origin, pkt, TxMode::Broadcast, std::nullopt);

    const std::string mc = n.memberships[cid].mc;
    double deadline =
        engine_.now() + 2.0 * (params_.rreqTtl + 2) * delayFor(mc) + 1e-3;
    engine_.scheduleTimer(deadline, origin,
                          [this, origin, cid, dstMid] { finishRecovery(origin, cid, dstMid); });
}

void Simulation::handleRreq(NodeId self, const Packet& pkt) {
    NodeState& n = nodes_[self];
    if (pkt.id.origin == self) {
        engine_.tracePacket(pkt, self, "dup-ignore");
        return;
    }
    bool firstSeen = n.seenFloods.insert(pkt.id).second;
    const CommunityId cid = pkt.cid;

    bool echoed = std::find(pkt.trace.begin(), pkt.trace.end(), self) != pkt.trace.end();
    if (n.isMemberOf(cid) && !echoed) {
        // Members answer every distinct arriving copy: each copy carries a
        // different trace, and an origin that distrusts some relay needs
        // the alternatives. Copies that already passed through this node
        // are its own flood echo; answering those would bend the reply
        // route back across itself.
        const CommunityMembership& mem = n.memberships[cid];
        Path full = pkt.trace;
        full.push_back(self);
        Packet rep;
        rep.kind = PacketKind::Rrep;
        rep.id = newPacketId(self);
        rep.cid = cid;
        rep.srcMid = mem.myMid;
        rep.dstMid = pkt.srcMid;
        rep.ttl = params_.dataTtl;
        rep.trace = {self};
        rep.route.assign(full.rbegin(), full.rend());
        rep.entries = mem.ct;
        rep.members = mem.memberHosts;
        if (rep.route.size() >= 2) transmitPacket(self, rep, TxMode::Unicast, rep.route[1]);
    } else if (!n.isMemberOf(cid)) {
        engine_.tracePacket(pkt, self, "friend-rreq"); // relay-only, never answer
    }

    if (firstSeen && pkt.ttl > 1) {
        Packet fwd = pkt;
        fwd.ttl--;
        fwd.trace.push_back(self);
        transmitPacket(self, fwd, TxMode::Broadcast, std::nullopt);
    }
}

void Simulation::handleRrep(NodeId self, const Packet& pkt) {
    if (pkt.route.empty()) return;
    if (pkt.route.back() != self) {
        // Table-driven stacks populate forwarding state at the members a
        // reply passes through, the way on-demand distance-vector route
        // replies do.
        if (proto_.name == "P2" && nodes_[self].isMemberOf(pkt.cid)) {
            auto it = std::find(pkt.route.begin(), pkt.route.end(), self);
            if (it != pkt.route.end()) {
                Path toResponder(pkt.route.begin(), it + 1);
                std::reverse(toResponder.begin(), toResponder.end());
                mergeEntriesFrom(self, pkt, toResponder);
            }
        }
        if (pkt.ttl <= 0) {
            engine_.noteTtlDrop(pkt, self);
            return;
        }
        Packet fwd = pkt;
        fwd.ttl--;
        fwd.trace.push_back(self);
        auto it = std::find(fwd.route.begin(), fwd.route.end(), self);
        if (it == fwd.route.end() || it + 1 == fwd.route.end()) return;
        transmitPacket(self, fwd, TxMode::Unicast, *(it + 1));
        return;
    }
    mergeRrep(self, pkt);
}

void Simulation::mergeEntriesFrom(NodeId self, const Packet& pkt, const Path& toResponder) {
    NodeState& n = nodes_[self];
    const CommunityId cid = pkt.cid;
    auto mit = n.memberships.find(cid);
    if (mit == n.memberships.end()) return;
    CommunityMembership& mem = mit->second;

    auto installIfBetter = [&](Mid mid, Path p) {
        if (mid == mem.myMid || p.empty() || p.front() != self) return;
        if (n.pathExcluded(p)) return;
        if (!engine_.topology().validWalk(p, rangeFor(mem.mc))) return;
        const CtEntry* existing = n.findEntry(cid, mid);
        if (existing && !n.pathExcluded(existing->path) && existing->path.size() <= p.size())
            return;
        installEntry(self, cid, mid, std::move(p));
    };

    installIfBetter(pkt.srcMid, toResponder);
    for (const CtEntry& e : pkt.entries)
        installIfBetter(e.mid, rerootPath(toResponder, e.path));
    for (const auto& [mid, host] : pkt.members)
        mem.memberHosts.emplace(mid, host);

    flushPending(self, cid);
}

void Simulation::mergeRrep(NodeId self, const Packet& pkt) {
    Path toResponder(pkt.route.rbegin(), pkt.route.rend());
    mergeEntriesFrom(self, pkt, toResponder);
}

void Simulation::finishRecovery(NodeId origin, const CommunityId& cid, Mid dstMid) {
    NodeState& n = nodes_[origin];
    auto key = std::make_pair(cid, dstMid);
    if (!n.recovering.count(key)) return;
    n.recovering.erase(key);

    const CtEntry* e = n.findEntry(cid, dstMid);
    bool usable = e && !n.pathExcluded(e->path);
    if (usable) {
        flushPending(origin, cid);
        return;
    }

    auto mit = n.memberships.find(cid);
    bool knownMember = mit != n.memberships.end() && mit->second.memberHosts.count(dstMid);
    noteOutcome(origin, knownMember ? Err::RecoveryFailed : Err::UnknownMember,
                "mid " + std::to_string(dstMid) + " in " + str(cid));

    // Last resort for anything parked on this destination: hand the
    // packets to reachable hosts and let the nearest member route them.
    auto pit = n.pending.find(key);
    if (pit == n.pending.end()) return;
    std::vector<PendingSend> parked = std::move(pit->second);
    n.pending.erase(pit);
    for (PendingSend& ps : parked) {
        if (!sendFriendFlood(origin, std::move(ps.pkt)))
            noteOutcome(origin, Err::FriendUndeliverable, "no reachable host");
    }
}

void Simulation::queuePending(NodeId self, const CommunityId& cid, Mid dstMid, Packet pkt) {
    NodeState& n = nodes_[self];
    auto& q = n.pending[{cid, dstMid}];
    if (q.size() >= kPendingLimit) {
        noteOutcome(self, Err::RecoveryFailed, "pending queue overflow");
        return;
    }
    q.push_back({std::move(pkt), engine_.now()});
}

void Simulation::flushPending(NodeId self, const CommunityId& cid) {
    NodeState& n = nodes_[self];
    std::vector<std::pair<CommunityId, Mid>> ready;
    for (auto& [key, q] : n.pending) {
        if (key.first != cid || q.empty()) continue;
        const CtEntry* e = n.findEntry(cid, key.second);
        if (e && !n.pathExcluded(e->path)) ready.push_back(key);
    }
    for (auto& key : ready) {
        std::vector<PendingSend> q = std::move(n.pending[key]);
        n.pending.erase(key);
        const CtEntry* e = n.findEntry(cid, key.second);
        for (PendingSend& ps : q) {
            Packet pkt = std::move(ps.pkt);
            pkt.route = e->path;
            forwardRouted(self, std::move(pkt));
        }
    }
}

// --------------------------------------------------------------- data plane

Packet Simulation::makeDataPacket(NodeId src, const CommunityMembership& m, Mid dstMid,
                                  PacketKind kind, OpArgs args) {
    Packet pkt;
    pkt.kind = kind;
    pkt.id = newPacketId(src);
    pkt.cid = m.cid;
    pkt.srcMid = m.myMid;
    pkt.dstMid = dstMid;
    pkt.ttl = params_.dataTtl;
    pkt.trace = {src};
    pkt.payload = std::move(args);
    return pkt;
}

bool Simulation::sendOp(NodeId src, const CommunityId& cid, NodeId dstHost, const std::string& op,
                        OpArgs args) {
    NodeState& n = nodes_.at(src);
    const CommunityMembership* mem = membershipOf(src, cid);
    if (!mem || !mem->committed) {
        noteOutcome(src, Err::UnknownMember, "sender not committed in " + str(cid));
        return false;
    }
    // Machine communication is operation-wrapped: a stack that does not
    // declare the op cannot emit it either.
    if (!registry_.culture(mem->mc).declaredOps().count(op)) {
        noteOutcome(src, Err::OpNotExposed, op + " not declared by " + mem->mc);
        return false;
    }
    auto dstMid = midOfHost(src, cid, dstHost);
    if (!dstMid) {
        noteOutcome(src, Err::UnknownMember, "host " + std::to_string(dstHost));
        return false;
    }
    args["op"] = op;
    Packet pkt = makeDataPacket(src, *mem, *dstMid, PacketKind::Data, std::move(args));
    dataOriginated_++;
    engine_.noteOriginated(PacketKind::Data);
    (void)n;
    return routePacket(src, std::move(pkt));
}

bool Simulation::routePacket(NodeId self, Packet pkt) {
    NodeState& n = nodes_.at(self);
    const CommunityId cid = pkt.cid;
    auto mit = n.memberships.find(cid);
    if (mit == n.memberships.end() || !mit->second.committed) {
        noteOutcome(self, Err::UnknownMember, "route from non-member");
        return false;
    }
    CommunityMembership& mem = mit->second;
    if (pkt.dstMid == mem.myMid) { // local delivery, zero transmissions
        deliverRouted(self, pkt);
        return true;
    }
    const CtEntry* e = n.findEntry(cid, pkt.dstMid);
    if (!e || n.pathExcluded(e->path)) {
        queuePending(self, cid, pkt.dstMid, std::move(pkt));
        rreqRecover(self, cid, pkt.dstMid);
        return true;
    }
    pkt.route = e->path;
    forwardRouted(self, std::move(pkt));
    return true;
}

void Simulation::forwardRouted(NodeId self, Packet pkt) {
    NodeState& n = nodes_.at(self);
    if (pkt.trace.empty() || pkt.trace.back() != self) pkt.trace.push_back(self);
    if (!pkt.route.empty() && pkt.route.back() == self) {
        deliverRouted(self, pkt);
        return;
    }
    const CommunityId cid = pkt.cid;
    auto mit = n.memberships.find(cid);
    if (mit == n.memberships.end() || !mit->second.committed) {
        // Bare routed traffic must never sit at a non-member.
        isolationViolations_++;
        engine_.tracePacket(pkt, self, "isolation-violation");
        return;
    }
    CommunityMembership& mem = mit->second;

    bool isOrigin = pkt.id.origin == self;
    if (!isOrigin && engine_.topology().isMisbehaving(self) &&
        pkt.effectiveKind() == PacketKind::Data) {
        // Data-droppers discard silently; they do not even retransmit, so
        // an overhearing upstream sees the drop.
        engine_.tracePacket(pkt, self, "discard-misbehaving");
        return;
    }
    if (pkt.ttl <= 0) {
        engine_.noteTtlDrop(pkt, self);
        noteOutcome(self, Err::TtlExpired, str(pkt.id));
        return;
    }

    // Table-driven stacks re-derive the next hops at every member; the
    // source-routed stack trusts the route carried in the packet.
    if (proto_.name == "P2" && !isOrigin) {
        const CtEntry* e = n.findEntry(cid, pkt.dstMid);
        if (e && !n.pathExcluded(e->path)) {
            pkt.route = e->path;
        } else {
            Mid dst = pkt.dstMid;
            queuePending(self, cid, dst, std::move(pkt));
            rreqRecover(self, cid, dst);
            return;
        }
    }

    auto it = std::find(pkt.route.begin(), pkt.route.end(), self);
    if (it == pkt.route.end() || it + 1 == pkt.route.end()) {
        engine_.tracePacket(pkt, self, "drop-bad-route");
        return;
    }
    NodeId next = *(it + 1);
    if (!engine_.topology().adjacent(self, next, rangeFor(mem.mc))) {
        // Stale hop: replace the entry, recover, park the packet.
        std::erase_if(mem.ct, [&](const CtEntry& e) { return e.mid == pkt.dstMid; });
        Mid dst = pkt.dstMid;
        queuePending(self, cid, dst, std::move(pkt));
        rreqRecover(self, cid, dst);
        return;
    }

    pkt.ttl--;
    bool nextIsMember = false;
    for (const auto& [mid, host] : mem.memberHosts)
        if (host == next) nextIsMember = true;

    Packet out;
    if (nextIsMember) {
        out = std::move(pkt);
    } else {
        // Never hand bare community data to an outsider: wrap it.
        Packet wrap;
        wrap.kind = PacketKind::Friend;
        wrap.id = newPacketId(self);
        wrap.cid = cid;
        wrap.ttl = params_.friendTtl;
        wrap.trace = {self};
        wrap.route = pkt.route;
        wrap.inner = std::make_shared<Packet>(std::move(pkt));
        out = std::move(wrap);
    }
    if (proto_.watchdog && out.isDataPlane() && next != out.route.back())
        engine_.watchExpect(self, next, out, engine_.now() + 2.0 * delayFor(mem.mc) + 1e-6);
    transmitPacket(self, out, TxMode::Unicast, next);
}

void Simulation::handleRouted(NodeId self, const Packet& pkt) {
    forwardRouted(self, pkt); // delivers at the route end, relays otherwise
}

void Simulation::deliverRouted(NodeId self, const Packet& pkt) {
    NodeState& n = nodes_.at(self);
    if (!n.isMemberOf(pkt.cid)) {
        isolationViolations_++;
        engine_.tracePacket(pkt, self, "isolation-violation");
        return;
    }
    if (!n.deliveredApp.insert(pkt.id).second) {
        engine_.tracePacket(pkt, self, "dup-final");
        return;
    }
    Machine* m = communityMachine(self, pkt.cid);
    if (!m) {
        noteOutcome(self, Err::UnknownMember, "member without machine");
        return;
    }
    OpArgs args = pkt.payload;
    std::string op;
    if (auto it = args.find("op"); it != args.end()) {
        op = it->second;
        args.erase(it);
    }
    InvokeStatus st = invoke(*m, op, args, &pkt);
    if (st == InvokeStatus::Dispatched) {
        appLog_.push_back({engine_.now(), pkt.cid, self, op, pkt.id, std::move(args)});
        engine_.tracePacket(pkt, self, "deliver");
    } else {
        noteOutcome(self, st == InvokeStatus::NotExposed ? Err::OpNotExposed : Err::BadArgs,
                    op);
        engine_.tracePacket(pkt, self,
                            st == InvokeStatus::NotExposed ? "gate-reject" : "gate-badargs");
    }
}

// -------------------------------------------------------------- friend relay

bool Simulation::sendFriendFlood(NodeId sender, Packet inner) {
    NodeState& n = nodes_.at(sender);
    const CommunityId cid = inner.cid;
    std::string mc;
    if (auto it = n.announcements.find(cid); it != n.announcements.end()) mc = it->second.first;
    if (params_.friendTtl <= 0 ||
        engine_.topology().neighbors(sender, rangeFor(mc)).empty()) {
        noteOutcome(sender, Err::FriendUndeliverable, "no reachable host");
        return false;
    }
    Packet f;
    f.kind = PacketKind::Friend;
    f.id = newPacketId(sender);
    f.cid = cid;
    f.ttl = params_.friendTtl;
    f.trace = {sender};
    f.inner = std::make_shared<Packet>(std::move(inner));
    n.seenFloods.insert(f.id);
    engine_.floods().started["FRIEND"]++;
    transmitPacket(sender, f, TxMode::Broadcast, std::nullopt);

    PacketId fid = f.id;
    double deadline = engine_.now() + 2.0 * (params_.friendTtl + 2) * delayFor(mc) + 1e-3;
    engine_.scheduleTimer(deadline, sender, [this, sender, fid] {
        if (!friendAbsorbed_.count(fid))
            noteOutcome(sender, Err::FriendUndeliverable, str(fid));
    });
    return true;
}

void Simulation::handleFriend(NodeId self, const Packet& pkt) {
    NodeState& n = nodes_[self];
    if (!pkt.inner) return;
    bool member = n.isMemberOf(pkt.cid);

    if (pkt.route.empty()) {
        // Scoped flood form: outsiders relay, the first members absorb.
        if (!n.seenFloods.insert(pkt.id).second) {
            engine_.tracePacket(pkt, self, "dup-ignore");
            return;
        }
        if (member) {
            friendAbsorbed_.insert(pkt.id);
            Packet inner = *pkt.inner;
            engine_.tracePacket(pkt, self, "friend-unwrap");
            if (!inner.route.empty() && inner.route.back() == self) {
                deliverRouted(self, inner);
                return;
            }
            inner.route.clear();
            routePacket(self, std::move(inner));
            return;
        }
        if (engine_.topology().isMisbehaving(self) &&
            pkt.effectiveKind() == PacketKind::Data) {
            engine_.tracePacket(pkt, self, "discard-misbehaving");
            return;
        }
        if (pkt.ttl > 1) {
            Packet fwd = pkt;
            fwd.ttl--;
            fwd.trace.push_back(self);
            transmitPacket(self, fwd, TxMode::Broadcast, std::nullopt);
        }
        return;
    }

    // Directed form: travels along a known path that crosses outsiders.
    if (member) {
        Packet inner = *pkt.inner;
        engine_.tracePacket(pkt, self, "friend-unwrap");
        forwardRouted(self, std::move(inner)); // delivers or keeps going
        return;
    }
    if (engine_.topology().isMisbehaving(self) && pkt.effectiveKind() == PacketKind::Data) {
        engine_.tracePacket(pkt, self, "discard-misbehaving");
        return;
    }
    if (pkt.ttl <= 0) {
        engine_.noteTtlDrop(pkt, self);
        return;
    }
    Packet fwd = pkt;
    fwd.ttl--;
    fwd.trace.push_back(self);
    auto it = std::find(fwd.route.begin(), fwd.route.end(), self);
    if (it == fwd.route.end() || it + 1 == fwd.route.end()) {
        engine_.tracePacket(pkt, self, "drop-bad-route");
        return;
    }
    transmitPacket(self, fwd, TxMode::Unicast, *(it + 1));
}

// ----------------------------------------------------------------- watchdog

void Simulation::handleWatchReport(NodeId self, const Packet& pkt) {
    NodeState& n = nodes_[self];
    if (!n.reputation) n.reputation.emplace(self, params_.watchdog);
    NodeId relay = static_cast<NodeId>(std::stoul(pkt.payload.at("relay")));
    bool forwarded = pkt.payload.at("forwarded") == "1";
    n.reputation->observe(relay, forwarded);
    observationLog_.push_back({engine_.now(), self, relay, forwarded});
}

} // namespace humanet
