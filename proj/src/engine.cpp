#include "humanet/engine.hpp"

#include <cassert>
#include <cstdio>
#include <utility>

#include "humanet/error.hpp"

namespace humanet {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace

Engine::Engine(Topology topo) : topo_(std::move(topo)) {}

void Engine::scheduleTimer(double time, NodeId target, std::function<void()> fn) {
    if (time < now_)
        throw Error(Err::CausalityViolation,
                    "timer at " + std::to_string(time) + " before now " + std::to_string(now_));
    Event ev;
    ev.time = time;
    ev.seq = nextSeq_++;
    ev.target = target;
    ev.isTimer = true;
    ev.fire = std::move(fn);
    queue_.push(std::move(ev));
}

bool Engine::misbehavingBlocks(NodeId sender, const Packet& pkt) const {
    return topo_.isMisbehaving(sender) && pkt.effectiveKind() == PacketKind::Data;
}

void Engine::classifyTx(NodeId sender, const Packet& pkt) {
    if (pkt.isDataPlane()) {
        counters_.dataTx++;
        counters_.perNodeDataTx[sender]++;
    } else {
        counters_.controlTx++;
    }
    counters_.perNodeTx[sender]++;
    if (pkt.cid != kNoCommunity) counters_.perCommunityTx[pkt.cid][sender]++;
    floods_.txByKind[kindName(pkt.kind)]++;
}

bool Engine::lossDrops(NodeId from, NodeId to, const Packet& pkt) {
    if (lossRate_ <= 0.0) return false;
    if (!pkt.isDataPlane()) return false;
    auto key = std::make_tuple(pkt.cid, from, to);
    std::uint64_t n = linkUse_[key]++;
    std::uint64_t h = seed_;
    h = splitmix64(h ^ splitmix64((std::uint64_t(pkt.cid.si) << 32) | pkt.cid.seq));
    h = splitmix64(h ^ ((std::uint64_t(from) << 32) | to));
    h = splitmix64(h ^ n);
    double u = double(h >> 11) * (1.0 / 9007199254740992.0); // 53-bit mantissa
    return u < lossRate_;
}

void Engine::transmit(NodeId sender, const Packet& pkt, TxMode mode,
                      std::optional<NodeId> dest, double range, double hopDelay) {
    if (sender >= topo_.size())
        throw Error(Err::UnknownNode, "sender " + std::to_string(sender));

    if (mode == TxMode::Broadcast) {
        counters_.broadcasts++;
    } else {
        if (!dest) throw Error(Err::NotAdjacent, "unicast without destination");
        if (!topo_.adjacent(sender, *dest, range))
            throw Error(Err::NotAdjacent, std::to_string(sender) + " -> " + std::to_string(*dest));
        counters_.unicasts++;
    }
    classifyTx(sender, pkt);
    watchSawTransmit(sender, pkt);
    tracePacket(pkt, sender, mode == TxMode::Broadcast ? "tx-bcast" : "tx-ucast");

    bool blocked = misbehavingBlocks(sender, pkt);
    double at = now_ + hopDelay;

    auto attemptDeliver = [&](NodeId to) {
        counters_.attempts++;
        if (blocked) {
            counters_.droppedMisbehaving++;
            tracePacket(pkt, to, "drop-misbehave");
            return;
        }
        if (mode == TxMode::Unicast && lossDrops(sender, to, pkt)) {
            counters_.droppedLoss++;
            tracePacket(pkt, to, "drop-loss");
            return;
        }
        Event ev;
        ev.time = at;
        ev.seq = nextSeq_++;
        ev.target = to;
        ev.packet = pkt;
        queue_.push(std::move(ev));
    };

    if (mode == TxMode::Broadcast) {
        std::vector<NodeId> nbrs = topo_.neighbors(sender, range);
        if (nbrs.empty()) {
            counters_.attempts++;
            counters_.droppedNoNeighbor++;
            tracePacket(pkt, sender, "drop-no-neighbor");
            return;
        }
        for (NodeId n : nbrs) attemptDeliver(n);
    } else {
        attemptDeliver(*dest);
    }
}

double Engine::runUntilIdle() {
    double last = now_;
    while (!queue_.empty()) {
        Event ev = queue_.top();
        queue_.pop();
        if (ev.time < now_) // the clock never moves backwards
            throw Error(Err::CausalityViolation, "event ordering broke");
        if (++eventsProcessed_ > eventBudget_)
            throw Error(Err::CausalityViolation,
                        "event budget exhausted at t=" + std::to_string(ev.time));
        now_ = ev.time;
        last = ev.time;
        if (ev.isTimer) {
            ev.fire();
        } else {
            counters_.delivered++;
            counters_.perNodeRx[ev.target]++;
            tracePacket(ev.packet, ev.target, "rx");
            if (deliver_) deliver_(ev.target, ev.packet);
        }
    }
    return last;
}

void Engine::noteTtlDrop(const Packet& pkt, NodeId at) {
    // The delivery already counted; reclassify it as a ttl drop.
    if (counters_.delivered > 0) counters_.delivered--;
    counters_.droppedTtl++;
    tracePacket(pkt, at, "drop-ttl");
}

void Engine::tracePacket(const Packet& pkt, NodeId at, const std::string& action) {
    if (!trace_) return;
    char head[64];
    std::snprintf(head, sizeof(head), "t=%.6f n=%u ", now_, at);
    trace_(head + std::string(kindName(pkt.kind)) + " pkt=" + str(pkt.id) + " " + action);
}

void Engine::watchExpect(NodeId observer, NodeId relay, const Packet& sent, double deadline) {
    WatchExpectation w;
    w.observer = observer;
    w.relay = relay;
    w.watched = sent.id;
    w.acceptedIds.push_back(sent.id);
    if (sent.inner) w.acceptedIds.push_back(sent.inner->id);
    watches_.push_back(w);
    std::size_t idx = watches_.size() - 1;
    scheduleTimer(deadline, observer, [this, idx] { resolveExpectation(idx); });
}

void Engine::watchSawTransmit(NodeId sender, const Packet& pkt) {
    for (auto& w : watches_) {
        if (w.satisfied || w.relay != sender) continue;
        for (const PacketId& id : w.acceptedIds) {
            if (id == pkt.id || (pkt.inner && pkt.inner->id == id)) {
                w.satisfied = true;
                break;
            }
        }
    }
}

void Engine::resolveExpectation(std::size_t idx) {
    const WatchExpectation& w = watches_[idx];
    Packet report;
    report.kind = PacketKind::WatchReport;
    report.id = w.watched;
    report.payload["relay"] = std::to_string(w.relay);
    report.payload["forwarded"] = w.satisfied ? "1" : "0";
    tracePacket(report, w.observer, w.satisfied ? "observe-forward" : "observe-drop");
    if (deliver_) deliver_(w.observer, report);
}

std::uint64_t Engine::packetsOriginated(PacketKind k) const {
    auto it = originated_.find(k);
    return it == originated_.end() ? 0 : it->second;
}

void Engine::noteOriginated(PacketKind k) { originated_[k]++; }

} // namespace humanet
