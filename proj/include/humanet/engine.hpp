#ifndef HUMANET_ENGINE_HPP
#define HUMANET_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "humanet/counters.hpp"
#include "humanet/packet.hpp"
#include "humanet/topology.hpp"
#include "humanet/types.hpp"

namespace humanet {

enum class TxMode { Broadcast, Unicast };

struct Event {
    double time = 0.0;
    std::uint64_t seq = 0; // insertion counter, breaks same-time ties
    NodeId target = 0;
    bool isTimer = false;
    Packet packet;                // deliver events
    std::function<void()> fire;   // timer events
};

struct EventOrder {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) return a.time > b.time;
        return a.seq > b.seq;
    }
};

// Pending ground-truth overhearing check: did `relay` retransmit one of
// `ids` before the deadline? Resolved by the engine, reported to the
// observer as a local WATCH_REPORT delivery.
struct WatchExpectation {
    NodeId observer = 0;
    NodeId relay = 0;
    PacketId watched;
    std::vector<PacketId> acceptedIds;
    bool satisfied = false;
};

// Single-threaded discrete-event loop with the unit-disc radio model.
// Ownership: one engine per run; runs never share state.
class Engine {
public:
    using DeliverFn = std::function<void(NodeId, const Packet&)>;
    using TraceFn = std::function<void(const std::string&)>;

    explicit Engine(Topology topo);

    Topology& topology() { return topo_; }
    const Topology& topology() const { return topo_; }

    double now() const { return now_; }
    TxCounters& counters() { return counters_; }
    const TxCounters& counters() const { return counters_; }
    FloodCounters& floods() { return floods_; }
    const FloodCounters& floods() const { return floods_; }

    void setDeliverHandler(DeliverFn fn) { deliver_ = std::move(fn); }
    void setTraceSink(TraceFn fn) { trace_ = std::move(fn); }

    void setSeed(std::uint64_t seed) { seed_ = seed; }
    void setLossRate(double rate) { lossRate_ = rate; }
    // Runaway guard: runUntilIdle throws after this many events.
    void setEventBudget(std::uint64_t n) { eventBudget_ = n; }

    // Schedules a timer callback. time must not precede the current clock.
    void scheduleTimer(double time, NodeId target, std::function<void()> fn);

    // Sends a packet. Broadcast reaches every node within `range` of the
    // sender; unicast requires dest to be in range. Deliveries land at
    // now + hopDelay. A misbehaving sender's data-plane packet is counted
    // but never delivered. Unicast DATA/ACK is additionally subject to
    // the seeded per-link Bernoulli loss; broadcasts and control packets
    // are reliable.
    void transmit(NodeId sender, const Packet& pkt, TxMode mode,
                  std::optional<NodeId> dest, double range, double hopDelay);

    // Drains the queue; returns the time of the last processed event.
    double runUntilIdle();

    bool misbehavingBlocks(NodeId sender, const Packet& pkt) const;

    // Handler-side drop accounting (ttl expiry) so conservation holds.
    void noteTtlDrop(const Packet& pkt, NodeId at);

    void tracePacket(const Packet& pkt, NodeId at, const std::string& action);

    // --- watchdog ground truth -------------------------------------
    void watchExpect(NodeId observer, NodeId relay, const Packet& sent,
                     double deadline);

    std::uint64_t packetsOriginated(PacketKind k) const;
    void noteOriginated(PacketKind k);

private:
    void classifyTx(NodeId sender, const Packet& pkt);
    bool lossDrops(NodeId from, NodeId to, const Packet& pkt);
    void watchSawTransmit(NodeId sender, const Packet& pkt);
    void resolveExpectation(std::size_t idx);

    Topology topo_;
    double now_ = 0.0;
    std::uint64_t nextSeq_ = 0;
    std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
    DeliverFn deliver_;
    TraceFn trace_;

    TxCounters counters_;
    FloodCounters floods_;
    std::map<PacketKind, std::uint64_t> originated_;

    std::uint64_t seed_ = 0;
    double lossRate_ = 0.0;
    std::uint64_t eventBudget_ = 50'000'000;
    std::uint64_t eventsProcessed_ = 0;
    // Per (cid, link) use counter keys the loss hash so traffic of one
    // community never shifts another community's loss pattern.
    std::map<std::tuple<CommunityId, NodeId, NodeId>, std::uint64_t> linkUse_;

    std::vector<WatchExpectation> watches_;
};

} // namespace humanet

#endif
