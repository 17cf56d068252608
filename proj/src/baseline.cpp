// The traditional comparator. No service announcement, no communities:
// every node floods a routing-table update each t_base round for the
// whole run, and data rides fewest-hop source routes.

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "humanet/runner.hpp"

namespace humanet {

namespace {

struct BaselineTransfer {
    std::string fileId;
    NodeId src = 0;
    NodeId dst = 0;
    Path path;
    std::string bytes;
    std::size_t chunkSize = 1024;
    std::uint32_t window = 4;
    std::uint32_t totalChunks = 0;
    std::uint32_t base = 0;
    std::uint32_t nextSeq = 0;
    std::uint32_t baseRetries = 0;
    std::uint32_t maxRetries = 16;
    std::uint64_t timerGeneration = 0;
    bool done = false;
    bool failed = false;
};

struct BaselineRun {
    const Scenario& sc;
    Engine engine;
    double hopDelay = 0.01;
    std::vector<std::set<PacketId>> seen;
    std::vector<std::uint32_t> nextSeq;
    std::map<std::pair<NodeId, std::string>, BaselineTransfer> transfers;
    std::map<std::pair<NodeId, std::string>, std::uint32_t> rxExpected;
    std::map<std::string, Mid> names; // per-gateway naming folded into one table
    std::uint32_t rounds = 0;
    std::uint32_t transfersCompleted = 0;

    explicit BaselineRun(const Scenario& s, Topology topo)
        : sc(s), engine(std::move(topo)) {
        seen.resize(engine.topology().size());
        nextSeq.resize(engine.topology().size(), 0);
    }

    PacketId pktId(NodeId n) { return {n, nextSeq[n]++}; }

    void floodRound(double when) {
        engine.scheduleTimer(when, 0, [this] {
            rounds++;
            for (NodeId n = 0; n < engine.topology().size(); ++n) {
                Packet pkt;
                pkt.kind = PacketKind::CTable;
                pkt.id = pktId(n);
                pkt.ttl = sc.floodTtl;
                pkt.trace = {n};
                seen[n].insert(pkt.id);
                engine.floods().started["CTABLE"]++;
                engine.transmit(n, pkt, TxMode::Broadcast, std::nullopt,
                                engine.topology().radioRange(), hopDelay);
            }
        });
    }

    void forwardAlongRoute(NodeId self, Packet pkt) {
        auto it = std::find(pkt.route.begin(), pkt.route.end(), self);
        if (it == pkt.route.end() || it + 1 == pkt.route.end()) return;
        pkt.trace.push_back(self);
        NodeId next = *(it + 1);
        engine.transmit(self, pkt, TxMode::Unicast, next, engine.topology().radioRange(),
                        hopDelay);
    }

    void sendChunk(BaselineTransfer& t, std::uint32_t seq) {
        std::size_t off = std::size_t(seq) * t.chunkSize;
        std::size_t len = std::min(t.chunkSize, t.bytes.size() - off);
        Packet pkt;
        pkt.kind = PacketKind::Data;
        pkt.id = pktId(t.src);
        pkt.ttl = sc.dataTtl;
        pkt.trace = {t.src};
        pkt.route = t.path;
        pkt.payload = {{"op", "put"},
                       {"file", t.fileId},
                       {"seq", std::to_string(seq)},
                       {"total", std::to_string(t.totalChunks)},
                       {"data", hexEncode(t.bytes.substr(off, len))}};
        if (t.path.size() < 2) return;
        engine.noteOriginated(PacketKind::Data);
        engine.transmit(t.src, pkt, TxMode::Unicast, t.path[1], engine.topology().radioRange(),
                        hopDelay);
    }

    void armTimer(BaselineTransfer& t) {
        t.timerGeneration++;
        std::uint64_t gen = t.timerGeneration;
        double rto = std::max(4.0 * hopDelay,
                              4.0 * double(t.path.empty() ? 1 : t.path.size() - 1) * hopDelay);
        auto key = std::make_pair(t.src, t.fileId);
        engine.scheduleTimer(engine.now() + rto, t.src, [this, key, gen] {
            auto it = transfers.find(key);
            if (it == transfers.end()) return;
            BaselineTransfer& tt = it->second;
            if (tt.done || tt.failed || gen != tt.timerGeneration) return;
            tt.baseRetries++;
            if (tt.baseRetries > tt.maxRetries) {
                tt.failed = true;
                return;
            }
            for (std::uint32_t s = tt.base; s < tt.nextSeq; ++s) sendChunk(tt, s);
            armTimer(tt);
        });
    }

    void pump(BaselineTransfer& t) {
        while (t.nextSeq < t.totalChunks && t.nextSeq < t.base + t.window) {
            sendChunk(t, t.nextSeq);
            t.nextSeq++;
        }
    }

    void startTransfer(NodeId src, NodeId dst, const std::string& fileId,
                       const std::string& bytes) {
        BaselineTransfer t;
        t.fileId = fileId;
        t.src = src;
        t.dst = dst;
        t.bytes = bytes;
        t.chunkSize = sc.chunkSize;
        t.window = sc.window;
        t.maxRetries = sc.maxRetries;
        t.path = bfsPath(engine.topology(), src, dst, engine.topology().radioRange());
        t.totalChunks =
            static_cast<std::uint32_t>((bytes.size() + t.chunkSize - 1) / t.chunkSize);
        auto key = std::make_pair(src, fileId);
        transfers[key] = std::move(t);
        BaselineTransfer& ref = transfers[key];
        if (ref.totalChunks == 0 || ref.path.empty()) {
            ref.done = ref.totalChunks == 0;
            if (ref.done) transfersCompleted++;
            return;
        }
        pump(ref);
        armTimer(ref);
    }

    void oneShot(NodeId src, NodeId dst, OpArgs payload) {
        Path p = bfsPath(engine.topology(), src, dst, engine.topology().radioRange());
        if (p.size() < 2) return;
        Packet pkt;
        pkt.kind = PacketKind::Data;
        pkt.id = pktId(src);
        pkt.ttl = sc.dataTtl;
        pkt.trace = {src};
        pkt.route = p;
        pkt.payload = std::move(payload);
        engine.noteOriginated(PacketKind::Data);
        engine.transmit(src, pkt, TxMode::Unicast, p[1], engine.topology().radioRange(),
                        hopDelay);
    }

    void deliver(NodeId self, const Packet& pkt) {
        if (pkt.kind == PacketKind::CTable) {
            if (!seen[self].insert(pkt.id).second) return;
            if (pkt.ttl > 1) {
                Packet fwd = pkt;
                fwd.ttl--;
                fwd.trace.push_back(self);
                engine.transmit(self, fwd, TxMode::Broadcast, std::nullopt,
                                engine.topology().radioRange(), hopDelay);
            }
            return;
        }
        if (pkt.route.empty()) return;
        if (pkt.route.back() != self) {
            forwardAlongRoute(self, pkt);
            return;
        }
        const auto op = pkt.payload.find("op");
        if (op == pkt.payload.end()) return;
        if (op->second == "put") {
            auto key = std::make_pair(pkt.route.front(), pkt.payload.at("file"));
            std::uint32_t seq = std::stoul(pkt.payload.at("seq"));
            std::uint32_t total = std::stoul(pkt.payload.at("total"));
            std::uint32_t& expected = rxExpected[key];
            if (seq == expected) expected++;
            Packet ack;
            ack.kind = PacketKind::Ack;
            ack.id = pktId(self);
            ack.ttl = sc.dataTtl;
            ack.trace = {self};
            ack.route.assign(pkt.route.rbegin(), pkt.route.rend());
            ack.payload = {{"op", "ack"},
                           {"file", pkt.payload.at("file")},
                           {"next", std::to_string(expected)},
                           {"total", std::to_string(total)}};
            if (ack.route.size() >= 2)
                engine.transmit(self, ack, TxMode::Unicast, ack.route[1],
                                engine.topology().radioRange(), hopDelay);
        } else if (op->second == "ack") {
            auto key = std::make_pair(self, pkt.payload.at("file"));
            auto it = transfers.find(key);
            if (it == transfers.end()) return;
            BaselineTransfer& t = it->second;
            if (t.done || t.failed) return;
            std::uint32_t next = std::stoul(pkt.payload.at("next"));
            if (next <= t.base) return;
            t.base = next;
            t.baseRetries = 0;
            if (t.base >= t.totalChunks) {
                t.done = true;
                t.timerGeneration++;
                transfersCompleted++;
                return;
            }
            armTimer(t);
            pump(t);
        } else if (op->second == "resolve") {
            auto it = names.find(pkt.payload.at("name"));
            OpArgs reply{{"op", "resolve_reply"},
                         {"name", pkt.payload.at("name")},
                         {"found", it != names.end() ? "1" : "0"}};
            oneShot(self, pkt.route.front(), std::move(reply));
        }
        // other ops (login, cbr_push, register, ...) terminate here
    }
};

} // namespace

nlohmann::json runBaseline(const Scenario& sc, std::uint64_t seed) {
    std::vector<Vec2> pos(sc.nodes.size());
    for (const ScenarioNode& n : sc.nodes) pos[n.id] = {n.x, n.y};
    Topology topo(std::move(pos), sc.radioRange);
    for (const ScenarioNode& n : sc.nodes)
        if (n.misbehaving) topo.flagMisbehaving(n.id);

    BaselineRun run(sc, std::move(topo));
    run.engine.setSeed(seed);
    run.engine.setLossRate(sc.lossRate);
    run.engine.setDeliverHandler(
        [&run](NodeId t, const Packet& p) { run.deliver(t, p); });

    // one initial round always, then every t_base through the duration
    for (double t = 0.0;; t += sc.tBase) {
        run.floodRound(t);
        if (sc.tBase <= 0.0 || t + sc.tBase > sc.duration) break;
    }

    // mirror the scenario's traffic over fewest-hop routes
    NodeId firstGateway = 0;
    bool haveGateway = false;
    for (const ScenarioNode& n : sc.nodes)
        if (n.gateway && !haveGateway) {
            firstGateway = n.id;
            haveGateway = true;
        }
    std::map<std::string, std::string> fileBytes;
    for (const ScenarioFile& f : sc.files) {
        if (f.path.empty()) {
            fileBytes[f.name] = synthesizeFileBytes(f.name, f.size, seed);
        } else {
            std::ifstream in(f.path, std::ios::binary);
            std::ostringstream buf;
            buf << in.rdbuf();
            fileBytes[f.name] = buf.str();
        }
    }

    for (const ScenarioEvent& e : sc.events) {
        auto node = [](const std::string& s) { return static_cast<NodeId>(std::stoul(s)); };
        if (e.verb == "ftp_put") {
            run.engine.scheduleTimer(e.time, node(e.args[0]), [&run, &fileBytes, e, node] {
                run.startTransfer(node(e.args[0]), node(e.args[1]), e.args[3],
                                  fileBytes[e.args[3]]);
            });
        } else if (e.verb == "send" || e.verb == "telnet") {
            run.engine.scheduleTimer(e.time, node(e.args[0]), [&run, e, node] {
                run.oneShot(node(e.args[0]), node(e.args[1]), {{"op", "msg"}});
            });
        } else if (e.verb == "cbr") {
            run.engine.scheduleTimer(e.time, node(e.args[0]), [&run, e, node] {
                std::uint32_t count = std::stoul(e.args[3]);
                double interval = std::stod(e.args[4]);
                for (std::uint32_t i = 0; i < count; ++i) {
                    run.engine.scheduleTimer(
                        run.engine.now() + i * interval, node(e.args[0]),
                        [&run, e, node] { run.oneShot(node(e.args[0]), node(e.args[1]),
                                                      {{"op", "msg"}}); });
                }
            });
        } else if (e.verb == "name_register" && haveGateway) {
            run.engine.scheduleTimer(e.time, node(e.args[0]), [&run, e, node, firstGateway] {
                run.names[e.args[2]] = node(e.args[3]);
                if (node(e.args[0]) != firstGateway)
                    run.oneShot(node(e.args[0]), firstGateway, {{"op", "register_msg"}});
            });
        } else if (e.verb == "name_resolve" && haveGateway) {
            run.engine.scheduleTimer(e.time, node(e.args[0]), [&run, e, node, firstGateway] {
                if (node(e.args[0]) != firstGateway)
                    run.oneShot(node(e.args[0]), firstGateway,
                                {{"op", "resolve"}, {"name", e.args[2]}});
            });
        }
    }

    run.engine.runUntilIdle();

    const TxCounters& c = run.engine.counters();
    nlohmann::json j;
    j["control_tx"] = c.controlTx;
    j["data_tx"] = c.dataTx;
    j["broadcasts"] = c.broadcasts;
    j["unicasts"] = c.unicasts;
    j["rounds"] = run.rounds;
    j["t_base"] = sc.tBase;
    j["transfers_completed"] = run.transfersCompleted;
    return j;
}

} // namespace humanet
