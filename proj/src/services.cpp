// Application arts: reliable file transfer (go-back-N over routed data),
// gateway-backed name resolution, and the trivial telnet/CBR generators.

#include <algorithm>
#include <cassert>

#include "humanet/sim.hpp"

namespace humanet {

namespace {

std::uint32_t argU32(const OpArgs& a, const std::string& key) {
    return static_cast<std::uint32_t>(std::stoul(a.at(key)));
}

} // namespace

TransferReport* Simulation::transferReport(const std::string& fileId, NodeId src) {
    for (auto it = transfers_.rbegin(); it != transfers_.rend(); ++it)
        if (it->fileId == fileId && it->src == src) return &*it;
    return nullptr;
}

double Simulation::transferRto(NodeId host, const Machine& m, const std::string& fileId) const {
    const NodeState& n = nodes_.at(host);
    auto sit = m.state.sends.find(fileId);
    double delay = delayFor(m.mc);
    std::size_t hops = 4;
    if (sit != m.state.sends.end()) {
        if (const CtEntry* e = n.findEntry(m.cid, sit->second.peer))
            hops = e->path.size() > 1 ? e->path.size() - 1 : 1;
    }
    // four times the one-way path delay, floored at a few hop times
    return std::max(4.0 * delay, 4.0 * double(hops) * delay);
}

void Simulation::armTimer(NodeId host, Machine& m, const std::string& fileId) {
    TransferSession& t = m.state.sends.at(fileId);
    t.timerGeneration++;
    std::uint64_t gen = t.timerGeneration;
    CommunityId cid = m.cid;
    engine_.scheduleTimer(engine_.now() + transferRto(host, m, fileId), host,
                          [this, host, cid, fileId, gen] {
                              onTransferTimeout(host, cid, fileId, gen);
                          });
}

void Simulation::pumpWindow(NodeId host, Machine& m, const std::string& fileId) {
    TransferSession& t = m.state.sends.at(fileId);
    const CommunityMembership* mem = membershipOf(host, m.cid);
    if (!mem) return;
    auto sendChunk = [&](std::uint32_t seq) {
        std::size_t off = std::size_t(seq) * t.chunkSize;
        std::size_t len = std::min(t.chunkSize, t.bytes.size() - off);
        OpArgs args{{"op", "put"},
                    {"file", fileId},
                    {"seq", std::to_string(seq)},
                    {"total", std::to_string(t.totalChunks)},
                    {"data", hexEncode(t.bytes.substr(off, len))}};
        Packet pkt = makeDataPacket(host, *mem, t.peer, PacketKind::Data, std::move(args));
        dataOriginated_++;
        engine_.noteOriginated(PacketKind::Data);
        routePacket(host, std::move(pkt));
    };
    while (t.nextSeq < t.totalChunks && t.nextSeq < t.base + t.window) {
        sendChunk(t.nextSeq);
        t.chunkSends++;
        t.nextSeq++;
        assert(t.nextSeq - t.base <= t.window);
    }
}

void Simulation::onTransferTimeout(NodeId host, const CommunityId& cid, const std::string& fileId,
                                   std::uint64_t generation) {
    Machine* m = communityMachine(host, cid);
    if (!m) return;
    auto sit = m->state.sends.find(fileId);
    if (sit == m->state.sends.end()) return;
    TransferSession& t = sit->second;
    if (t.done || t.failed || generation != t.timerGeneration) return;
    if (t.base >= t.totalChunks) return;

    t.baseRetries++;
    if (t.baseRetries > t.maxRetries) {
        finishTransfer(host, *m, fileId, true);
        noteOutcome(host, Err::TransferFailed,
                    fileId + " after " + std::to_string(t.maxRetries) + " retries");
        return;
    }
    const CommunityMembership* mem = membershipOf(host, cid);
    if (!mem) return;
    // go-back-N: resend the whole outstanding window
    for (std::uint32_t seq = t.base; seq < t.nextSeq; ++seq) {
        std::size_t off = std::size_t(seq) * t.chunkSize;
        std::size_t len = std::min(t.chunkSize, t.bytes.size() - off);
        OpArgs args{{"op", "put"},
                    {"file", fileId},
                    {"seq", std::to_string(seq)},
                    {"total", std::to_string(t.totalChunks)},
                    {"data", hexEncode(t.bytes.substr(off, len))}};
        Packet pkt = makeDataPacket(host, *mem, t.peer, PacketKind::Data, std::move(args));
        dataOriginated_++;
        engine_.noteOriginated(PacketKind::Data);
        t.retransmissions++;
        routePacket(host, std::move(pkt));
    }
    armTimer(host, *m, fileId);
}

void Simulation::finishTransfer(NodeId host, Machine& m, const std::string& fileId, bool failed) {
    TransferSession& t = m.state.sends.at(fileId);
    t.done = !failed;
    t.failed = failed;
    TransferReport* rep = transferReport(fileId, host);
    if (!rep) return;
    rep->chunks = t.totalChunks;
    rep->chunkSends = t.chunkSends;
    rep->retransmissions = t.retransmissions;
    rep->completed = !failed;
    rep->failed = failed;
    rep->bytesMatch = false;
    if (!failed) {
        if (t.totalChunks == 0) {
            rep->bytesMatch = true;
        } else if (const CommunityMembership* mem = membershipOf(host, m.cid)) {
            auto hit = mem->memberHosts.find(t.peer);
            if (hit != mem->memberHosts.end()) {
                if (Machine* sink = communityMachine(hit->second, m.cid)) {
                    auto rit = sink->state.recvs.find(fileId);
                    rep->bytesMatch =
                        rit != sink->state.recvs.end() && rit->second.bytes == t.bytes;
                }
            }
        }
    }
}

bool Simulation::ftpPut(NodeId src, const CommunityId& cid, NodeId dstHost,
                        const std::string& fileId) {
    const CommunityMembership* mem = membershipOf(src, cid);
    if (!mem || !mem->committed) {
        noteOutcome(src, Err::UnknownMember, "ftp_put from non-member");
        return false;
    }
    if (!registry_.culture(mem->mc).declaredOps().count("put")) {
        noteOutcome(src, Err::OpNotExposed, "culture " + mem->mc + " has no file transfer art");
        return false;
    }
    auto fit = files_.find(fileId);
    if (fit == files_.end()) {
        noteOutcome(src, Err::NotFound, "file " + fileId);
        return false;
    }
    auto dstMid = midOfHost(src, cid, dstHost);
    if (!dstMid) {
        noteOutcome(src, Err::UnknownMember, "host " + std::to_string(dstHost));
        return false;
    }
    Machine* m = communityMachine(src, cid);
    if (!m) return false;
    if (m->state.sends.count(fileId)) {
        noteOutcome(src, Err::TransferFailed, fileId + " already in progress");
        return false;
    }

    TransferSession t;
    t.fileId = fileId;
    t.peer = *dstMid;
    t.bytes = fit->second;
    t.chunkSize = params_.chunkSize;
    t.window = params_.window;
    t.maxRetries = params_.maxRetries;
    t.totalChunks =
        static_cast<std::uint32_t>((t.bytes.size() + t.chunkSize - 1) / t.chunkSize);
    m->state.sends[fileId] = std::move(t);

    TransferReport rep;
    rep.fileId = fileId;
    rep.src = src;
    rep.dst = dstHost;
    rep.cid = cid;
    transfers_.push_back(rep);

    if (m->state.sends[fileId].totalChunks == 0) {
        finishTransfer(src, *m, fileId, false); // empty payload: instant completion
        return true;
    }
    pumpWindow(src, *m, fileId);
    armTimer(src, *m, fileId);
    return true;
}

bool Simulation::ftpGet(NodeId requester, const CommunityId& cid, NodeId holder,
                        const std::string& fileId) {
    return sendOp(requester, cid, holder, "get", {{"file", fileId}});
}

bool Simulation::nameRegister(NodeId src, const CommunityId& cid, const std::string& name,
                              NodeId target) {
    const CommunityMembership* mem = membershipOf(src, cid);
    if (!mem || !mem->committed) {
        noteOutcome(src, Err::UnknownMember, "name_register from non-member");
        return false;
    }
    auto targetMid = midOfHost(src, cid, target);
    if (!targetMid) {
        noteOutcome(src, Err::UnknownMember, "target host " + std::to_string(target));
        return false;
    }
    // nearest gateway member by table-path length, self first
    NodeState& n = nodes_.at(src);
    if (isGateway(src)) {
        Machine* m = communityMachine(src, cid);
        if (!m) return false;
        return invoke(*m, "register", {{"name", name}, {"mid", std::to_string(*targetMid)}}) ==
               InvokeStatus::Dispatched;
    }
    std::optional<Mid> best;
    std::size_t bestLen = SIZE_MAX;
    for (const auto& [mid, host] : mem->memberHosts) {
        if (!isGateway(host) || host == src) continue;
        const CtEntry* e = n.findEntry(cid, mid);
        std::size_t len = e ? e->path.size() : SIZE_MAX - 1;
        if (len < bestLen) {
            bestLen = len;
            best = mid;
        }
    }
    if (!best) {
        noteOutcome(src, Err::GatewayMissing, "no gateway member in " + str(cid));
        return false;
    }
    auto hostOf = mem->memberHosts.at(*best);
    return sendOp(src, cid, hostOf, "register",
                  {{"name", name}, {"mid", std::to_string(*targetMid)}});
}

bool Simulation::nameResolve(NodeId src, const CommunityId& cid, const std::string& name) {
    const CommunityMembership* mem = membershipOf(src, cid);
    if (!mem || !mem->committed) {
        noteOutcome(src, Err::UnknownMember, "name_resolve from non-member");
        return false;
    }
    ResolutionReport rr;
    rr.name = name;
    rr.requester = src;
    resolutions_.push_back(rr);
    std::string rid = std::to_string(resolutions_.size() - 1);

    NodeState& n = nodes_.at(src);
    if (isGateway(src)) {
        Machine* m = communityMachine(src, cid);
        if (!m) return false;
        return invoke(*m, "resolve", {{"name", name}, {"rid", rid}}) == InvokeStatus::Dispatched;
    }
    std::optional<Mid> best;
    std::size_t bestLen = SIZE_MAX;
    for (const auto& [mid, host] : mem->memberHosts) {
        if (!isGateway(host) || host == src) continue;
        const CtEntry* e = n.findEntry(cid, mid);
        std::size_t len = e ? e->path.size() : SIZE_MAX - 1;
        if (len < bestLen) {
            bestLen = len;
            best = mid;
        }
    }
    if (!best) {
        noteOutcome(src, Err::GatewayMissing, "no gateway member in " + str(cid));
        return false;
    }
    return sendOp(src, cid, mem->memberHosts.at(*best), "resolve",
                  {{"name", name}, {"rid", rid}});
}

bool Simulation::telnetLogin(NodeId src, const CommunityId& cid, NodeId dstHost) {
    return sendOp(src, cid, dstHost, "login", {{"user", "n" + std::to_string(src)}});
}

bool Simulation::cbrStart(NodeId src, const CommunityId& cid, NodeId dstHost,
                          std::uint32_t count, double interval, std::size_t size) {
    const CommunityMembership* mem = membershipOf(src, cid);
    if (!mem || !mem->committed) {
        noteOutcome(src, Err::UnknownMember, "cbr from non-member");
        return false;
    }
    std::string payload = synthesizeBytes("cbr", size);
    for (std::uint32_t i = 0; i < count; ++i) {
        double at = engine_.now() + double(i) * interval;
        engine_.scheduleTimer(at, src, [this, src, cid, dstHost, payload, i] {
            sendOp(src, cid, dstHost, "cbr_push",
                   {{"seq", std::to_string(i)}, {"data", hexEncode(payload)}});
        });
    }
    return true;
}

std::string Simulation::synthesizeBytes(const std::string& tag, std::size_t size) const {
    std::string out;
    out.reserve(size);
    std::uint64_t h = fnv1a64(tag) ^ params_.seed;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= h << 13;
        h ^= h >> 7;
        h ^= h << 17;
        out.push_back(static_cast<char>(h & 0xff));
    }
    return out;
}

// ------------------------------------------------------------ op handlers

void Simulation::registerServiceOps() {
    // file transfer sink: cumulative in-order go-back-N
    dispatcher_.registerOp(
        "put", {"file", "seq", "total", "data"},
        [this](Machine& m, const OpArgs& a, const Packet* src) {
            const std::string& file = a.at("file");
            RxFileState& rx = m.state.recvs[file];
            std::uint32_t seq = argU32(a, "seq");
            rx.total = argU32(a, "total");
            if (src) rx.peer = src->srcMid;
            if (seq == rx.expected) {
                rx.bytes += hexDecode(a.at("data"));
                rx.deliveredSeqs.push_back(seq);
                rx.expected++;
                if (rx.expected >= rx.total) rx.complete = true;
            }
            // cumulative ack, also for duplicates and gaps
            if (const CommunityMembership* mem = membershipOf(m.host, m.cid)) {
                OpArgs ack{{"op", "ack"},
                           {"file", file},
                           {"next", std::to_string(rx.expected)}};
                Packet pkt =
                    makeDataPacket(m.host, *mem, rx.peer, PacketKind::Ack, std::move(ack));
                routePacket(m.host, std::move(pkt));
            }
        });

    dispatcher_.registerOp("ack", {"file", "next"},
                           [this](Machine& m, const OpArgs& a, const Packet*) {
                               auto sit = m.state.sends.find(a.at("file"));
                               if (sit == m.state.sends.end()) return;
                               TransferSession& t = sit->second;
                               if (t.done || t.failed) return;
                               std::uint32_t next = argU32(a, "next");
                               if (next <= t.base) return;
                               t.base = next;
                               t.baseRetries = 0;
                               if (t.base >= t.totalChunks) {
                                   t.timerGeneration++; // disarm
                                   finishTransfer(m.host, m, a.at("file"), false);
                                   return;
                               }
                               armTimer(m.host, m, a.at("file"));
                               pumpWindow(m.host, m, a.at("file"));
                           });

    dispatcher_.registerOp("get", {"file"},
                           [this](Machine& m, const OpArgs& a, const Packet* src) {
                               const std::string& file = a.at("file");
                               const std::string* bytes = nullptr;
                               auto own = m.state.files.find(file);
                               if (own != m.state.files.end()) bytes = &own->second;
                               if (!bytes) {
                                   auto git = files_.find(file);
                                   if (git != files_.end()) bytes = &git->second;
                               }
                               if (!bytes) {
                                   noteOutcome(m.host, Err::NotFound, "get " + file);
                                   return;
                               }
                               if (!src) return;
                               const CommunityMembership* mem = membershipOf(m.host, m.cid);
                               if (!mem) return;
                               auto peerHost = mem->memberHosts.find(src->srcMid);
                               if (peerHost == mem->memberHosts.end()) return;
                               ftpPut(m.host, m.cid, peerHost->second, file);
                           });

    // transport markers
    dispatcher_.registerOp("stream_open", {}, [](Machine& m, const OpArgs&, const Packet*) {
        m.state.kv["streams"] = std::to_string(std::stoi(m.state.kv["streams"].empty()
                                                             ? "0"
                                                             : m.state.kv["streams"]) +
                                               1);
    });
    dispatcher_.registerOp("stream_close", {}, [](Machine& m, const OpArgs&, const Packet*) {
        m.state.kv["streams_closed"] =
            std::to_string(std::stoi(m.state.kv["streams_closed"].empty()
                                         ? "0"
                                         : m.state.kv["streams_closed"]) +
                           1);
    });
    dispatcher_.registerOp("dgram", {}, [](Machine& m, const OpArgs&, const Packet*) {
        m.state.kv["dgrams"] = std::to_string(
            std::stoi(m.state.kv["dgrams"].empty() ? "0" : m.state.kv["dgrams"]) + 1);
    });

    // routing surface
    dispatcher_.registerOp("route_refresh", {}, [](Machine& m, const OpArgs&, const Packet*) {
        m.state.kv["route_refresh"] = std::to_string(
            std::stoi(m.state.kv["route_refresh"].empty() ? "0" : m.state.kv["route_refresh"]) +
            1);
    });
    dispatcher_.registerOp("route_discover", {"dst"},
                           [this](Machine& m, const OpArgs& a, const Packet*) {
                               rreqRecover(m.host, m.cid, argU32(a, "dst"));
                           });

    // telnet: login and echo reply
    dispatcher_.registerOp("login", {"user"},
                           [this](Machine& m, const OpArgs& a, const Packet* src) {
                               m.state.kv["last_login"] = a.at("user");
                               if (!src) return;
                               if (const CommunityMembership* mem =
                                       membershipOf(m.host, m.cid)) {
                                   OpArgs echo{{"op", "echo"}, {"text", "welcome " + a.at("user")}};
                                   Packet pkt = makeDataPacket(m.host, *mem, src->srcMid,
                                                               PacketKind::Data, std::move(echo));
                                   dataOriginated_++;
                                   engine_.noteOriginated(PacketKind::Data);
                                   routePacket(m.host, std::move(pkt));
                               }
                           });
    dispatcher_.registerOp("echo", {"text"}, [](Machine& m, const OpArgs& a, const Packet*) {
        m.state.kv["last_echo"] = a.at("text");
    });

    dispatcher_.registerOp("cbr_push", {"data"}, [](Machine& m, const OpArgs& a, const Packet*) {
        std::size_t sofar =
            m.state.kv["cbr_bytes"].empty() ? 0 : std::stoul(m.state.kv["cbr_bytes"]);
        m.state.kv["cbr_bytes"] = std::to_string(sofar + a.at("data").size() / 2);
    });

    // name service
    dispatcher_.registerOp("register", {"name", "mid"},
                           [](Machine& m, const OpArgs& a, const Packet*) {
                               // one record per name: re-registration overwrites
                               m.state.names[a.at("name")] = argU32(a, "mid");
                           });
    dispatcher_.registerOp(
        "resolve", {"name"}, [this](Machine& m, const OpArgs& a, const Packet* src) {
            auto it = m.state.names.find(a.at("name"));
            bool found = it != m.state.names.end();
            OpArgs reply{{"op", "resolve_reply"},
                         {"name", a.at("name")},
                         {"found", found ? "1" : "0"},
                         {"by", std::to_string(m.host)},
                         {"gw", isGateway(m.host) ? "1" : "0"}};
            if (found) reply["mid"] = std::to_string(it->second);
            if (a.count("rid")) reply["rid"] = a.at("rid");
            if (!src) { // local resolve on the gateway itself
                OpArgs local = reply;
                local.erase("op");
                if (Machine* self = communityMachine(m.host, m.cid))
                    invoke(*self, "resolve_reply", local, nullptr);
                return;
            }
            if (const CommunityMembership* mem = membershipOf(m.host, m.cid)) {
                Packet pkt =
                    makeDataPacket(m.host, *mem, src->srcMid, PacketKind::Data, std::move(reply));
                dataOriginated_++;
                engine_.noteOriginated(PacketKind::Data);
                routePacket(m.host, std::move(pkt));
            }
        });
    dispatcher_.registerOp(
        "resolve_reply", {"name", "found", "by"},
        [this](Machine& m, const OpArgs& a, const Packet*) {
            if (!a.count("rid")) return;
            std::size_t rid = std::stoul(a.at("rid"));
            if (rid >= resolutions_.size()) return;
            ResolutionReport& rr = resolutions_[rid];
            rr.replied = true;
            rr.answeredBy = argU32(a, "by");
            rr.answeredByGateway = a.count("gw") && a.at("gw") == "1";
            rr.found = a.at("found") == "1";
            if (rr.found && a.count("mid")) rr.mid = argU32(a, "mid");
            if (!rr.found) noteOutcome(m.host, Err::NotFound, "resolve " + a.at("name"));
        });

    // watchdog manual observation injection
    dispatcher_.registerOp("observe", {"relay", "forwarded"},
                           [this](Machine& m, const OpArgs& a, const Packet*) {
                               NodeState& n = nodes_.at(m.host);
                               if (!n.reputation)
                                   n.reputation.emplace(m.host, params_.watchdog);
                               NodeId relay = argU32(a, "relay");
                               bool fwd = a.at("forwarded") == "1";
                               n.reputation->observe(relay, fwd);
                               observationLog_.push_back({engine_.now(), m.host, relay, fwd});
                           });
}

} // namespace humanet
