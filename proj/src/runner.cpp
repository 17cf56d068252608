#include "humanet/runner.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "humanet/error.hpp"

namespace humanet {

namespace {

Topology topologyFrom(const Scenario& sc) {
    std::vector<Vec2> pos(sc.nodes.size());
    for (const ScenarioNode& n : sc.nodes) pos[n.id] = {n.x, n.y};
    Topology topo(std::move(pos), sc.radioRange);
    for (const ScenarioNode& n : sc.nodes)
        if (n.misbehaving) topo.flagMisbehaving(n.id);
    return topo;
}

RunParams paramsFrom(const Scenario& sc, std::uint64_t seed) {
    RunParams p;
    p.duration = sc.duration;
    p.seed = seed;
    p.lossRate = sc.lossRate;
    p.tJoin = sc.tJoin;
    p.tRefresh = sc.tRefresh;
    p.rreqTtl = sc.rreqTtl;
    p.friendTtl = sc.friendTtl;
    p.dataTtl = sc.dataTtl;
    p.floodTtl = sc.floodTtl;
    p.chunkSize = sc.chunkSize;
    p.window = sc.window;
    p.maxRetries = sc.maxRetries;
    p.txCost = sc.txCost;
    p.rxCost = sc.rxCost;
    p.watchdog = sc.watchdog;
    return p;
}

std::string fileBytes(const Scenario& sc, const ScenarioFile& f, std::uint64_t seed) {
    if (!f.path.empty()) {
        std::ifstream in(f.path, std::ios::binary);
        if (!in) throw Error(Err::ValidationError, sc.name + ": cannot read file " + f.path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }
    return synthesizeFileBytes(f.name, f.size, seed);
}

void scheduleScript(Simulation& sim, const Scenario& sc) {
    // Labels resolve when their start_service fires; same-time events run
    // in file order.
    auto labels = std::make_shared<std::map<std::string, CommunityId>>();
    for (const ScenarioEvent& e : sc.events) {
        NodeId actor = e.verb == "start_service" || e.args.empty()
                           ? 0
                           : static_cast<NodeId>(std::stoul(e.args[0]));
        ScenarioEvent ev = e;
        sim.engine().scheduleTimer(e.time, actor, [&sim, ev, labels] {
            auto cidOf = [&](const std::string& label) -> std::optional<CommunityId> {
                auto it = labels->find(label);
                if (it == labels->end()) {
                    sim.noteOutcome(0, Err::ValidationError, "community never started: " + label);
                    return std::nullopt;
                }
                return it->second;
            };
            auto node = [](const std::string& s) { return static_cast<NodeId>(std::stoul(s)); };

            if (ev.verb == "start_service") {
                auto cid = sim.startService(node(ev.args[0]), ev.args[1], ev.args[3]);
                if (cid) (*labels)[ev.args[3]] = *cid;
            } else if (ev.verb == "join") {
                if (auto cid = cidOf(ev.args[1])) sim.joinService(node(ev.args[0]), *cid);
            } else if (ev.verb == "late_join") {
                if (auto cid = cidOf(ev.args[1])) sim.lateJoin(node(ev.args[0]), *cid);
            } else if (ev.verb == "ftp_put") {
                if (auto cid = cidOf(ev.args[2]))
                    sim.ftpPut(node(ev.args[0]), *cid, node(ev.args[1]), ev.args[3]);
            } else if (ev.verb == "ftp_get") {
                if (auto cid = cidOf(ev.args[2]))
                    sim.ftpGet(node(ev.args[0]), *cid, node(ev.args[1]), ev.args[3]);
            } else if (ev.verb == "name_register") {
                if (auto cid = cidOf(ev.args[1]))
                    sim.nameRegister(node(ev.args[0]), *cid, ev.args[2], node(ev.args[3]));
            } else if (ev.verb == "name_resolve") {
                if (auto cid = cidOf(ev.args[1]))
                    sim.nameResolve(node(ev.args[0]), *cid, ev.args[2]);
            } else if (ev.verb == "send") {
                if (auto cid = cidOf(ev.args[2])) {
                    OpArgs args;
                    for (std::size_t i = 4; i < ev.args.size(); ++i) {
                        auto eq = ev.args[i].find('=');
                        if (eq != std::string::npos)
                            args[ev.args[i].substr(0, eq)] = ev.args[i].substr(eq + 1);
                    }
                    sim.sendOp(node(ev.args[0]), *cid, node(ev.args[1]), ev.args[3], args);
                }
            } else if (ev.verb == "telnet") {
                if (auto cid = cidOf(ev.args[2]))
                    sim.telnetLogin(node(ev.args[0]), *cid, node(ev.args[1]));
            } else if (ev.verb == "cbr") {
                if (auto cid = cidOf(ev.args[2]))
                    sim.cbrStart(node(ev.args[0]), *cid, node(ev.args[1]),
                                 static_cast<std::uint32_t>(std::stoul(ev.args[3])),
                                 std::stod(ev.args[4]), std::stoul(ev.args[5]));
            }
        });
    }
}

} // namespace

RunResult runScenario(const Scenario& sc, const RunOverrides& ov) {
    std::uint64_t seed = ov.seed.value_or(sc.seed);
    Environment env = ov.environment
                          ? *ov.environment
                          : classifyEnvironment(sc.environment, [&] {
                                bool any = false;
                                for (const ScenarioNode& n : sc.nodes)
                                    any = any || n.misbehaving;
                                return any;
                            }());
    ProtocolConfig cfg = selectProtocol(env);

    RunResult out;
    out.environment = env;
    out.config = cfg;
    out.sim = std::make_unique<Simulation>(buildRegistry(sc), topologyFrom(sc),
                                           paramsFrom(sc, seed), cfg);
    Simulation& sim = *out.sim;
    for (const ScenarioNode& n : sc.nodes)
        if (n.gateway) sim.setGateway(n.id, true);
    for (const ScenarioFile& f : sc.files) sim.addFile(f.name, fileBytes(sc, f, seed));

    scheduleScript(sim, sc);
    sim.run();

    std::optional<nlohmann::json> baseline;
    if (ov.withBaseline) baseline = runBaseline(sc, seed);
    out.report = buildReport(sim, sc, env, cfg, baseline);
    out.exitCode = sim.outcomes().empty() ? 0 : 1;
    return out;
}

std::string dumpReport(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json buildReport(const Simulation& sim, const Scenario& sc, Environment env,
                           const ProtocolConfig& cfg,
                           const std::optional<nlohmann::json>& baseline) {
    nlohmann::json j;
    const TxCounters& c = sim.engine().counters();
    const FloodCounters& f = sim.engine().floods();

    j["scenario"] = {{"name", sc.name},
                     {"seed", sim.params().seed},
                     {"nodes", sc.nodes.size()},
                     {"duration", sc.duration},
                     {"radio_range", sc.radioRange},
                     {"loss_rate", sc.lossRate}};

    nlohmann::json tx;
    tx["broadcasts"] = c.broadcasts;
    tx["unicasts"] = c.unicasts;
    tx["control_tx"] = c.controlTx;
    tx["data_tx"] = c.dataTx;
    tx["friend_relays"] = c.friendRelays;
    tx["attempts"] = c.attempts;
    tx["delivered"] = c.delivered;
    tx["dropped"] = {{"loss", c.droppedLoss},
                     {"misbehaving", c.droppedMisbehaving},
                     {"no_neighbor", c.droppedNoNeighbor},
                     {"ttl", c.droppedTtl}};
    nlohmann::json perNode = nlohmann::json::object();
    for (const ScenarioNode& n : sc.nodes) {
        auto txit = c.perNodeTx.find(n.id);
        auto dit = c.perNodeDataTx.find(n.id);
        auto rxit = c.perNodeRx.find(n.id);
        perNode[sc.displayName(n.id)] = {
            {"tx", txit == c.perNodeTx.end() ? 0 : txit->second},
            {"data_tx", dit == c.perNodeDataTx.end() ? 0 : dit->second},
            {"rx", rxit == c.perNodeRx.end() ? 0 : rxit->second}};
    }
    tx["per_node"] = perNode;
    j["counters"] = tx;

    j["floods"] = {{"started", f.started}, {"tx_by_kind", f.txByKind}};
    j["delivery_ratio"] = sim.deliveryRatio();
    j["isolation_violations"] = sim.isolationViolations();

    nlohmann::json comms = nlohmann::json::array();
    for (const CommunityInfo& ci : sim.communities()) {
        nlohmann::json cj;
        cj["cid"] = str(ci.cid);
        cj["label"] = ci.label;
        cj["mc"] = ci.mc;
        cj["si"] = sc.displayName(ci.si);
        const NodeState& si = sim.node(ci.si);
        auto mit = si.memberships.find(ci.cid);
        if (mit != si.memberships.end()) {
            nlohmann::json members = nlohmann::json::array();
            for (const auto& [mid, host] : mit->second.memberHosts)
                members.push_back({{"mid", mid}, {"host", sc.displayName(host)}});
            cj["members"] = members;
            nlohmann::json table = nlohmann::json::array();
            std::vector<CtEntry> ct = mit->second.ct;
            std::sort(ct.begin(), ct.end(),
                      [](const CtEntry& a, const CtEntry& b) { return a.mid < b.mid; });
            for (const CtEntry& e : ct) {
                std::string path;
                for (std::size_t i = 0; i < e.path.size(); ++i) {
                    if (i) path += "-";
                    path += sc.displayName(e.path[i]);
                }
                table.push_back({{"mid", e.mid},
                                 {"member", sc.displayName(mit->second.memberHosts.count(e.mid)
                                                               ? mit->second.memberHosts.at(e.mid)
                                                               : e.path.back())},
                                 {"cid", ci.label},
                                 {"path", path}});
            }
            cj["initiator_table"] = table;
        }
        auto pit = c.perCommunityTx.find(ci.cid);
        nlohmann::json participation = nlohmann::json::object();
        if (pit != c.perCommunityTx.end())
            for (const auto& [node, count] : pit->second)
                participation[sc.displayName(node)] = count;
        cj["participation_tx"] = participation;
        comms.push_back(cj);
    }
    j["communities"] = comms;

    nlohmann::json energy;
    double total = 0.0;
    nlohmann::json perNodeEnergy = nlohmann::json::object();
    for (const ScenarioNode& n : sc.nodes) {
        auto txit = c.perNodeTx.find(n.id);
        auto rxit = c.perNodeRx.find(n.id);
        double e = sc.txCost * double(txit == c.perNodeTx.end() ? 0 : txit->second) +
                   sc.rxCost * double(rxit == c.perNodeRx.end() ? 0 : rxit->second);
        perNodeEnergy[sc.displayName(n.id)] = e;
        total += e;
    }
    energy["tx_cost"] = sc.txCost;
    energy["rx_cost"] = sc.rxCost;
    energy["per_node"] = perNodeEnergy;
    energy["total"] = total;
    j["energy"] = energy;

    j["protocol"] = {{"environment", environmentName(env)},
                     {"name", cfg.name},
                     {"basic_routing_art", cfg.basicRoutingArt},
                     {"addon", cfg.watchdog ? "watchdog" : "none"}};

    nlohmann::json wd;
    wd["tables_allocated"] = sim.watchdogTablesAllocated();
    wd["observations"] = sim.observationLog().size();
    nlohmann::json excl = nlohmann::json::array();
    for (std::size_t i = 0; i < sim.nodeCount(); ++i) {
        const NodeState& n = sim.node(static_cast<NodeId>(i));
        if (!n.reputation) continue;
        for (const auto& [relay, score] : n.reputation->scores())
            if (n.reputation->excluded(relay))
                excl.push_back({{"observer", sc.displayName(n.id)},
                                {"relay", sc.displayName(relay)},
                                {"score", score}});
    }
    wd["exclusions"] = excl;
    j["watchdog"] = wd;

    nlohmann::json transfers = nlohmann::json::array();
    for (const TransferReport& t : sim.transfers())
        transfers.push_back({{"file", t.fileId},
                             {"src", sc.displayName(t.src)},
                             {"dst", sc.displayName(t.dst)},
                             {"community", sim.communityLabel(t.cid)},
                             {"chunks", t.chunks},
                             {"chunk_sends", t.chunkSends},
                             {"retransmissions", t.retransmissions},
                             {"completed", t.completed},
                             {"failed", t.failed},
                             {"bytes_match", t.bytesMatch}});
    j["transfers"] = transfers;

    nlohmann::json resolutions = nlohmann::json::array();
    for (const ResolutionReport& r : sim.resolutions())
        resolutions.push_back({{"name", r.name},
                               {"requester", sc.displayName(r.requester)},
                               {"replied", r.replied},
                               {"answered_by", r.replied ? sc.displayName(r.answeredBy) : "-"},
                               {"answered_by_gateway", r.answeredByGateway},
                               {"found", r.found},
                               {"mid", r.found ? nlohmann::json(r.mid) : nlohmann::json()}});
    j["resolutions"] = resolutions;

    nlohmann::json outcomes = nlohmann::json::array();
    for (const OutcomeEvent& o : sim.outcomes())
        outcomes.push_back({{"time", o.time},
                            {"node", sc.displayName(o.node)},
                            {"code", errName(o.code)},
                            {"detail", o.detail}});
    j["outcomes"] = outcomes;

    if (baseline) {
        nlohmann::json cmp;
        cmp["baseline"] = *baseline;
        cmp["humanistic"] = {{"control_tx", c.controlTx}, {"data_tx", c.dataTx}};
        std::uint64_t bc = (*baseline)["control_tx"].get<std::uint64_t>();
        if (c.controlTx > 0)
            cmp["control_ratio"] = double(bc) / double(c.controlTx);
        else
            cmp["control_ratio"] = nullptr;
        j["baseline_comparison"] = cmp;
    }
    return j;
}

} // namespace humanet
