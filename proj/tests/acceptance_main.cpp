// Acceptance suite: end-to-end checks of the community protocol stack,
// one pass/fail line per criterion, wall-clock budgets enforced.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "humanet/runner.hpp"

using namespace humanet;

namespace {

std::string fixture(const std::string& name) {
    return std::string(HUMANET_SCENARIO_DIR) + "/" + name;
}

struct Criterion {
    std::string name;
    double budgetSeconds;
    std::function<bool(std::string&)> check;
};

std::uint64_t splitmix(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// ---------------------------------------------------------------- 1 & 2

bool checkCommunityTable(std::string& detail) {
    RunResult r = runScenario(loadScenario(fixture("fig5.scenario")), {});
    const Simulation& sim = *r.sim;
    CommunityId cid{0, 0};
    const NodeState& si = sim.node(0);
    if (!si.isMemberOf(cid)) {
        detail = "initiator never committed";
        return false;
    }
    const CommunityMembership& mem = si.memberships.at(cid);
    // expected rows: member host -> path, exact match
    const std::map<NodeId, Path> expected = {
        {1, {0, 1}}, {2, {0, 2}}, {3, {0, 1, 3}}};
    if (mem.ct.size() != expected.size()) {
        detail = "table has " + std::to_string(mem.ct.size()) + " rows";
        return false;
    }
    for (const CtEntry& e : mem.ct) {
        auto hostIt = mem.memberHosts.find(e.mid);
        if (hostIt == mem.memberHosts.end()) {
            detail = "row with unknown mid";
            return false;
        }
        auto expIt = expected.find(hostIt->second);
        if (expIt == expected.end() || e.path != expIt->second || e.cid != cid) {
            detail = "row for host " + std::to_string(hostIt->second) + " is wrong";
            return false;
        }
    }
    detail = "three rows, exact paths";
    return true;
}

bool checkFloodOnce(std::string& detail) {
    RunResult r = runScenario(loadScenario(fixture("fig5.scenario")), {});
    const FloodCounters& f = r.sim->engine().floods();
    std::uint64_t mcstartTx = f.txByKind.count("MCSTART") ? f.txByKind.at("MCSTART") : 0;
    std::uint64_t floods = 0;
    for (const auto& [kind, n] : f.started) floods += n;
    std::ostringstream os;
    os << "MCSTART tx=" << mcstartTx << " control floods=" << floods;
    detail = os.str();
    return mcstartTx == 4 && floods == 1;
}

// -------------------------------------------------------------------- 3

bool checkOverhead(std::string& detail) {
    Scenario sc = loadScenario(fixture("overhead20.scenario"));
    RunOverrides ov;
    ov.withBaseline = true;
    RunResult r = runScenario(sc, ov);
    double baseline = r.report["baseline_comparison"]["baseline"]["control_tx"];
    double humanistic = r.report["baseline_comparison"]["humanistic"]["control_tx"];
    double ratio = humanistic > 0 ? baseline / humanistic : 0.0;
    std::ostringstream os;
    os << "baseline=" << baseline << " humanistic=" << humanistic << " ratio=" << ratio;
    detail = os.str();
    return humanistic > 0 && ratio >= 5.0;
}

// -------------------------------------------------------------------- 4

bool checkIsolation(std::string& detail) {
    std::uint64_t violations = 0;
    std::uint64_t deliveries = 0;
    std::uint64_t committed = 0;
    int runs = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        std::uint64_t s = seed;
        // random connected-ish cluster of 8..14 nodes
        std::size_t n = 8 + splitmix(s) % 7;
        std::vector<Vec2> pos{{0, 0}};
        for (std::size_t i = 1; i < n; ++i) {
            const Vec2& a = pos[splitmix(s) % pos.size()];
            pos.push_back({a.x + double(splitmix(s) % 140) / 100.0 - 0.7,
                           a.y + double(splitmix(s) % 140) / 100.0 - 0.7});
        }
        Topology topo(pos, 1.0);
        RunParams p;
        p.seed = seed;
        Simulation sim(Registry::withBuiltins(), std::move(topo), p,
                       ProtocolConfig{"P1", "DSR", false});

        NodeId si2 = NodeId(1 + splitmix(s) % (n - 1));
        auto c1 = sim.startService(0, "F", "one");
        std::vector<NodeId> m1, m2;
        for (NodeId j = 0; j < n; ++j) {
            if (j != 0 && splitmix(s) % 3 != 0) m1.push_back(j);
            if (j != si2 && splitmix(s) % 3 != 0) m2.push_back(j);
        }
        double at = 0.3;
        for (NodeId j : m1) {
            sim.engine().scheduleTimer(at, j, [&sim, j, c1] { sim.joinService(j, *c1); });
            at += 0.01;
        }
        sim.engine().scheduleTimer(0.5, si2, [&sim, si2, &m2, c1] {
            auto c2 = sim.startService(si2, "C3", "two");
            if (!c2) return;
            double t = sim.engine().now() + 0.3;
            for (NodeId j : m2) {
                sim.engine().scheduleTimer(t, j, [&sim, j, c2] { sim.joinService(j, *c2); });
                t += 0.01;
            }
        });
        // cross traffic in both communities
        sim.engine().scheduleTimer(2.0, 0, [&sim, c1, &m1] {
            if (!m1.empty()) sim.sendOp(0, *c1, m1.back(), "stream_open", {});
        });
        sim.engine().scheduleTimer(2.5, si2, [&sim, si2, &m2] {
            CommunityId c2{si2, 0};
            if (!m2.empty()) sim.telnetLogin(si2, c2, m2.front());
        });
        sim.run();
        runs++;

        violations += sim.isolationViolations();
        // double-entry check: every application delivery landed on a member
        for (const AppDelivery& d : sim.appLog()) {
            const NodeState& host = sim.node(d.host);
            if (!host.isMemberOf(d.cid)) violations++;
        }
    }
    std::ostringstream os;
    os << runs << " runs, " << violations << " violations";
    detail = os.str();
    return violations == 0;
}

// -------------------------------------------------------------------- 5

bool checkSelection(std::string& detail) {
    ProtocolConfig p1 = selectProtocol(classifyEnvironment(Environment::Closed, true));
    ProtocolConfig p2 = selectProtocol(classifyEnvironment(Environment::Open, false));
    ProtocolConfig inferredOpen = selectProtocol(classifyEnvironment(std::nullopt, true));
    ProtocolConfig inferredClosed = selectProtocol(classifyEnvironment(std::nullopt, false));
    bool ok = p1 == ProtocolConfig{"P1", "DSR", false} &&
              p2 == ProtocolConfig{"P2", "AODV", true} && inferredOpen == p2 &&
              inferredClosed == p1;
    detail = "closed->(P1,none) open->(P2,watchdog)";
    return ok;
}

// -------------------------------------------------------------------- 6

bool checkWatchdog(std::string& detail) {
    Scenario sc = loadScenario(fixture("watchdog_detour.scenario"));
    RunResult open = runScenario(sc, {});
    RunOverrides closedOv;
    closedOv.environment = Environment::Closed;
    RunResult closed = runScenario(sc, closedOv);

    const Simulation& p2 = *open.sim;
    const NodeId dropper = 1;

    // per-observer moment of the third observed drop
    std::map<NodeId, double> thirdDrop;
    std::map<NodeId, int> drops;
    for (const Observation& o : p2.observationLog()) {
        if (o.relay != dropper || o.forwarded) continue;
        if (++drops[o.observer] == 3) thirdDrop[o.observer] = o.time;
    }
    if (thirdDrop.empty()) {
        detail = "no observer reached three drops";
        return false;
    }
    for (const InstallEvent& ie : p2.installLog()) {
        auto t = thirdDrop.find(ie.node);
        if (t == thirdDrop.end() || ie.time <= t->second) continue;
        for (NodeId hop : ie.entry.path)
            if (hop == dropper) {
                detail = "post-exclusion install crosses the dropper";
                return false;
            }
    }

    bool transferOk = !p2.transfers().empty() && p2.transfers()[0].completed &&
                      p2.transfers()[0].bytesMatch;
    double r2 = p2.deliveryRatio();
    double r1 = closed.sim->deliveryRatio();
    std::ostringstream os;
    os << "P2 ratio=" << r2 << " P1 ratio=" << r1 << (transferOk ? ", transfer ok" : ", transfer failed");
    detail = os.str();
    return transferOk && r2 >= r1;
}

// -------------------------------------------------------------------- 7

bool checkTransfer(std::string& detail) {
    Scenario sc = loadScenario(fixture("transfer64k.scenario"));
    RunResult r = runScenario(sc, {});
    const Simulation& sim = *r.sim;
    if (sim.transfers().empty()) {
        detail = "no transfer ran";
        return false;
    }
    const TransferReport& t = sim.transfers()[0];
    // byte-exact reassembly, checked against the source buffer itself
    const Machine* sink = sim.machineAt(2, "F");
    bool bytesEqual = false;
    if (sink) {
        auto it = sink->state.recvs.find("blob64k");
        bytesEqual = it != sink->state.recvs.end() &&
                     it->second.bytes == sim.files().at("blob64k");
    }
    std::ostringstream os;
    os << t.chunks << " chunks, " << t.retransmissions << " retransmissions, bytes "
       << (bytesEqual ? "identical" : "differ");
    detail = os.str();
    return t.completed && t.chunks == 64 && bytesEqual && t.bytesMatch;
}

// -------------------------------------------------------------------- 8

bool checkGateFuzz(std::string& detail) {
    RunParams p;
    Simulation sim(Registry::withBuiltins(), Topology({{0, 0}}, 1.0), p);
    Machine& m = sim.instantiateMachine("F", 0);
    std::set<std::string> declared = sim.registry().culture("F").declaredOps();
    // the expected accept set: the file ops plus what transport and routing declare
    std::set<std::string> expected = {"put", "get", "ack"};
    for (const char* op : {"stream_open", "stream_close", "route_refresh"})
        expected.insert(op);
    if (declared != expected) {
        detail = "declared set diverges from the published stack";
        return false;
    }

    std::vector<std::string> pool(declared.begin(), declared.end());
    std::uint64_t s = 4242;
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        std::string op;
        if (splitmix(s) % 4 == 0) {
            op = pool[splitmix(s) % pool.size()];
        } else {
            std::size_t len = 1 + splitmix(s) % 12;
            for (std::size_t k = 0; k < len; ++k)
                op.push_back(char('a' + splitmix(s) % 26));
        }
        std::string before = serializeState(m.state);
        InvokeStatus got = sim.invoke(m, op, {});
        bool inSet = declared.count(op) != 0;
        if (inSet && got == InvokeStatus::NotExposed) {
            detail = "declared op rejected: " + op;
            return false;
        }
        if (!inSet) {
            if (got != InvokeStatus::NotExposed) {
                detail = "undeclared op admitted: " + op;
                return false;
            }
            if (serializeState(m.state) != before) {
                detail = "rejected op touched machine state: " + op;
                return false;
            }
        }
        checked++;
    }
    detail = std::to_string(checked) + " names, zero gate violations";
    return checked == 1000;
}

// -------------------------------------------------------------------- 9

bool checkDeterminism(std::string& detail) {
    const char* bundled[] = {"fig5.scenario",          "overhead20.scenario",
                             "watchdog_detour.scenario", "transfer64k.scenario",
                             "twocommunities.scenario", "namesvc.scenario"};
    for (const char* name : bundled) {
        Scenario sc = loadScenario(fixture(name));
        RunResult a = runScenario(sc, {});
        RunResult b = runScenario(sc, {});
        if (dumpReport(a.report) != dumpReport(b.report)) {
            detail = std::string(name) + ": reports differ";
            return false;
        }
        if (a.sim->traceText() != b.sim->traceText()) {
            detail = std::string(name) + ": traces differ";
            return false;
        }
    }
    detail = "6 scenarios, reports and traces byte-identical";
    return true;
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"community table matches the published four-node network", 1.0, checkCommunityTable},
        {"service start floods once, four transmissions", 1.0, checkFloodOnce},
        {"community control traffic at least 5x under the baseline", 10.0, checkOverhead},
        {"no cross-community delivery in 100 random societies", 60.0, checkIsolation},
        {"environment to protocol mapping is exact", 1.0, checkSelection},
        {"watchdog excludes the dropper and delivery dominates", 5.0, checkWatchdog},
        {"64 KiB transfer under 10% loss reassembles byte-exact", 5.0, checkTransfer},
        {"1000-name invoke gate fuzz holds the declared-op line", 5.0, checkGateFuzz},
        {"bundled scenarios rerun byte-identical", 30.0, checkDeterminism},
    };

    int failures = 0;
    int idx = 0;
    for (const Criterion& c : criteria) {
        idx++;
        auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.check(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                          .count();
        bool inBudget = secs <= c.budgetSeconds;
        if (!inBudget) detail += " (over time budget)";
        bool pass = ok && inBudget;
        if (!pass) failures++;
        std::printf("[%s] %d. %s — %s (%.2fs)\n", pass ? "PASS" : "FAIL", idx, c.name.c_str(),
                    detail.c_str(), secs);
    }
    if (failures) std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
