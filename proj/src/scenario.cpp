#include "humanet/scenario.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "humanet/error.hpp"

namespace humanet {

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
    throw Error(Err::ValidationError, origin + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> tokens(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) {
        if (tok[0] == '#') break; // trailing comment
        out.push_back(tok);
    }
    return out;
}

double toDouble(const std::string& origin, int line, const std::string& s) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) fail(origin, line, "bad number '" + s + "'");
        return v;
    } catch (const Error&) {
        throw;
    } catch (...) {
        fail(origin, line, "bad number '" + s + "'");
    }
}

std::uint64_t toU64(const std::string& origin, int line, const std::string& s) {
    try {
        std::size_t used = 0;
        std::uint64_t v = std::stoull(s, &used);
        if (used != s.size()) fail(origin, line, "bad integer '" + s + "'");
        return v;
    } catch (const Error&) {
        throw;
    } catch (...) {
        fail(origin, line, "bad integer '" + s + "'");
    }
}

} // namespace

std::string Scenario::displayName(NodeId n) const {
    for (const ScenarioNode& sn : nodes)
        if (sn.id == n) return sn.name.empty() ? "N" + std::to_string(n) : sn.name;
    return "N" + std::to_string(n);
}

Scenario parseScenario(const std::string& text, const std::string& originName) {
    Scenario s;
    std::istringstream is(text);
    std::string line;
    int lineNo = 0;
    bool headerSeen = false;

    while (std::getline(is, line)) {
        lineNo++;
        std::vector<std::string> t = tokens(line);
        if (t.empty()) continue;
        if (!headerSeen) {
            if (t.size() != 2 || t[0] != "humanet-scenario" || t[1] != "v1")
                fail(originName, lineNo, "expected header 'humanet-scenario v1'");
            headerSeen = true;
            continue;
        }
        const std::string& key = t[0];
        auto need = [&](std::size_t n) {
            if (t.size() != n + 1)
                fail(originName, lineNo,
                     key + " expects " + std::to_string(n) + " argument(s)");
        };

        if (key == "name") {
            need(1);
            s.name = t[1];
        } else if (key == "duration") {
            need(1);
            s.duration = toDouble(originName, lineNo, t[1]);
        } else if (key == "seed") {
            need(1);
            s.seed = toU64(originName, lineNo, t[1]);
        } else if (key == "radio_range") {
            need(1);
            s.radioRange = toDouble(originName, lineNo, t[1]);
            if (s.radioRange <= 0) fail(originName, lineNo, "radio_range must be positive");
        } else if (key == "loss_rate") {
            need(1);
            s.lossRate = toDouble(originName, lineNo, t[1]);
            if (s.lossRate < 0 || s.lossRate >= 1)
                fail(originName, lineNo, "loss_rate must be in [0,1)");
        } else if (key == "environment") {
            need(1);
            if (t[1] == "closed")
                s.environment = Environment::Closed;
            else if (t[1] == "open")
                s.environment = Environment::Open;
            else
                fail(originName, lineNo, "environment is 'closed' or 'open'");
        } else if (key == "param") {
            need(2);
            const std::string& p = t[1];
            double v = toDouble(originName, lineNo, t[2]);
            if (p == "t_join") s.tJoin = v;
            else if (p == "t_refresh") s.tRefresh = v;
            else if (p == "t_base") s.tBase = v;
            else if (p == "rreq_ttl") s.rreqTtl = int(v);
            else if (p == "friend_ttl") s.friendTtl = int(v);
            else if (p == "data_ttl") s.dataTtl = int(v);
            else if (p == "flood_ttl") s.floodTtl = int(v);
            else if (p == "chunk_size") s.chunkSize = std::size_t(v);
            else if (p == "window") s.window = std::uint32_t(v);
            else if (p == "max_retries") s.maxRetries = std::uint32_t(v);
            else if (p == "tx_cost") s.txCost = v;
            else if (p == "rx_cost") s.rxCost = v;
            else fail(originName, lineNo, "unknown param '" + p + "'");
        } else if (key == "watchdog") {
            need(2);
            const std::string& p = t[1];
            double v = toDouble(originName, lineNo, t[2]);
            if (p == "init") s.watchdog.init = v;
            else if (p == "drop_penalty") s.watchdog.dropPenalty = v;
            else if (p == "forward_reward") s.watchdog.forwardReward = v;
            else if (p == "threshold") s.watchdog.threshold = v;
            else fail(originName, lineNo, "unknown watchdog param '" + p + "'");
        } else if (key == "node") {
            if (t.size() < 4) fail(originName, lineNo, "node expects: id x y [flags...]");
            ScenarioNode n;
            n.id = static_cast<NodeId>(toU64(originName, lineNo, t[1]));
            n.x = toDouble(originName, lineNo, t[2]);
            n.y = toDouble(originName, lineNo, t[3]);
            for (std::size_t i = 4; i < t.size(); ++i) {
                if (t[i] == "misbehaving") n.misbehaving = true;
                else if (t[i] == "gateway") n.gateway = true;
                else if (t[i].rfind("name=", 0) == 0) n.name = t[i].substr(5);
                else fail(originName, lineNo, "unknown node flag '" + t[i] + "'");
            }
            s.nodes.push_back(std::move(n));
        } else if (key == "art") {
            if (t.size() < 4) fail(originName, lineNo, "art expects: name slot category [ops=..] [param=k:v..]");
            ScenarioArt a;
            a.name = t[1];
            auto slot = slotFromName(t[2]);
            if (!slot) fail(originName, lineNo, "unknown slot '" + t[2] + "'");
            a.slot = *slot;
            auto cat = categoryFromName(t[3]);
            if (!cat) fail(originName, lineNo, "unknown category '" + t[3] + "'");
            a.category = *cat;
            for (std::size_t i = 4; i < t.size(); ++i) {
                if (t[i].rfind("ops=", 0) == 0) {
                    std::istringstream os(t[i].substr(4));
                    std::string op;
                    while (std::getline(os, op, ','))
                        if (!op.empty()) a.ops.insert(op);
                } else if (t[i].rfind("param=", 0) == 0) {
                    std::string kv = t[i].substr(6);
                    auto colon = kv.find(':');
                    if (colon == std::string::npos)
                        fail(originName, lineNo, "param wants k:v in '" + t[i] + "'");
                    a.params[kv.substr(0, colon)] =
                        toDouble(originName, lineNo, kv.substr(colon + 1));
                } else {
                    fail(originName, lineNo, "unknown art field '" + t[i] + "'");
                }
            }
            s.arts.push_back(std::move(a));
        } else if (key == "culture") {
            if (t.size() < 3) fail(originName, lineNo, "culture expects: name art...");
            ScenarioCulture c;
            c.name = t[1];
            c.arts.assign(t.begin() + 2, t.end());
            s.cultures.push_back(std::move(c));
        } else if (key == "file") {
            if (t.size() != 3) fail(originName, lineNo, "file expects: name size=N|path=P");
            ScenarioFile f;
            f.name = t[1];
            if (t[2].rfind("size=", 0) == 0)
                f.size = toU64(originName, lineNo, t[2].substr(5));
            else if (t[2].rfind("path=", 0) == 0)
                f.path = t[2].substr(5);
            else
                fail(originName, lineNo, "file wants size= or path=");
            s.files.push_back(std::move(f));
        } else if (key == "at") {
            if (t.size() < 3) fail(originName, lineNo, "at expects: time verb args...");
            ScenarioEvent e;
            e.time = toDouble(originName, lineNo, t[1]);
            e.verb = t[2];
            e.args.assign(t.begin() + 3, t.end());
            e.line = lineNo;
            s.events.push_back(std::move(e));
        } else {
            fail(originName, lineNo, "unknown directive '" + key + "'");
        }
    }
    if (!headerSeen) fail(originName, 1, "missing header 'humanet-scenario v1'");
    return s;
}

Scenario loadScenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Err::ValidationError, path + ": cannot open");
    std::ostringstream buf;
    buf << in.rdbuf();
    Scenario s = parseScenario(buf.str(), path);
    validateScenario(s);
    return s;
}

Registry buildRegistry(const Scenario& s) {
    Registry reg = Registry::withBuiltins();
    for (const ScenarioArt& a : s.arts)
        reg.defineArt(a.name, a.slot, a.category, a.ops, a.params);
    for (const ScenarioCulture& c : s.cultures) reg.composeCulture(c.name, c.arts);
    return reg;
}

void validateScenario(const Scenario& s) {
    const std::string& o = s.name;
    if (s.nodes.empty()) throw Error(Err::ValidationError, o + ": no nodes");
    std::set<NodeId> ids;
    for (const ScenarioNode& n : s.nodes)
        if (!ids.insert(n.id).second)
            throw Error(Err::ValidationError, o + ": duplicate node id " + std::to_string(n.id));
    for (NodeId i = 0; i < ids.size(); ++i)
        if (!ids.count(i))
            throw Error(Err::ValidationError,
                        o + ": node ids must be dense 0..N-1, missing " + std::to_string(i));

    Registry reg;
    try {
        reg = buildRegistry(s);
    } catch (const Error& e) {
        throw Error(Err::ValidationError, o + ": " + e.what());
    }

    std::set<std::string> fileNames;
    for (const ScenarioFile& f : s.files) fileNames.insert(f.name);

    auto nodeOk = [&](const std::string& tok, int line) {
        std::uint64_t v = toU64(o, line, tok);
        if (!ids.count(static_cast<NodeId>(v)))
            fail(o, line, "unknown node " + tok);
        return static_cast<NodeId>(v);
    };

    // Community labels come into existence at their start_service time;
    // every referencing event must happen no earlier.
    std::map<std::string, double> labelStart;
    for (const ScenarioEvent& e : s.events) {
        if (e.time < 0) fail(o, e.line, "negative event time");
        if (e.time > s.duration) fail(o, e.line, "event after scenario duration");
        if (e.verb == "start_service") {
            if (e.args.size() != 4 || e.args[2] != "as")
                fail(o, e.line, "start_service expects: node culture as label");
            nodeOk(e.args[0], e.line);
            if (!reg.hasCulture(e.args[1])) fail(o, e.line, "unknown culture " + e.args[1]);
            if (labelStart.count(e.args[3])) fail(o, e.line, "duplicate community label");
            labelStart[e.args[3]] = e.time;
        }
    }
    auto labelOk = [&](const std::string& label, double time, int line) {
        auto it = labelStart.find(label);
        if (it == labelStart.end()) fail(o, line, "unknown community '" + label + "'");
        if (time < it->second)
            fail(o, line, "community '" + label + "' referenced before its start");
    };
    auto fileOk = [&](const std::string& f, int line) {
        if (!fileNames.count(f)) fail(o, line, "unknown file '" + f + "'");
    };

    for (const ScenarioEvent& e : s.events) {
        if (e.verb == "start_service") continue;
        if (e.verb == "join" || e.verb == "late_join") {
            if (e.args.size() != 2) fail(o, e.line, e.verb + " expects: node label");
            nodeOk(e.args[0], e.line);
            labelOk(e.args[1], e.time, e.line);
        } else if (e.verb == "ftp_put" || e.verb == "ftp_get") {
            if (e.args.size() != 4) fail(o, e.line, e.verb + " expects: src dst label file");
            nodeOk(e.args[0], e.line);
            nodeOk(e.args[1], e.line);
            labelOk(e.args[2], e.time, e.line);
            fileOk(e.args[3], e.line);
        } else if (e.verb == "name_register") {
            if (e.args.size() != 4)
                fail(o, e.line, "name_register expects: node label name target");
            nodeOk(e.args[0], e.line);
            labelOk(e.args[1], e.time, e.line);
            nodeOk(e.args[3], e.line);
        } else if (e.verb == "name_resolve") {
            if (e.args.size() != 3) fail(o, e.line, "name_resolve expects: node label name");
            nodeOk(e.args[0], e.line);
            labelOk(e.args[1], e.time, e.line);
        } else if (e.verb == "send") {
            if (e.args.size() < 4) fail(o, e.line, "send expects: src dst label op [k=v...]");
            nodeOk(e.args[0], e.line);
            nodeOk(e.args[1], e.line);
            labelOk(e.args[2], e.time, e.line);
        } else if (e.verb == "telnet") {
            if (e.args.size() != 3) fail(o, e.line, "telnet expects: src dst label");
            nodeOk(e.args[0], e.line);
            nodeOk(e.args[1], e.line);
            labelOk(e.args[2], e.time, e.line);
        } else if (e.verb == "cbr") {
            if (e.args.size() != 6)
                fail(o, e.line, "cbr expects: src dst label count interval size");
            nodeOk(e.args[0], e.line);
            nodeOk(e.args[1], e.line);
            labelOk(e.args[2], e.time, e.line);
        } else {
            fail(o, e.line, "unknown event verb '" + e.verb + "'");
        }
    }
}

std::string synthesizeFileBytes(const std::string& name, std::uint64_t size, std::uint64_t seed) {
    std::string out;
    out.reserve(size);
    std::uint64_t h = fnv1a64(name) ^ (seed * 0x9e3779b97f4a7c15ull + 0x165667b19e3779f9ull);
    if (h == 0) h = 0x9e3779b97f4a7c15ull;
    for (std::uint64_t i = 0; i < size; ++i) {
        h ^= h << 13;
        h ^= h >> 7;
        h ^= h << 17;
        out.push_back(static_cast<char>(h & 0xff));
    }
    return out;
}

Environment classifyEnvironment(const Scenario& s) {
    bool any = false;
    for (const ScenarioNode& n : s.nodes) any = any || n.misbehaving;
    return classifyEnvironment(s.environment, any);
}

} // namespace humanet
