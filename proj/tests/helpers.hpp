#ifndef HUMANET_TEST_HELPERS_HPP
#define HUMANET_TEST_HELPERS_HPP

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "humanet/sim.hpp"

namespace humanet::test {

// The four-node community network: N1(0,0) N2(1,0) N3(0,1) N4(2,0) at
// range 1.2 gives exactly the links N1-N2, N1-N3, N2-N4.
inline Topology fourNodeTopology() {
    return Topology({{0, 0}, {1, 0}, {0, 1}, {2, 0}}, 1.2);
}

inline RunParams quickParams() {
    RunParams p;
    p.tJoin = 1.0;
    return p;
}

// Independent oracle: breadth-first shortest hop path, written against
// plain adjacency lists so it shares nothing with the simulator's
// routing machinery.
inline std::vector<NodeId> oracleShortestPath(const std::vector<std::vector<NodeId>>& adj,
                                              NodeId from, NodeId to,
                                              const std::set<NodeId>& avoid = {}) {
    if (from == to) return {from};
    std::vector<int> parent(adj.size(), -1);
    std::queue<NodeId> q;
    q.push(from);
    parent[from] = int(from);
    while (!q.empty()) {
        NodeId u = q.front();
        q.pop();
        for (NodeId v : adj[u]) {
            if (parent[v] != -1 || avoid.count(v)) continue;
            parent[v] = int(u);
            if (v == to) {
                std::vector<NodeId> path{to};
                NodeId cur = to;
                while (cur != from) {
                    cur = NodeId(parent[cur]);
                    path.push_back(cur);
                }
                std::reverse(path.begin(), path.end());
                return path;
            }
            q.push(v);
        }
    }
    return {};
}

// Oracle adjacency from raw positions, quadratic distance check.
inline std::vector<std::vector<NodeId>> oracleAdjacency(const std::vector<Vec2>& pos,
                                                        double range) {
    std::vector<std::vector<NodeId>> adj(pos.size());
    for (NodeId a = 0; a < pos.size(); ++a)
        for (NodeId b = 0; b < pos.size(); ++b) {
            if (a == b) continue;
            double dx = pos[a].x - pos[b].x, dy = pos[a].y - pos[b].y;
            if (dx * dx + dy * dy <= range * range) adj[a].push_back(b);
        }
    return adj;
}

// Oracle flood size: nodes reachable from the origin, each of which
// transmits the flood exactly once.
inline std::size_t oracleFloodTransmissions(const std::vector<std::vector<NodeId>>& adj,
                                            NodeId origin) {
    std::set<NodeId> seen{origin};
    std::queue<NodeId> q;
    q.push(origin);
    while (!q.empty()) {
        NodeId u = q.front();
        q.pop();
        for (NodeId v : adj[u])
            if (seen.insert(v).second) q.push(v);
    }
    return seen.size();
}

// Deterministic xorshift for test data generation.
inline std::uint64_t nextRand(std::uint64_t& s) {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return s;
}

inline int countTraceLines(const std::string& trace, const std::string& needle) {
    int n = 0;
    std::size_t pos = 0;
    while ((pos = trace.find(needle, pos)) != std::string::npos) {
        n++;
        pos += needle.size();
    }
    return n;
}

// count full trace lines containing both substrings
inline int countTraceLines(const std::string& trace, const std::string& a,
                           const std::string& b) {
    int n = 0;
    std::size_t start = 0;
    while (start < trace.size()) {
        std::size_t end = trace.find('\n', start);
        if (end == std::string::npos) end = trace.size();
        std::string_view line(trace.data() + start, end - start);
        if (line.find(a) != std::string_view::npos && line.find(b) != std::string_view::npos)
            n++;
        start = end + 1;
    }
    return n;
}

} // namespace humanet::test

#endif
