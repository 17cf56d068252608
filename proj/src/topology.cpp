#include "humanet/topology.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "humanet/error.hpp"

namespace humanet {

Topology::Topology(std::vector<Vec2> positions, double radioRange)
    : positions_(std::move(positions)), radioRange_(radioRange) {}

NodeId Topology::addNode(double x, double y) {
    positions_.push_back({x, y});
    return static_cast<NodeId>(positions_.size() - 1);
}

void Topology::flagMisbehaving(NodeId n) {
    checkNode(n);
    misbehaving_.insert(n);
}

const Vec2& Topology::position(NodeId n) const {
    checkNode(n);
    return positions_[n];
}

void Topology::checkNode(NodeId n) const {
    if (n >= positions_.size())
        throw Error(Err::UnknownNode, "node " + std::to_string(n));
}

double Topology::distance(NodeId a, NodeId b) const {
    checkNode(a);
    checkNode(b);
    double dx = positions_[a].x - positions_[b].x;
    double dy = positions_[a].y - positions_[b].y;
    return std::sqrt(dx * dx + dy * dy);
}

bool Topology::adjacent(NodeId a, NodeId b) const { return adjacent(a, b, radioRange_); }

bool Topology::adjacent(NodeId a, NodeId b, double range) const {
    if (a == b) return false;
    return distance(a, b) <= range;
}

std::vector<NodeId> Topology::neighbors(NodeId n) const { return neighbors(n, radioRange_); }

std::vector<NodeId> Topology::neighbors(NodeId n, double range) const {
    checkNode(n);
    std::vector<NodeId> out;
    for (NodeId m = 0; m < positions_.size(); ++m) {
        if (m != n && distance(n, m) <= range) out.push_back(m);
    }
    return out;
}

bool Topology::validWalk(const Path& path, double range) const {
    if (path.empty()) return false;
    std::set<NodeId> seen;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (path[i] >= positions_.size()) return false;
        if (!seen.insert(path[i]).second) return false;
        if (i > 0 && !adjacent(path[i - 1], path[i], range)) return false;
    }
    return true;
}

bool Topology::connected() const {
    if (positions_.empty()) return true;
    std::vector<bool> visited(positions_.size(), false);
    std::vector<NodeId> stack{0};
    visited[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
        NodeId n = stack.back();
        stack.pop_back();
        for (NodeId m : neighbors(n)) {
            if (!visited[m]) {
                visited[m] = true;
                reached++;
                stack.push_back(m);
            }
        }
    }
    return reached == positions_.size();
}

Path bfsPath(const Topology& topo, NodeId from, NodeId to, double range) {
    if (from == to) return {from};
    std::vector<int> parent(topo.size(), -1);
    std::vector<NodeId> frontier{from};
    parent[from] = int(from);
    while (!frontier.empty()) {
        std::vector<NodeId> next;
        for (NodeId n : frontier) {
            for (NodeId m : topo.neighbors(n, range)) {
                if (parent[m] != -1) continue;
                parent[m] = int(n);
                if (m == to) {
                    Path path{to};
                    NodeId cur = to;
                    while (cur != from) {
                        cur = static_cast<NodeId>(parent[cur]);
                        path.push_back(cur);
                    }
                    std::reverse(path.begin(), path.end());
                    return path;
                }
                next.push_back(m);
            }
        }
        frontier = std::move(next);
    }
    return {};
}

} // namespace humanet
