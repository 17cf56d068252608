#ifndef HUMANET_TOPOLOGY_HPP
#define HUMANET_TOPOLOGY_HPP

#include <set>
#include <vector>

#include "humanet/types.hpp"

namespace humanet {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Unit-disc wireless topology: a hears b iff their Euclidean distance is
// at most the effective radio range. Nodes are stationary for the whole
// run. The misbehaving set flags data-droppers; the engine and the
// protocol layer consult it, the adjacency test does not.
class Topology {
public:
    Topology() = default;
    Topology(std::vector<Vec2> positions, double radioRange);

    NodeId addNode(double x, double y);
    void flagMisbehaving(NodeId n);

    std::size_t size() const { return positions_.size(); }
    double radioRange() const { return radioRange_; }
    const Vec2& position(NodeId n) const;

    bool isMisbehaving(NodeId n) const { return misbehaving_.count(n) != 0; }
    const std::set<NodeId>& misbehaving() const { return misbehaving_; }

    // Sorted by id so broadcast delivery order is reproducible.
    std::vector<NodeId> neighbors(NodeId n) const;
    std::vector<NodeId> neighbors(NodeId n, double range) const;

    bool adjacent(NodeId a, NodeId b) const;
    bool adjacent(NodeId a, NodeId b, double range) const;

    double distance(NodeId a, NodeId b) const;

    // True when every consecutive pair of the walk is adjacent at `range`
    // and no node repeats.
    bool validWalk(const Path& path, double range) const;

    // True when some path connects every node pair at base range.
    bool connected() const;

private:
    void checkNode(NodeId n) const;

    std::vector<Vec2> positions_;
    double radioRange_ = 1.0;
    std::set<NodeId> misbehaving_;
};

// Fewest-hop walk between two nodes at the given range; empty when
// unreachable. Ties break toward lower node ids.
Path bfsPath(const Topology& topo, NodeId from, NodeId to, double range);

} // namespace humanet

#endif
