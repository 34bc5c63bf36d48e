#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "slabperc/lattice.hpp"
#include "slabperc/sampler.hpp"

namespace slabperc {

/// Disjoint-set forest over box vertices with path halving and union by size.
///
/// find() compresses paths through a mutable parent array, so a forest must
/// not be queried from two threads at once.
class ClusterForest {
public:
    ClusterForest() = default;
    explicit ClusterForest(std::uint32_t vertices) { reset(vertices); }

    void reset(std::uint32_t vertices);

    VertexId find(VertexId v) const {
        while (parent_[v] != v) {
            parent_[v] = parent_[parent_[v]];
            v = parent_[v];
        }
        return v;
    }
    /// Returns true when the two vertices were in different clusters.
    bool unite(VertexId a, VertexId b);
    bool connected(VertexId a, VertexId b) const { return find(a) == find(b); }

    /// Size of the cluster containing v.
    std::uint32_t size_of(VertexId v) const { return size_[find(v)]; }
    std::uint32_t vertex_count() const { return static_cast<std::uint32_t>(parent_.size()); }
    std::uint32_t cluster_count() const { return clusters_; }

    /// Rebuilds from scratch using every open edge of `config`.
    void build(const LatticeBox& box, const BondConfig& config);
    /// As build(), treating edge `skip` as closed.
    void build_without(const LatticeBox& box, const BondConfig& config, EdgeId skip);

private:
    mutable std::vector<VertexId> parent_;
    std::vector<std::uint32_t> size_;
    std::uint32_t clusters_ = 0;
};

ClusterForest build_forest(const LatticeBox& box, const BondConfig& config);

/// Size of v's cluster inside the box. Throws GeometryError for a site
/// outside the box.
std::uint32_t cluster_size(const ClusterForest& forest, const LatticeBox& box, const Site& v);

namespace event {

/// A_n: the origin is joined to {max(|x|,|y|) = n}.
struct OriginToBoundary {
    int n = 1;
};
struct Connected {
    Site a;
    Site b;
};
struct ClusterSizeAtLeast {
    Site x;
    std::uint64_t size = 1;
};
/// Open path from the face x = xmin to the face x = xmax, any layers.
struct LeftRightCrossing {};
/// C_m(S_{v,m}) with S_{v,m} = [m*vx+1, m*vx+m] x [m*vy+1, m*vy+m] x {0..k}:
/// some vertex of the block is joined to a vertex at max-norm distance m.
struct BlockReach {
    int vx = 0;
    int vy = 0;
    int m = 1;
};

}  // namespace event

using EventSpec = std::variant<event::OriginToBoundary, event::Connected, event::ClusterSizeAtLeast,
                               event::LeftRightCrossing, event::BlockReach>;

/// Short text form, e.g. `origin-boundary:3`, `connected:0,0,0:1,1,1`,
/// `size:0,0,0:10`, `lr-crossing`, `block:0,0,8`.
std::string describe(const EventSpec& spec);
EventSpec parse_event(const std::string& text);

/// Lateral block S_{v,m}, inclusive bounds.
struct BlockRect {
    int x0, x1, y0, y1;
};
BlockRect block_rect(int vx, int vy, int m);

/// Source and target vertex sets of a connection event; the event holds iff
/// some source and some target share a cluster.
struct TerminalSets {
    std::vector<VertexId> sources;
    std::vector<VertexId> targets;
};

/// An EventSpec validated against one box, with its vertex sets resolved.
class CompiledEvent {
public:
    /// Throws GeometryError when the event does not fit in the box.
    CompiledEvent(const LatticeBox& box, EventSpec spec);

    bool operator()(const ClusterForest& forest) const;

    const EventSpec& spec() const { return spec_; }
    /// Present for every event type except ClusterSizeAtLeast.
    const std::optional<TerminalSets>& terminals() const { return terminals_; }

private:
    EventSpec spec_;
    std::optional<TerminalSets> terminals_;
    VertexId size_vertex_ = 0;
    std::uint64_t size_threshold_ = 0;
    mutable std::vector<VertexId> scratch_;
};

bool evaluate_event(const ClusterForest& forest, const LatticeBox& box, const EventSpec& spec);

}  // namespace slabperc
