#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace slabperc {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

/// Largest edge count a box may have; edge indices must fit in EdgeId.
inline constexpr std::uint64_t kMaxEdgeCount = 0xFFFFFFFEull;

/// Thickness of the slab Z^2 x {0..k}; there are k+1 layers.
struct SlabSpec {
    int k = 0;
};

/// [-n,n]^2 x {0..k}
struct CenteredBox {
    int n = 1;
};

/// [x0,x1] x [y0,y1] x {0..k}
struct RectBox {
    int x0 = 0;
    int x1 = 0;
    int y0 = 0;
    int y1 = 0;
};

using BoxShape = std::variant<CenteredBox, RectBox>;

struct Site {
    int x = 0;
    int y = 0;
    int z = 0;

    friend bool operator==(const Site&, const Site&) = default;
};

/// Radial bonds lie inside a layer (parameter p); axial bonds join
/// consecutive layers of one column (parameter q).
enum class EdgeClass : std::uint8_t { Radial, Axial };

const char* to_string(EdgeClass c);

struct EdgeInfo {
    Site a;
    Site b;
    EdgeClass cls;
};

/// Finite box of the slab with dense vertex and edge indexing.
///
/// Vertex index: ((z * height) + (y - ymin)) * width + (x - xmin).
///
/// Edge order is fixed and documented because configurations and seeds are
/// keyed by edge index:
///   1. radial edges, layer by layer (z = 0..k); inside a layer first every
///      x-direction edge (x,y)-(x+1,y) in row-major order (y outer, x inner),
///      then every y-direction edge (x,y)-(x,y+1) in row-major order;
///   2. axial edges last, column by column in row-major column order, and
///      inside a column (x,y,z)-(x,y,z+1) for z = 0..k-1.
/// Because layer 0 comes first, a k=0 box and a k>0 box over the same
/// rectangle share the indices of every layer-0 edge.
class LatticeBox {
public:
    LatticeBox(SlabSpec spec, BoxShape shape);

    int k() const { return k_; }
    const BoxShape& shape() const { return shape_; }
    bool is_centered() const { return std::holds_alternative<CenteredBox>(shape_); }
    /// Radius n of a CenteredBox; throws for a RectBox.
    int radius() const;

    int xmin() const { return xmin_; }
    int xmax() const { return xmax_; }
    int ymin() const { return ymin_; }
    int ymax() const { return ymax_; }
    int width() const { return width_; }
    int height() const { return height_; }

    std::uint32_t vertex_count() const { return vertex_count_; }
    std::uint32_t edge_count() const { return edge_count_; }
    std::uint32_t radial_count() const { return radial_count_; }
    std::uint32_t axial_count() const { return edge_count_ - radial_count_; }

    bool contains(const Site& s) const {
        return s.x >= xmin_ && s.x <= xmax_ && s.y >= ymin_ && s.y <= ymax_ && s.z >= 0 &&
               s.z <= k_;
    }
    /// Throws GeometryError when the site is outside the box.
    VertexId vertex(const Site& s) const;
    Site site(VertexId v) const;

    EdgeClass edge_class(EdgeId e) const {
        return e < radial_count_ ? EdgeClass::Radial : EdgeClass::Axial;
    }
    /// Endpoints as vertex ids; first < second.
    std::pair<VertexId, VertexId> endpoints(EdgeId e) const {
        return {ends_[2 * std::size_t{e}], ends_[2 * std::size_t{e} + 1]};
    }
    /// Throws InvalidArgument for an out-of-range index.
    EdgeInfo edge_info(EdgeId e) const;
    /// Index of the edge joining two sites, if both are in the box and adjacent.
    std::optional<EdgeId> edge_between(const Site& a, const Site& b) const;

    /// Vertices with max(|x|,|y|) = n, every layer. CenteredBox only.
    std::vector<VertexId> boundary() const;
    bool on_boundary(VertexId v) const;

    /// `centered:n` or `rect:x0,x1,y0,y1`; used in file headers.
    std::string shape_string() const;

    friend bool operator==(const LatticeBox& a, const LatticeBox& b) {
        return a.k_ == b.k_ && a.xmin_ == b.xmin_ && a.xmax_ == b.xmax_ && a.ymin_ == b.ymin_ &&
               a.ymax_ == b.ymax_ && a.is_centered() == b.is_centered();
    }

private:
    int k_;
    BoxShape shape_;
    int xmin_, xmax_, ymin_, ymax_;
    int width_, height_;
    std::uint32_t vertex_count_ = 0;
    std::uint32_t edge_count_ = 0;
    std::uint32_t radial_count_ = 0;
    std::vector<VertexId> ends_;
};

LatticeBox build_box(SlabSpec spec, BoxShape shape);

/// Parses `centered:n`, `rect:x0,x1,y0,y1` or the shorthand `rect2`
/// (= rect:0,1,0,1).
BoxShape parse_shape(const std::string& text);

}  // namespace slabperc
