#include "slabperc/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <string_view>

#include "slabperc/error.hpp"

namespace slabperc {

const char* to_string(EdgeClass c) { return c == EdgeClass::Radial ? "radial" : "axial"; }

namespace {

struct Extent {
    int xmin, xmax, ymin, ymax;
};

Extent extent_of(const BoxShape& shape) {
    if (const auto* c = std::get_if<CenteredBox>(&shape)) {
        if (c->n < 1) throw InvalidArgument("centered box radius must be >= 1, got " + std::to_string(c->n));
        return {-c->n, c->n, -c->n, c->n};
    }
    const auto& r = std::get<RectBox>(shape);
    if (r.x1 < r.x0 || r.y1 < r.y0 || (r.x1 == r.x0 && r.y1 == r.y0))
        throw InvalidArgument("degenerate rectangle box");
    return {r.x0, r.x1, r.y0, r.y1};
}

}  // namespace

LatticeBox::LatticeBox(SlabSpec spec, BoxShape shape) : k_(spec.k), shape_(shape) {
    if (k_ < 0) throw InvalidArgument("slab thickness k must be >= 0, got " + std::to_string(k_));
    const Extent ext = extent_of(shape_);
    xmin_ = ext.xmin;
    xmax_ = ext.xmax;
    ymin_ = ext.ymin;
    ymax_ = ext.ymax;
    width_ = xmax_ - xmin_ + 1;
    height_ = ymax_ - ymin_ + 1;

    const std::uint64_t w = static_cast<std::uint64_t>(width_);
    const std::uint64_t h = static_cast<std::uint64_t>(height_);
    const std::uint64_t layers = static_cast<std::uint64_t>(k_) + 1;
    const std::uint64_t per_layer = (w - 1) * h + w * (h - 1);
    const std::uint64_t radial = per_layer * layers;
    const std::uint64_t axial = w * h * static_cast<std::uint64_t>(k_);
    const std::uint64_t vertices = w * h * layers;
    if (radial + axial > kMaxEdgeCount || vertices > kMaxEdgeCount)
        throw ResourceLimit("box has " + std::to_string(radial + axial) +
                            " edges, more than the 32-bit edge index allows");

    vertex_count_ = static_cast<std::uint32_t>(vertices);
    radial_count_ = static_cast<std::uint32_t>(radial);
    edge_count_ = static_cast<std::uint32_t>(radial + axial);

    ends_.resize(2 * std::size_t{edge_count_});
    std::size_t pos = 0;
    auto push = [&](VertexId a, VertexId b) {
        ends_[pos++] = a;
        ends_[pos++] = b;
    };
    const std::uint32_t layer_size = static_cast<std::uint32_t>(w * h);
    for (int z = 0; z <= k_; ++z) {
        const std::uint32_t base = static_cast<std::uint32_t>(z) * layer_size;
        for (int y = 0; y < height_; ++y)
            for (int x = 0; x + 1 < width_; ++x) {
                const VertexId v = base + static_cast<std::uint32_t>(y * width_ + x);
                push(v, v + 1);
            }
        for (int y = 0; y + 1 < height_; ++y)
            for (int x = 0; x < width_; ++x) {
                const VertexId v = base + static_cast<std::uint32_t>(y * width_ + x);
                push(v, v + static_cast<std::uint32_t>(width_));
            }
    }
    for (std::uint32_t col = 0; col < layer_size; ++col)
        for (int z = 0; z < k_; ++z) {
            const VertexId v = static_cast<std::uint32_t>(z) * layer_size + col;
            push(v, v + layer_size);
        }
}

int LatticeBox::radius() const {
    if (const auto* c = std::get_if<CenteredBox>(&shape_)) return c->n;
    throw InvalidArgument("radius is only defined for centered boxes");
}

VertexId LatticeBox::vertex(const Site& s) const {
    if (!contains(s))
        throw GeometryError("site (" + std::to_string(s.x) + "," + std::to_string(s.y) + "," +
                            std::to_string(s.z) + ") is outside the box " + shape_string());
    const std::int64_t row = std::int64_t{s.z} * height_ + (s.y - ymin_);
    return static_cast<VertexId>(row * width_ + (s.x - xmin_));
}

Site LatticeBox::site(VertexId v) const {
    const std::int64_t layer = std::int64_t{width_} * height_;
    const std::int64_t iv = v;
    const auto z = static_cast<int>(iv / layer);
    const auto rem = static_cast<int>(iv % layer);
    return {xmin_ + rem % width_, ymin_ + rem / width_, z};
}

EdgeInfo LatticeBox::edge_info(EdgeId e) const {
    if (e >= edge_count_)
        throw InvalidArgument("edge index " + std::to_string(e) + " out of range (edge_count " +
                              std::to_string(edge_count_) + ")");
    const auto [a, b] = endpoints(e);
    return {site(a), site(b), edge_class(e)};
}

std::optional<EdgeId> LatticeBox::edge_between(const Site& a0, const Site& b0) const {
    if (!contains(a0) || !contains(b0)) return std::nullopt;
    const int dist = std::abs(a0.x - b0.x) + std::abs(a0.y - b0.y) + std::abs(a0.z - b0.z);
    if (dist != 1) return std::nullopt;
    Site a = a0, b = b0;
    if (vertex(b) < vertex(a)) std::swap(a, b);

    const std::uint32_t w = static_cast<std::uint32_t>(width_);
    const std::uint32_t h = static_cast<std::uint32_t>(height_);
    const std::uint32_t lx = static_cast<std::uint32_t>(a.x - xmin_);
    const std::uint32_t ly = static_cast<std::uint32_t>(a.y - ymin_);
    if (a.z == b.z) {
        const std::uint32_t per_layer = (w - 1) * h + w * (h - 1);
        const std::uint32_t base = static_cast<std::uint32_t>(a.z) * per_layer;
        if (b.x == a.x + 1) return base + ly * (w - 1) + lx;
        return base + (w - 1) * h + ly * w + lx;
    }
    return radial_count_ + (ly * w + lx) * static_cast<std::uint32_t>(k_) +
           static_cast<std::uint32_t>(a.z);
}

std::vector<VertexId> LatticeBox::boundary() const {
    const int n = radius();
    std::vector<VertexId> out;
    for (VertexId v = 0; v < vertex_count_; ++v) {
        const Site s = site(v);
        if (std::max(std::abs(s.x), std::abs(s.y)) == n) out.push_back(v);
    }
    return out;
}

bool LatticeBox::on_boundary(VertexId v) const {
    const int n = radius();
    const Site s = site(v);
    return std::max(std::abs(s.x), std::abs(s.y)) == n;
}

std::string LatticeBox::shape_string() const {
    if (const auto* c = std::get_if<CenteredBox>(&shape_)) return "centered:" + std::to_string(c->n);
    const auto& r = std::get<RectBox>(shape_);
    return "rect:" + std::to_string(r.x0) + "," + std::to_string(r.x1) + "," + std::to_string(r.y0) +
           "," + std::to_string(r.y1);
}

LatticeBox build_box(SlabSpec spec, BoxShape shape) { return LatticeBox(spec, shape); }

namespace {

std::vector<int> parse_ints(std::string_view text) {
    std::vector<int> out;
    while (!text.empty()) {
        int value = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{}) throw InvalidArgument("malformed integer list in shape");
        out.push_back(value);
        text.remove_prefix(static_cast<std::size_t>(ptr - text.data()));
        if (!text.empty()) {
            if (text.front() != ',') throw InvalidArgument("malformed integer list in shape");
            text.remove_prefix(1);
        }
    }
    return out;
}

}  // namespace

BoxShape parse_shape(const std::string& text) {
    if (text == "rect2") return RectBox{0, 1, 0, 1};
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw InvalidArgument("unknown box shape '" + text + "'");
    const std::string kind = text.substr(0, colon);
    const auto values = parse_ints(std::string_view(text).substr(colon + 1));
    if (kind == "centered" && values.size() == 1) return CenteredBox{values[0]};
    if (kind == "rect" && values.size() == 4) return RectBox{values[0], values[1], values[2], values[3]};
    throw InvalidArgument("unknown box shape '" + text + "'");
}

}  // namespace slabperc
