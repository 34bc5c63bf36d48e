#include "slabperc/cluster.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <numeric>
#include <string_view>

#include "slabperc/error.hpp"

namespace slabperc {

void ClusterForest::reset(std::uint32_t vertices) {
    parent_.resize(vertices);
    std::iota(parent_.begin(), parent_.end(), VertexId{0});
    size_.assign(vertices, 1);
    clusters_ = vertices;
}

bool ClusterForest::unite(VertexId a, VertexId b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    --clusters_;
    return true;
}

void ClusterForest::build(const LatticeBox& box, const BondConfig& config) {
    if (config.size() != box.edge_count())
        throw InvalidArgument("configuration length does not match the box edge count");
    reset(box.vertex_count());
    config.for_each_open([&](EdgeId e) {
        const auto [a, b] = box.endpoints(e);
        unite(a, b);
    });
}

void ClusterForest::build_without(const LatticeBox& box, const BondConfig& config, EdgeId skip) {
    if (config.size() != box.edge_count())
        throw InvalidArgument("configuration length does not match the box edge count");
    reset(box.vertex_count());
    config.for_each_open([&](EdgeId e) {
        if (e == skip) return;
        const auto [a, b] = box.endpoints(e);
        unite(a, b);
    });
}

ClusterForest build_forest(const LatticeBox& box, const BondConfig& config) {
    ClusterForest forest;
    forest.build(box, config);
    return forest;
}

std::uint32_t cluster_size(const ClusterForest& forest, const LatticeBox& box, const Site& v) {
    return forest.size_of(box.vertex(v));
}

BlockRect block_rect(int vx, int vy, int m) {
    return {m * vx + 1, m * vx + m, m * vy + 1, m * vy + m};
}

namespace {

std::string site_text(const Site& s) {
    return std::to_string(s.x) + "," + std::to_string(s.y) + "," + std::to_string(s.z);
}

struct Describe {
    std::string operator()(const event::OriginToBoundary& e) const {
        return "origin-boundary:" + std::to_string(e.n);
    }
    std::string operator()(const event::Connected& e) const {
        return "connected:" + site_text(e.a) + ":" + site_text(e.b);
    }
    std::string operator()(const event::ClusterSizeAtLeast& e) const {
        return "size:" + site_text(e.x) + ":" + std::to_string(e.size);
    }
    std::string operator()(const event::LeftRightCrossing&) const { return "lr-crossing"; }
    std::string operator()(const event::BlockReach& e) const {
        return "block:" + std::to_string(e.vx) + "," + std::to_string(e.vy) + "," + std::to_string(e.m);
    }
};

std::vector<long long> ints_of(std::string_view text) {
    std::vector<long long> out;
    while (!text.empty()) {
        long long v = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{}) throw InvalidArgument("malformed number in event spec");
        out.push_back(v);
        text.remove_prefix(static_cast<std::size_t>(ptr - text.data()));
        if (!text.empty()) {
            if (text.front() != ',') throw InvalidArgument("malformed number list in event spec");
            text.remove_prefix(1);
        }
    }
    return out;
}

Site site_of(std::string_view text) {
    const auto v = ints_of(text);
    if (v.size() != 3) throw InvalidArgument("event site must be x,y,z");
    return {static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2])};
}

std::vector<std::string_view> split_colon(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i)
        if (i == text.size() || text[i] == ':') {
            parts.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    return parts;
}

}  // namespace

std::string describe(const EventSpec& spec) { return std::visit(Describe{}, spec); }

EventSpec parse_event(const std::string& text) {
    const auto parts = split_colon(text);
    const std::string_view kind = parts[0];
    if (kind == "lr-crossing" && parts.size() == 1) return event::LeftRightCrossing{};
    if (kind == "origin-boundary" && parts.size() == 2) {
        const auto v = ints_of(parts[1]);
        if (v.size() == 1) return event::OriginToBoundary{static_cast<int>(v[0])};
    }
    if (kind == "connected" && parts.size() == 3) return event::Connected{site_of(parts[1]), site_of(parts[2])};
    if (kind == "size" && parts.size() == 3) {
        const auto v = ints_of(parts[2]);
        if (v.size() == 1 && v[0] >= 0)
            return event::ClusterSizeAtLeast{site_of(parts[1]), static_cast<std::uint64_t>(v[0])};
    }
    if (kind == "block" && parts.size() == 2) {
        const auto v = ints_of(parts[1]);
        if (v.size() == 3)
            return event::BlockReach{static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2])};
    }
    throw InvalidArgument("unknown event spec '" + text + "'");
}

namespace {

std::string lateral_text(int x0, int x1, int y0, int y1) {
    return "[" + std::to_string(x0) + "," + std::to_string(x1) + "]x[" + std::to_string(y0) + "," +
           std::to_string(y1) + "]";
}

void require_lateral(const LatticeBox& box, int x0, int x1, int y0, int y1, const std::string& what) {
    if (box.xmin() <= x0 && box.xmax() >= x1 && box.ymin() <= y0 && box.ymax() >= y1) return;
    std::string missing;
    auto note = [&](const char* side, int amount) {
        if (amount <= 0) return;
        if (!missing.empty()) missing += ", ";
        missing += std::to_string(amount) + " on " + side;
    };
    note("-x", box.xmin() - x0);
    note("+x", x1 - box.xmax());
    note("-y", box.ymin() - y0);
    note("+y", y1 - box.ymax());
    throw GeometryError(what + " needs lateral extent " + lateral_text(x0, x1, y0, y1) + " but box " +
                        box.shape_string() + " is short by " + missing);
}

// Shares a cluster between any source and any target.
bool linked(const ClusterForest& forest, const TerminalSets& t, std::vector<VertexId>& scratch) {
    if (t.sources.size() == 1) {
        const VertexId r = forest.find(t.sources.front());
        for (VertexId v : t.targets)
            if (forest.find(v) == r) return true;
        return false;
    }
    scratch.clear();
    for (VertexId v : t.sources) scratch.push_back(forest.find(v));
    std::sort(scratch.begin(), scratch.end());
    for (VertexId v : t.targets)
        if (std::binary_search(scratch.begin(), scratch.end(), forest.find(v))) return true;
    return false;
}

}  // namespace

CompiledEvent::CompiledEvent(const LatticeBox& box, EventSpec spec) : spec_(std::move(spec)) {
    const int k = box.k();
    if (const auto* e = std::get_if<event::OriginToBoundary>(&spec_)) {
        if (e->n < 1) throw InvalidArgument("origin-boundary radius must be >= 1");
        require_lateral(box, -e->n, e->n, -e->n, e->n, describe(spec_));
        TerminalSets t;
        t.sources.push_back(box.vertex({0, 0, 0}));
        for (int z = 0; z <= k; ++z)
            for (int y = -e->n; y <= e->n; ++y)
                for (int x = -e->n; x <= e->n; ++x)
                    if (std::max(std::abs(x), std::abs(y)) == e->n) t.targets.push_back(box.vertex({x, y, z}));
        terminals_ = std::move(t);
    } else if (const auto* e = std::get_if<event::Connected>(&spec_)) {
        terminals_ = TerminalSets{{box.vertex(e->a)}, {box.vertex(e->b)}};
    } else if (const auto* e = std::get_if<event::ClusterSizeAtLeast>(&spec_)) {
        if (e->size < 1) throw InvalidArgument("cluster size threshold must be >= 1");
        size_vertex_ = box.vertex(e->x);
        size_threshold_ = e->size;
    } else if (std::holds_alternative<event::LeftRightCrossing>(spec_)) {
        if (box.width() < 2) throw GeometryError("lr-crossing needs a box at least two columns wide");
        TerminalSets t;
        for (int z = 0; z <= k; ++z)
            for (int y = box.ymin(); y <= box.ymax(); ++y) {
                t.sources.push_back(box.vertex({box.xmin(), y, z}));
                t.targets.push_back(box.vertex({box.xmax(), y, z}));
            }
        terminals_ = std::move(t);
    } else {
        const auto& e = std::get<event::BlockReach>(spec_);
        if (e.m < 1) throw InvalidArgument("block side m must be >= 1");
        const BlockRect r = block_rect(e.vx, e.vy, e.m);
        require_lateral(box, r.x0 - e.m, r.x1 + e.m, r.y0 - e.m, r.y1 + e.m, describe(spec_));
        TerminalSets t;
        for (int z = 0; z <= k; ++z)
            for (int y = r.y0 - e.m; y <= r.y1 + e.m; ++y)
                for (int x = r.x0 - e.m; x <= r.x1 + e.m; ++x) {
                    const int dx = x < r.x0 ? r.x0 - x : (x > r.x1 ? x - r.x1 : 0);
                    const int dy = y < r.y0 ? r.y0 - y : (y > r.y1 ? y - r.y1 : 0);
                    const int d = std::max(dx, dy);
                    if (d == 0)
                        t.sources.push_back(box.vertex({x, y, z}));
                    else if (d == e.m)
                        t.targets.push_back(box.vertex({x, y, z}));
                }
        terminals_ = std::move(t);
    }
}

bool CompiledEvent::operator()(const ClusterForest& forest) const {
    if (terminals_) return linked(forest, *terminals_, scratch_);
    return forest.size_of(size_vertex_) >= size_threshold_;
}

bool evaluate_event(const ClusterForest& forest, const LatticeBox& box, const EventSpec& spec) {
    return CompiledEvent(box, spec)(forest);
}

}  // namespace slabperc
