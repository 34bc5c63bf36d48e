#include "slabperc/sampler.hpp"

#include <bit>
#include <istream>
#include <ostream>
#include <sstream>

#include "slabperc/error.hpp"

namespace slabperc {

void validate(const ParamPoint& params) {
    if (!(params.p >= 0.0 && params.p <= 1.0))
        throw InvalidArgument("p must lie in [0,1], got " + std::to_string(params.p));
    if (!(params.q >= 0.0 && params.q <= 1.0))
        throw InvalidArgument("q must lie in [0,1], got " + std::to_string(params.q));
}

void BondConfig::fill(bool open) {
    for (auto& w : words_) w = open ? ~std::uint64_t{0} : 0;
    if (open && (size_ & 63)) words_.back() &= (std::uint64_t{1} << (size_ & 63)) - 1;
}

std::size_t BondConfig::open_count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

UniformField draw_uniforms(const LatticeBox& box, const SeedSpec& seed) {
    const std::uint64_t key = rng::stream_key(seed);
    std::vector<double> values(box.edge_count());
    for (EdgeId e = 0; e < box.edge_count(); ++e) values[e] = rng::uniform_at(key, e);
    return UniformField(std::move(values));
}

BondConfig threshold_config(const UniformField& uniforms, const LatticeBox& box, const ParamPoint& params) {
    if (uniforms.size() != box.edge_count())
        throw InvalidArgument("uniform field length does not match the box edge count");
    BondConfig config(box.edge_count());
    for (EdgeId e = 0; e < box.edge_count(); ++e) {
        const double t = e < box.radial_count() ? params.p : params.q;
        if (uniforms[e] < t) config.set(e, true);
    }
    return config;
}

namespace {

// Fills bits [begin, end) of `words` with U_e < threshold.
void fill_range(std::span<std::uint64_t> words, std::uint64_t key, EdgeId begin, EdgeId end, double threshold) {
    if (threshold <= 0.0) {
        for (EdgeId e = begin; e < end; ++e) words[e >> 6] &= ~(std::uint64_t{1} << (e & 63));
        return;
    }
    for (EdgeId e = begin; e < end; ++e) {
        const std::uint64_t bit = std::uint64_t{rng::uniform_at(key, e) < threshold};
        const std::uint64_t mask = std::uint64_t{1} << (e & 63);
        words[e >> 6] = (words[e >> 6] & ~mask) | (bit << (e & 63));
    }
}

}  // namespace

void sample_into(BondConfig& config, const LatticeBox& box, const ParamPoint& params, const SeedSpec& seed) {
    if (config.size() != box.edge_count()) config = BondConfig(box.edge_count());
    const std::uint64_t key = rng::stream_key(seed);
    auto words = config.words();
    fill_range(words, key, 0, box.radial_count(), params.p);
    fill_range(words, key, box.radial_count(), box.edge_count(), params.q);
}

BondConfig sample_config(const LatticeBox& box, const ParamPoint& params, const SeedSpec& seed) {
    BondConfig config(box.edge_count());
    sample_into(config, box, params, seed);
    return config;
}

void write_config(std::ostream& out, const LatticeBox& box, const BondConfig& config) {
    if (config.size() != box.edge_count())
        throw InvalidArgument("configuration length does not match the box edge count");
    out << "slabperc-config v1 k=" << box.k() << " shape=" << box.shape_string()
        << " edges=" << box.edge_count() << '\n';
    static constexpr char kHex[] = "0123456789abcdef";
    const std::size_t digits = (config.size() + 3) / 4;
    std::string line(digits, '0');
    for (std::size_t d = 0; d < digits; ++d) {
        unsigned nibble = 0;
        for (std::size_t j = 0; j < 4; ++j) {
            const std::size_t e = 4 * d + j;
            if (e < config.size() && config.test(static_cast<EdgeId>(e))) nibble |= 8u >> j;
        }
        line[d] = kHex[nibble];
    }
    out << line << '\n';
}

std::string config_to_string(const LatticeBox& box, const BondConfig& config) {
    std::ostringstream os;
    write_config(os, box, config);
    return os.str();
}

namespace {

std::string header_field(const std::string& token, const std::string& key) {
    if (token.rfind(key + "=", 0) != 0) throw InvalidArgument("config header: expected field '" + key + "'");
    return token.substr(key.size() + 1);
}

}  // namespace

LoadedConfig read_config(std::istream& in) {
    std::string magic, version, kf, shapef, edgesf;
    if (!(in >> magic >> version >> kf >> shapef >> edgesf) || magic != "slabperc-config" || version != "v1")
        throw InvalidArgument("config header must start with 'slabperc-config v1'");
    LoadedConfig out;
    std::size_t edges = 0;
    try {
        out.k = std::stoi(header_field(kf, "k"));
        out.shape = parse_shape(header_field(shapef, "shape"));
        edges = std::stoull(header_field(edgesf, "edges"));
    } catch (const std::logic_error&) {
        throw InvalidArgument("config header has a malformed number");
    }
    const LatticeBox box(SlabSpec{out.k}, out.shape);
    if (box.edge_count() != edges)
        throw InvalidArgument("config header edges=" + std::to_string(edges) + " disagrees with shape (" +
                              std::to_string(box.edge_count()) + " edges)");
    std::string hex;
    in >> hex;
    if (hex.size() != (edges + 3) / 4)
        throw InvalidArgument("config body has " + std::to_string(hex.size()) + " hex digits, expected " +
                              std::to_string((edges + 3) / 4));
    out.config = BondConfig(edges);
    for (std::size_t d = 0; d < hex.size(); ++d) {
        const char c = hex[d];
        unsigned nibble = 0;
        if (c >= '0' && c <= '9')
            nibble = static_cast<unsigned>(c - '0');
        else if (c >= 'a' && c <= 'f')
            nibble = static_cast<unsigned>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F')
            nibble = static_cast<unsigned>(c - 'A' + 10);
        else
            throw InvalidArgument(std::string("config body: invalid hex digit '") + c + "'");
        for (std::size_t j = 0; j < 4; ++j) {
            const std::size_t e = 4 * d + j;
            const bool bit = (nibble & (8u >> j)) != 0;
            if (e >= edges) {
                if (bit) throw InvalidArgument("config body: padding bits must be zero");
                continue;
            }
            out.config.set(static_cast<EdgeId>(e), bit);
        }
    }
    return out;
}

}  // namespace slabperc
