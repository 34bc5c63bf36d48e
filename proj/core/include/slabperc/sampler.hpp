#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "slabperc/lattice.hpp"

namespace slabperc {

/// Open probabilities: p for radial bonds, q for axial bonds.
struct ParamPoint {
    double p = 0.0;
    double q = 0.0;

    friend bool operator==(const ParamPoint&, const ParamPoint&) = default;
};

/// Throws InvalidArgument unless both parameters lie in [0,1].
void validate(const ParamPoint& params);

struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
};

namespace rng {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Key of one replica stream.
constexpr std::uint64_t stream_key(const SeedSpec& seed) {
    return mix64(mix64(seed.master_seed + kGolden) ^ (seed.stream_id * 0xD1B54A32D192ED03ull + kGolden));
}

/// Element `counter` of the SplitMix64 sequence started at `key`.
constexpr std::uint64_t bits_at(std::uint64_t key, std::uint64_t counter) {
    return mix64(key + (counter + 1) * kGolden);
}

/// Uniform in [0,1) on the 2^-53 grid.
constexpr double uniform_at(std::uint64_t key, std::uint64_t counter) {
    return static_cast<double>(bits_at(key, counter) >> 11) * 0x1.0p-53;
}

/// Deterministic child seed, e.g. one per (curve point, probe).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return mix64(mix64(master ^ mix64(a + kGolden)) + mix64(b + 2 * kGolden));
}

}  // namespace rng

/// One uniform per edge index; the same field serves every (p,q).
class UniformField {
public:
    UniformField() = default;
    explicit UniformField(std::vector<double> values) : values_(std::move(values)) {}

    std::size_t size() const { return values_.size(); }
    double operator[](EdgeId e) const { return values_[e]; }
    std::span<const double> values() const { return values_; }

private:
    std::vector<double> values_;
};

/// Bit per edge: 1 = open.
class BondConfig {
public:
    BondConfig() = default;
    explicit BondConfig(std::size_t edges) : size_(edges), words_((edges + 63) / 64, 0) {}

    std::size_t size() const { return size_; }
    bool test(EdgeId e) const { return (words_[e >> 6] >> (e & 63)) & 1u; }
    void set(EdgeId e, bool open) {
        const std::uint64_t mask = std::uint64_t{1} << (e & 63);
        if (open)
            words_[e >> 6] |= mask;
        else
            words_[e >> 6] &= ~mask;
    }
    void fill(bool open);
    std::size_t open_count() const;

    std::span<const std::uint64_t> words() const { return words_; }
    std::span<std::uint64_t> words() { return words_; }

    /// Edge ids of open edges, increasing.
    template <class Fn>
    void for_each_open(Fn&& fn) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits) {
                const int b = __builtin_ctzll(bits);
                fn(static_cast<EdgeId>(w * 64 + static_cast<std::size_t>(b)));
                bits &= bits - 1;
            }
        }
    }

    friend bool operator==(const BondConfig&, const BondConfig&) = default;

private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

UniformField draw_uniforms(const LatticeBox& box, const SeedSpec& seed);

/// Edge e open iff U_e < p (radial) or U_e < q (axial).
BondConfig threshold_config(const UniformField& uniforms, const LatticeBox& box, const ParamPoint& params);

/// threshold_config(draw_uniforms(box, seed), box, params) without
/// materializing the uniform field.
BondConfig sample_config(const LatticeBox& box, const ParamPoint& params, const SeedSpec& seed);

/// In-place variant for hot loops; `config` is resized as needed.
void sample_into(BondConfig& config, const LatticeBox& box, const ParamPoint& params, const SeedSpec& seed);

/// Text format:
///   slabperc-config v1 k=<k> shape=<shape> edges=<N>
///   <hex digits>
/// Each hex digit holds four consecutive edges, lowest edge index in the most
/// significant bit; the final digit is zero-padded.
void write_config(std::ostream& out, const LatticeBox& box, const BondConfig& config);
std::string config_to_string(const LatticeBox& box, const BondConfig& config);

struct LoadedConfig {
    int k = 0;
    BoxShape shape;
    BondConfig config;
};

/// Throws InvalidArgument on a malformed header or a digit count mismatch.
LoadedConfig read_config(std::istream& in);

}  // namespace slabperc
