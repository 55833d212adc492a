#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace erw {

// Seeded random stream (xoshiro256++) with named derivation paths.
// Every stochastic component of the toolkit pulls from a stream derived
// from one user-supplied seed, e.g.
//
//   auto root = RngStream::from_seed(seed);
//   auto rng  = root.derive("realization/17").derive("field/soil");
//
// derive() is const: it hashes the path into a fresh, statistically
// independent stream without advancing the parent. Identical (seed, path)
// always yields the identical draw sequence, which is what makes simulated
// datasets byte-reproducible and thread-count independent.
class RngStream {
public:
    RngStream() : RngStream(from_seed(0)) {}

    static RngStream from_seed(std::uint64_t seed);

    [[nodiscard]] RngStream derive(std::string_view path) const;
    [[nodiscard]] RngStream derive_index(std::string_view prefix, std::uint64_t index) const;

    std::uint64_t next_u64();

    // uniform on [0, 1)
    double uniform();
    double uniform(double lo, double hi);
    // integer uniform on [0, n)
    std::uint64_t uniform_index(std::uint64_t n);

    // standard normal (Marsaglia polar, caches the spare deviate)
    double normal();
    double normal(double mean, double sd);

    // symmetric triangular on [lo, hi]
    double triangular(double lo, double hi);

    // exponential parameterized by its MEAN (scale)
    double exponential(double mean);

    // Gamma(shape k, scale theta), Marsaglia–Tsang
    double gamma(double shape, double scale);
    double beta(double a, double b);

private:
    std::array<std::uint64_t, 4> state_{};
    bool has_spare_ = false;
    double spare_ = 0.0;

    explicit RngStream(const std::array<std::uint64_t, 4>& s) : state_(s) {}
};

} // namespace erw
