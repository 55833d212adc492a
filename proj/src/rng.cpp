#include "erw/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace erw {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

// SplitMix64 finalizer; used for seeding and path mixing.
inline std::uint64_t splitmix(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

RngStream RngStream::from_seed(std::uint64_t seed) {
    std::array<std::uint64_t, 4> s{};
    std::uint64_t sm = seed;
    for (auto& w : s) w = splitmix(sm);
    if ((s[0] | s[1] | s[2] | s[3]) == 0) s[0] = 1;
    return RngStream(s);
}

RngStream RngStream::derive(std::string_view path) const {
    std::uint64_t sm = fnv1a(path);
    for (std::uint64_t w : state_) {
        sm ^= w;
        (void)splitmix(sm);
    }
    std::array<std::uint64_t, 4> s{};
    for (auto& w : s) w = splitmix(sm);
    if ((s[0] | s[1] | s[2] | s[3]) == 0) s[0] = 1;
    return RngStream(s);
}

RngStream RngStream::derive_index(std::string_view prefix, std::uint64_t index) const {
    std::string path(prefix);
    path += '/';
    path += std::to_string(index);
    return derive(path);
}

std::uint64_t RngStream::next_u64() {
    // xoshiro256++
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
    // rejection sampling on the top bits, bias-free
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
}

double RngStream::normal(double mean, double sd) {
    return mean + sd * normal();
}

double RngStream::triangular(double lo, double hi) {
    // sum of two uniforms: symmetric triangular with mean (lo+hi)/2
    return lo + 0.5 * (hi - lo) * (uniform() + uniform());
}

double RngStream::exponential(double mean) {
    return -mean * std::log1p(-uniform());
}

double RngStream::gamma(double shape, double scale) {
    if (shape <= 0.0 || scale <= 0.0)
        throw std::invalid_argument("gamma: shape and scale must be positive");
    if (shape < 1.0) {
        // boost: X_k = X_{k+1} * U^{1/k}
        const double u = uniform();
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scale * d * v;
    }
}

double RngStream::beta(double a, double b) {
    const double x = gamma(a, 1.0);
    const double y = gamma(b, 1.0);
    return x / (x + y);
}

} // namespace erw
