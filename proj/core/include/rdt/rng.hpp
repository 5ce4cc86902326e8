#pragma once

// Deterministic random streams with hash-based derivation.
//
// Every random draw in the library flows from a single master seed. Streams
// for nodes, episodes and trials are derived by mixing (master, path digest,
// stage), so results do not depend on traversal order or on how work is
// split across threads.

#include <cstdint>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace rdt {

constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ULL;

/// Finalizer from splitmix64; a good 64->64 bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += kSplitMixGamma;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Combine two words into a new digest (order-sensitive).
constexpr std::uint64_t mix_combine(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ (b + kSplitMixGamma + (a << 6) + (a >> 2)));
}

/// Digest of a node path: root is the digest of the origin stage only, a
/// child's digest extends its parent's with the action label.
struct PathDigest {
    std::uint64_t value = 0x243F6A8885A308D3ULL;  // arbitrary non-zero start

    PathDigest child(std::uint64_t action) const {
        return PathDigest{mix_combine(value, action)};
    }
};

/// Counter-based generator (splitmix64 stream). Cheap to construct, so a
/// fresh one is derived per node / per episode instead of splitting state.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Derive an independent stream from (master, digest, tag).
    static Rng derive(std::uint64_t master, std::uint64_t digest, std::uint64_t tag) {
        return Rng(mix64(mix_combine(mix_combine(master, digest), tag)));
    }

    std::uint64_t next_u64() {
        state_ += kSplitMixGamma;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0,1) with 53 random bits. Platform-stable.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Index into a cumulative mass table (first index with cdf > u).
    std::size_t pick_cdf(std::span<const double> cdf) {
        const double u = uniform01() * cdf.back();
        std::size_t lo = 0, hi = cdf.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (cdf[mid] > u) hi = mid; else lo = mid + 1;
        }
        return lo;
    }

    /// Geometric gap (number of failures before first success), success
    /// probability p in (0,1].
    std::uint64_t geometric(double p) {
        if (p >= 1.0) return 0;
        const double u = 1.0 - uniform01();  // in (0,1]
        const double g = std::floor(std::log(u) / std::log1p(-p));
        if (g > 9e18) return std::uint64_t(9e18);
        return static_cast<std::uint64_t>(g);
    }

    /// Exact Binomial(n, p) sample. Uses geometric skips over the rarer
    /// outcome, so the cost is O(n * min(p, 1-p)). Intended for the thin
    /// success rates of grouped branching-process sampling; throws if the
    /// expected work exceeds the cap.
    std::uint64_t binomial(std::uint64_t n, double p, double work_cap = 1e7) {
        if (p <= 0.0 || n == 0) return 0;
        if (p >= 1.0) return n;
        const bool flip = p > 0.5;
        const double q = flip ? 1.0 - p : p;
        if (static_cast<double>(n) * q > work_cap)
            throw std::runtime_error("rng: binomial sample exceeds work cap");
        std::uint64_t hits = 0;
        std::uint64_t pos = geometric(q);
        while (pos < n) {
            ++hits;
            pos += 1 + geometric(q);
        }
        return flip ? n - hits : hits;
    }

  private:
    std::uint64_t state_;
};

}  // namespace rdt
