#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "liebscher/errors.hpp"

namespace liebscher {

// 64-bit finalizer (splitmix64 style); bijective, good avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Small counter-based generator (splitmix64 sequence). One instance per
// logical stream; streams with different states are statistically
// independent for our purposes.
class Rng {
  public:
    explicit Rng(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform on the open interval (0,1); never returns 0 or 1, so logs and
    // reciprocal powers downstream are always finite.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Uniform index in {0,...,n-1} via 128-bit multiply (unbiased enough for
    // bootstrap purposes and fully deterministic).
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    double exponential() { return -std::log(uniform01()); }

    // Marsaglia-Tsang; exact, rejection-based. shape > 0.
    double gamma(double shape) {
        if (!(shape > 0.0)) throw InvalidParameter("gamma shape must be > 0");
        if (shape < 1.0) {
            double g = gamma(shape + 1.0);
            return g * std::pow(uniform01(), 1.0 / shape);
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
            const double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double beta(double a, double b) {
        const double x = gamma(a);
        const double y = gamma(b);
        return x / (x + y);
    }

    // Box-Muller without caching so the draw count stays predictable.
    double normal() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

  private:
    std::uint64_t state_;
};

// Master seed plus pure-function substream derivation. Distinct stream
// indices (or derivation tags) give independent streams, so parallel
// consumers can draw without coordination and still reproduce the
// sequential result exactly.
struct Seed {
    std::uint64_t master = 0;

    Rng stream(std::uint64_t index) const {
        return Rng(mix64(master ^ mix64(index ^ 0x5851F42D4C957F2DULL)));
    }

    Seed derive(std::uint64_t tag) const {
        return Seed{mix64(master + 0xD1B54A32D192ED03ULL * (tag + 1))};
    }
};

// Discrete distribution sampled by cdf inversion over a fixed table.
class DiscreteDist {
  public:
    // weights over values offset, offset+1, ...
    DiscreteDist(std::vector<double> weights, int offset)
        : cdf_(std::move(weights)), offset_(offset) {
        double total = 0.0;
        for (double& w : cdf_) {
            total += w;
            w = total;
        }
        if (!(total > 0.0)) throw InvalidParameter("discrete distribution has zero mass");
        for (double& c : cdf_) c /= total;
        cdf_.back() = 1.0;
    }

    int sample(Rng& rng) const {
        const double u = rng.uniform01();
        std::size_t lo = 0, hi = cdf_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (u <= cdf_[mid]) hi = mid; else lo = mid + 1;
        }
        return offset_ + static_cast<int>(lo);
    }

    double mass(int value) const {
        const std::size_t i = static_cast<std::size_t>(value - offset_);
        return i == 0 ? cdf_[0] : cdf_[i] - cdf_[i - 1];
    }

    int min_value() const { return offset_; }
    int max_value() const { return offset_ + static_cast<int>(cdf_.size()) - 1; }

  private:
    std::vector<double> cdf_;
    int offset_;
};

// K ~ Zipf(xi) + 1 truncated to {2,...,k_max}: mass(k) proportional to (k-1)^(-xi).
inline DiscreteDist zipf_plus_one(double xi, int k_max) {
    if (!(xi > 1.0)) throw InvalidParameter("zipf exponent must be > 1");
    if (k_max < 2) throw InvalidParameter("zipf truncation must allow K >= 2");
    std::vector<double> w(static_cast<std::size_t>(k_max - 1));
    for (int k = 2; k <= k_max; ++k)
        w[static_cast<std::size_t>(k - 2)] = std::pow(static_cast<double>(k - 1), -xi);
    return DiscreteDist(std::move(w), 2);
}

// K ~ 2 + Binomial(size, prob), for informative priors on K.
inline DiscreteDist binomial_plus_two(int size, double prob) {
    if (size < 0 || !(prob >= 0.0 && prob <= 1.0))
        throw InvalidParameter("invalid binomial prior parameters");
    std::vector<double> w(static_cast<std::size_t>(size + 1));
    double logp = std::log(prob > 0 ? prob : 1e-300);
    double logq = std::log(prob < 1 ? 1.0 - prob : 1e-300);
    double lchoose = 0.0;
    for (int m = 0; m <= size; ++m) {
        w[static_cast<std::size_t>(m)] =
            (prob == 0.0) ? (m == 0 ? 1.0 : 0.0)
            : (prob == 1.0) ? (m == size ? 1.0 : 0.0)
            : std::exp(lchoose + m * logp + (size - m) * logq);
        if (m < size) lchoose += std::log(static_cast<double>(size - m)) -
                                 std::log(static_cast<double>(m + 1));
    }
    return DiscreteDist(std::move(w), 2);
}

}  // namespace liebscher
