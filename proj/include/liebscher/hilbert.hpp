#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "liebscher/errors.hpp"
#include "liebscher/sample.hpp"

namespace liebscher {

// Bits per dimension so the full key fits one 64-bit integer for any d.
inline int hilbert_bits(std::size_t d) { return static_cast<int>(62 / d); }

namespace hilbert {

// Skilling's transformation between axis coordinates and the transpose form
// of the Hilbert index (b bits per axis, n axes), operating in place.
inline void axes_to_transpose(std::uint64_t* x, int b, int n) {
    std::uint64_t m = 1ULL << (b - 1), p, q, t;
    for (q = m; q > 1; q >>= 1) {
        p = q - 1;
        for (int i = 0; i < n; ++i) {
            if (x[i] & q) {
                x[0] ^= p;
            } else {
                t = (x[0] ^ x[i]) & p;
                x[0] ^= t;
                x[i] ^= t;
            }
        }
    }
    for (int i = 1; i < n; ++i) x[i] ^= x[i - 1];
    t = 0;
    for (q = m; q > 1; q >>= 1)
        if (x[n - 1] & q) t ^= q - 1;
    for (int i = 0; i < n; ++i) x[i] ^= t;
}

inline void transpose_to_axes(std::uint64_t* x, int b, int n) {
    std::uint64_t m = 2ULL << (b - 1), p, q, t;
    t = x[n - 1] >> 1;
    for (int i = n - 1; i > 0; --i) x[i] ^= x[i - 1];
    x[0] ^= t;
    for (q = 2; q != m; q <<= 1) {
        p = q - 1;
        for (int i = n - 1; i >= 0; --i) {
            if (x[i] & q) {
                x[0] ^= p;
            } else {
                t = (x[0] ^ x[i]) & p;
                x[0] ^= t;
                x[i] ^= t;
            }
        }
    }
}

// Packs the transpose form into a single key: most significant bit plane
// first, axes in order within each plane.
inline std::uint64_t transpose_to_key(const std::uint64_t* x, int b, int n) {
    std::uint64_t key = 0;
    for (int bit = b - 1; bit >= 0; --bit)
        for (int i = 0; i < n; ++i)
            key = (key << 1) | ((x[i] >> bit) & 1ULL);
    return key;
}

inline void key_to_transpose(std::uint64_t key, std::uint64_t* x, int b, int n) {
    for (int i = 0; i < n; ++i) x[i] = 0;
    int shift = b * n;
    for (int bit = b - 1; bit >= 0; --bit)
        for (int i = 0; i < n; ++i) {
            --shift;
            x[i] |= ((key >> shift) & 1ULL) << bit;
        }
}

}  // namespace hilbert

// Hilbert index of a lattice cell. In one dimension the curve is the line
// itself, so the key is the cell index.
inline std::uint64_t hilbert_key_lattice(std::vector<std::uint64_t> cells, int b) {
    const int n = static_cast<int>(cells.size());
    if (n == 1) return cells[0];
    hilbert::axes_to_transpose(cells.data(), b, n);
    return hilbert::transpose_to_key(cells.data(), b, n);
}

inline std::vector<std::uint64_t> hilbert_decode_lattice(std::uint64_t key, int b, int n) {
    std::vector<std::uint64_t> cells(static_cast<std::size_t>(n));
    if (n == 1) {
        cells[0] = key;
        return cells;
    }
    hilbert::key_to_transpose(key, cells.data(), b, n);
    hilbert::transpose_to_axes(cells.data(), b, n);
    return cells;
}

// Hilbert key of a point of the unit hypercube at resolution floor(62/d)
// bits per dimension.
inline std::uint64_t hilbert_key(std::span<const double> point) {
    const int b = hilbert_bits(point.size());
    const std::uint64_t cmax = (1ULL << b) - 1;
    std::vector<std::uint64_t> cells(point.size());
    for (std::size_t j = 0; j < point.size(); ++j) {
        const double x = point[j];
        if (!(x >= 0.0 && x <= 1.0))
            throw InvalidParameter("hilbert key: coordinate outside [0,1]");
        const double scaled = x * std::ldexp(1.0, b);
        cells[j] = scaled >= static_cast<double>(cmax)
                       ? cmax
                       : static_cast<std::uint64_t>(scaled);
    }
    return hilbert_key_lattice(std::move(cells), b);
}

// Row order of a sample along the Hilbert curve; ties inside one lattice
// cell break lexicographically on the raw coordinates for determinism.
inline std::vector<std::size_t> hilbert_order(const Sample& s) {
    std::vector<std::uint64_t> keys(s.n);
    for (std::size_t i = 0; i < s.n; ++i) keys[i] = hilbert_key(s.row(i));
    std::vector<std::size_t> order(s.n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (keys[a] != keys[b]) return keys[a] < keys[b];
        return std::lexicographical_compare(s.row(a).begin(), s.row(a).end(),
                                            s.row(b).begin(), s.row(b).end());
    });
    return order;
}

// Rows of a sample copied out in Hilbert order; cached form for repeated
// distance evaluations against the same data.
inline std::vector<double> hilbert_sorted_rows(const Sample& s) {
    const auto order = hilbert_order(s);
    std::vector<double> out(s.n * s.d);
    for (std::size_t i = 0; i < s.n; ++i)
        for (std::size_t j = 0; j < s.d; ++j) out[i * s.d + j] = s.at(order[i], j);
    return out;
}

inline double hilbert_distance_presorted(const std::vector<double>& sorted_y,
                                         const Sample& z) {
    if (sorted_y.size() != z.n * z.d)
        throw ShapeMismatch("samples must share n and d");
    const auto zo = hilbert_order(z);
    double total = 0.0;
    for (std::size_t i = 0; i < z.n; ++i) {
        double sq = 0.0;
        for (std::size_t j = 0; j < z.d; ++j) {
            const double diff = sorted_y[i * z.d + j] - z.at(zo[i], j);
            sq += diff * diff;
        }
        total += std::sqrt(sq);
    }
    return total / static_cast<double>(z.n);
}

// Order-1 Hilbert distance: both samples are sorted along the curve and
// matched rank for rank; the value is the mean Euclidean distance of the
// matched pairs.
inline double hilbert_distance(const Sample& y, const Sample& z) {
    if (y.n != z.n || y.d != z.d)
        throw ShapeMismatch("samples must share n and d");
    return hilbert_distance_presorted(hilbert_sorted_rows(y), z);
}

}  // namespace liebscher
