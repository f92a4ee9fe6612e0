#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "liebscher/errors.hpp"
#include "liebscher/matrix.hpp"

namespace liebscher {

// Hard cap on the number of product components.
inline constexpr std::size_t kMaxComponents = 64;

// Validates an iterative exponent matrix A (K rows, d columns): first row is
// identically 1, later rows lie in (0,1). With strict = false the closed
// interval [0,1] is accepted, which the samplers interpret by limits; the
// constructions proper reject the boundary.
inline void validate_exponent_matrix(const Matrix& a, bool strict = true) {
    if (a.rows < 1) throw InvalidParameter("exponent matrix needs K >= 1 rows");
    if (a.rows > kMaxComponents)
        throw InvalidParameter("exponent matrix exceeds the K <= 64 component cap");
    if (a.cols < 1) throw InvalidParameter("exponent matrix needs d >= 1 columns");
    for (std::size_t j = 0; j < a.cols; ++j) {
        if (a(0, j) != 1.0)
            throw InvalidParameter("A[1][" + std::to_string(j + 1) + "] must equal 1");
    }
    for (std::size_t k = 1; k < a.rows; ++k) {
        for (std::size_t j = 0; j < a.cols; ++j) {
            const double v = a(k, j);
            const bool ok = strict ? (v > 0.0 && v < 1.0) : (v >= 0.0 && v <= 1.0);
            if (!ok)
                throw InvalidParameter("A[" + std::to_string(k + 1) + "][" +
                                       std::to_string(j + 1) + "] = " + std::to_string(v) +
                                       " outside " + (strict ? "(0,1)" : "[0,1]"));
        }
    }
}

// Power-function conversion a -> p: row k of the result is the exponent
// vector of g^(k,K), i.e. p^(1,K) = a^(K) and
// p^(k,K) = a^(K-k+1) * prod_{i=K-k+2}^{K} (1 - a^(i)). Columns sum to 1 by
// the telescoping of the stick-breaking weights.
inline Matrix stick_breaking_exponents(const Matrix& a, bool strict = true) {
    validate_exponent_matrix(a, strict);
    const std::size_t K = a.rows, d = a.cols;
    Matrix p(K, d);
    for (std::size_t j = 0; j < d; ++j) {
        double tail = 1.0;
        for (std::size_t k = 0; k < K; ++k) {
            const std::size_t ar = K - 1 - k;
            p(k, j) = a(ar, j) * tail;
            tail *= 1.0 - a(ar, j);
        }
    }
    return p;
}

// Inverse conversion p -> a. Requires every column of p to be a probability
// vector; throws DegenerateExponent when a stick tail vanishes before the
// last component (the spec is representable with a smaller K).
inline Matrix product_to_iterative(const Matrix& p) {
    const std::size_t K = p.rows, d = p.cols;
    if (K < 1 || K > kMaxComponents || d < 1)
        throw InvalidParameter("exponent matrix has invalid shape");
    for (std::size_t j = 0; j < d; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            if (p(k, j) < 0.0 || p(k, j) > 1.0)
                throw InvalidParameter("g-exponents must lie in [0,1]");
            s += p(k, j);
        }
        if (std::abs(s - 1.0) > 1e-9)
            throw InvalidParameter("g-exponent column " + std::to_string(j + 1) +
                                   " sums to " + std::to_string(s) + ", expected 1");
    }
    Matrix a(K, d);
    for (std::size_t j = 0; j < d; ++j) a(0, j) = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
        double tail = 1.0;
        for (std::size_t k = 1; k < K; ++k) {  // atilde^(k) for k = 1..K-1
            const double v = p(k - 1, j) / tail;
            a(K - k, j) = std::min(std::max(v, 0.0), 1.0);
            tail -= p(k - 1, j);
            if (tail <= 0.0)
                throw DegenerateExponent(
                    "stick tail vanished after component " + std::to_string(k) +
                    " in column " + std::to_string(j + 1) +
                    "; spec is representable with smaller K");
        }
    }
    return a;
}

// Product of K Gumbel-Barnett copulas with shared per-component power
// exponents p^(k) collapses to a single Gumbel-Barnett copula; this returns
// its parameter sum_k theta_k * (p^(k))^d.
inline double gumbel_barnett_fused_theta(const std::vector<double>& thetas,
                                         const std::vector<double>& p, std::size_t d) {
    if (thetas.size() != p.size() || thetas.empty())
        throw InvalidParameter("thetas and exponents must have equal nonzero length");
    double s = 0.0;
    for (double v : p) s += v;
    if (std::abs(s - 1.0) > 1e-9)
        throw ConstraintViolation("shared exponents must sum to 1");
    double fused = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k)
        fused += thetas[k] * std::pow(p[k], static_cast<double>(d));
    return fused;
}

}  // namespace liebscher
