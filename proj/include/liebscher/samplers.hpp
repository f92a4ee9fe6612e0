#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "liebscher/base_copula.hpp"
#include "liebscher/cl_params.hpp"
#include "liebscher/construction.hpp"
#include "liebscher/errors.hpp"
#include "liebscher/liebscher_spec.hpp"
#include "liebscher/matrix.hpp"
#include "liebscher/parallel.hpp"
#include "liebscher/rng.hpp"
#include "liebscher/sample.hpp"

namespace liebscher {

// Boundary-safe inverses of the power transforms f(t) = t^{1-a} and
// (Id/f)(t) = t^a. Arguments are strictly inside (0,1) during sampling, so
// the degenerate exponents resolve to 0.
inline double power_f_inverse(double x, double a) {
    if (a >= 1.0) return x >= 1.0 ? 1.0 : 0.0;
    return std::pow(x, 1.0 / (1.0 - a));
}

inline double power_idf_inverse(double y, double a) {
    if (a <= 0.0) return y >= 1.0 ? 1.0 : 0.0;
    return std::pow(y, 1.0 / a);
}

namespace detail {

// One draw of the general iterative scheme. Step 1 samples the base paired
// with the innermost transform (component K of the product); each later step
// k injects a fresh vector from the base paired with component K-k+1 and
// takes coordinatewise maxima of the two inverse-transformed arguments.
inline void liebscher_row(const LiebscherSpec& spec, Rng& rng, double* out) {
    const std::size_t K = spec.components();
    const std::size_t d = spec.dim();
    const auto& bases = spec.bases();
    std::vector<double> y(d);
    bases[K - 1].sample(rng, std::span<double>(out, d));
    for (std::size_t k = 2; k <= K; ++k) {
        bases[K - k].sample(rng, y);
        if (spec.is_power()) {
            const Matrix& a = spec.iterative_exponents();
            for (std::size_t j = 0; j < d; ++j) {
                const double ak = a(k - 1, j);
                out[j] = std::max(power_f_inverse(out[j], ak),
                                  power_idf_inverse(y[j], ak));
            }
        } else {
            const CustomTransforms& tr = spec.custom_transforms();
            for (std::size_t j = 0; j < d; ++j)
                out[j] = std::max(tr.f_inverse(k, j, out[j]),
                                  tr.id_over_f_inverse(k, j, y[j]));
        }
    }
}

// One draw of the comonotonic-based scheme: a single shared uniform starts
// all coordinates, and each step reuses one shared uniform across
// coordinates (comonotonic component draws).
inline void cl_row(const Matrix& a, Rng& rng, double* out) {
    const std::size_t K = a.rows;
    const std::size_t d = a.cols;
    const double u0 = rng.uniform01();
    for (std::size_t j = 0; j < d; ++j) out[j] = u0;
    for (std::size_t k = 1; k < K; ++k) {
        const double y = rng.uniform01();
        for (std::size_t j = 0; j < d; ++j) {
            const double ak = a(k, j);
            out[j] = std::max(power_f_inverse(out[j], ak),
                              power_idf_inverse(y, ak));
        }
    }
}

}  // namespace detail

// Exact sampling from a general product-construction copula (iterative
// scheme). Row i draws from substream i of the seed, so output is identical
// for any worker count.
inline Sample sample_liebscher(const LiebscherSpec& spec, std::size_t n, Seed seed,
                               int workers = 1) {
    if (n < 1) throw InvalidParameter("need n >= 1");
    for (const auto& b : spec.bases())
        if (!b.has_sampler())
            throw UnsupportedBase(std::string(kind_name(b.kind)) + " has no sampler");
    Sample s(n, spec.dim());
    parallel_for(n, workers, [&](std::size_t i) {
        Rng rng = seed.stream(i);
        detail::liebscher_row(spec, rng, s.data.data() + i * s.d);
    });
    return s;
}

// Specialized sampler for the comonotonic-based copula given the iterative
// exponent matrix. Boundary entries (0 or 1) are accepted and interpreted by
// their limits, which covers the degenerate independence patterns.
inline Sample sample_cl(const Matrix& a, std::size_t n, Seed seed, int workers = 1) {
    validate_exponent_matrix(a, /*strict=*/false);
    if (n < 1) throw InvalidParameter("need n >= 1");
    Sample s(n, a.cols);
    parallel_for(n, workers, [&](std::size_t i) {
        Rng rng = seed.stream(i);
        detail::cl_row(a, rng, s.data.data() + i * s.d);
    });
    return s;
}

inline Sample sample_cl(const CLParams& params, std::size_t n, Seed seed,
                        int workers = 1) {
    return sample_cl(params.to_exponent_matrix(), n, seed, workers);
}

// Misspecified variant of the comonotonic-based model: the exponents are
// redrawn for every observation from Beta distributions with the given means
// and common variance.
struct NoiseSpec {
    Matrix means;   // same shape and constraints as A; rows k >= 2 are noised
    double sigma2 = 0.0;

    NoiseSpec(Matrix m, double s2) : means(std::move(m)), sigma2(s2) {
        validate_exponent_matrix(means, /*strict=*/true);
        if (!(sigma2 > 0.0)) throw InvalidNoise("noise variance must be > 0");
        for (std::size_t k = 1; k < means.rows; ++k)
            for (std::size_t j = 0; j < means.cols; ++j) {
                const double m = means(k, j);
                if (!(sigma2 < m * (1.0 - m)))
                    throw InvalidNoise("sigma_a^2 = " + std::to_string(sigma2) +
                                       " >= m(1-m) at mean " + std::to_string(m));
            }
    }

    // Moment-matched Beta parameters for one mean entry.
    std::pair<double, double> beta_parameters(double m) const {
        const double c = m * (1.0 - m) / sigma2 - 1.0;
        return {m * c, (1.0 - m) * c};
    }
};

inline Sample sample_cl_noisy(const NoiseSpec& noise, std::size_t n, Seed seed,
                              int workers = 1) {
    if (n < 1) throw InvalidParameter("need n >= 1");
    const std::size_t K = noise.means.rows, d = noise.means.cols;
    Sample s(n, d);
    parallel_for(n, workers, [&](std::size_t i) {
        Rng rng = seed.stream(i);
        Matrix a(K, d);
        for (std::size_t j = 0; j < d; ++j) a(0, j) = 1.0;
        for (std::size_t k = 1; k < K; ++k)
            for (std::size_t j = 0; j < d; ++j) {
                const auto [al, be] = noise.beta_parameters(noise.means(k, j));
                a(k, j) = rng.beta(al, be);
            }
        detail::cl_row(a, rng, s.data.data() + i * s.d);
    });
    return s;
}

}  // namespace liebscher
