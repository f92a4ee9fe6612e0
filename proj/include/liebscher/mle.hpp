#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "liebscher/base_copula.hpp"
#include "liebscher/empirical.hpp"
#include "liebscher/errors.hpp"
#include "liebscher/liebscher_spec.hpp"
#include "liebscher/matrix.hpp"
#include "liebscher/nelder_mead.hpp"
#include "liebscher/parallel.hpp"
#include "liebscher/rng.hpp"
#include "liebscher/sample.hpp"

namespace liebscher {

// Parameters of the Clayton-times-independence product copula
// C(u,v) = C1(u^p, v^q) * u^(1-p) v^(1-q) with C1 the Clayton(theta) copula.
struct CIParams {
    double theta = 1.0;
    double p = 0.5;
    double q = 0.5;

    void validate() const {
        if (!(theta > 0.0)) throw InvalidParameter("theta must be > 0");
        if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0))
            throw InvalidParameter("p and q must lie in (0,1)");
    }

    // The equivalent product-construction spec (Clayton component paired
    // with exponents (p,q), independence with the complements).
    LiebscherSpec to_liebscher() const {
        validate();
        Matrix a(2, 2);
        a(0, 0) = a(0, 1) = 1.0;
        a(1, 0) = p;
        a(1, 1) = q;
        return LiebscherSpec(2, {BaseCopula::clayton(theta), BaseCopula::independence()},
                             std::move(a));
    }
};

// Analytic cross-density of the Clayton-times-independence copula, from the
// product rule applied to C1(u^p, v^q) * u^(1-p) v^(1-q):
//   c = pq C1_12 + (1-p)q u^(-p) C1_2 + p(1-q) v^(-q) C1_1
//       + (1-p)(1-q) u^(-p) v^(-q) C1,
// with the Clayton partials evaluated at (s,t) = (u^p, v^q).
inline double ci_density(const CIParams& par, double u, double v) {
    par.validate();
    if (!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0))
        throw DomainError("density defined on the open unit square only");
    const double th = par.theta, p = par.p, q = par.q;
    const double s = std::pow(u, p);
    const double t = std::pow(v, q);
    const double S = std::pow(s, -th) + std::pow(t, -th) - 1.0;
    const double c1 = std::pow(S, -1.0 / th);
    const double d1 = std::pow(s, -th - 1.0) * std::pow(S, -1.0 / th - 1.0);
    const double d2 = std::pow(t, -th - 1.0) * std::pow(S, -1.0 / th - 1.0);
    const double d12 = (1.0 + th) * std::pow(s, -th - 1.0) * std::pow(t, -th - 1.0) *
                       std::pow(S, -1.0 / th - 2.0);
    const double up = std::pow(u, -p);
    const double vq = std::pow(v, -q);
    return p * q * d12 + (1.0 - p) * q * up * d2 + p * (1.0 - q) * vq * d1 +
           (1.0 - p) * (1.0 - q) * up * vq * c1;
}

// Log-likelihood over pseudo-observations (entries strictly inside (0,1)).
inline double ci_loglik(const CIParams& par, const Sample& pseudo) {
    double ll = 0.0;
    for (std::size_t i = 0; i < pseudo.n; ++i)
        ll += std::log(ci_density(par, pseudo.at(i, 0), pseudo.at(i, 1)));
    return ll;
}

struct FitResult {
    CIParams params;
    double loglik = 0.0;
    bool converged = false;
    std::size_t evals = 0;
};

namespace detail {

inline CIParams from_unconstrained(const std::vector<double>& z) {
    CIParams par;
    par.theta = std::exp(z[0]);
    par.p = 1.0 / (1.0 + std::exp(-z[1]));
    par.q = 1.0 / (1.0 + std::exp(-z[2]));
    return par;
}

}  // namespace detail

// Maximum pseudo-likelihood fit: ranks first, then a derivative-free simplex
// search in (log theta, logit p, logit q), multi-started from seeded draws
// theta ~ logU[0.5,20], p,q ~ U(0.05,0.95). Ties between equally good starts
// resolve to the lowest start index.
inline FitResult fit_mle(const Sample& data, int starts = 8, Seed seed = Seed{0},
                         int workers = 1) {
    if (data.d != 2) throw DimensionError("fit requires d = 2");
    if (data.n < 10) throw InvalidParameter("need at least 10 observations");
    const Sample pseudo = pseudo_observations(data);
    const auto objective = [&](const std::vector<double>& z) -> double {
        if (std::abs(z[0]) > 30.0 || std::abs(z[1]) > 30.0 || std::abs(z[2]) > 30.0)
            return 1e300;
        const double ll = ci_loglik(detail::from_unconstrained(z), pseudo);
        return std::isfinite(ll) ? -ll : 1e300;
    };

    std::vector<NelderMeadResult> fits(static_cast<std::size_t>(starts));
    parallel_for(static_cast<std::size_t>(starts), workers, [&](std::size_t s) {
        Rng rng = seed.stream(s);
        const double th0 = std::exp(std::log(0.5) +
                                    rng.uniform01() * (std::log(20.0) - std::log(0.5)));
        const double p0 = 0.05 + 0.9 * rng.uniform01();
        const double q0 = 0.05 + 0.9 * rng.uniform01();
        std::vector<double> z0{std::log(th0), std::log(p0 / (1.0 - p0)),
                               std::log(q0 / (1.0 - q0))};
        fits[s] = nelder_mead(objective, z0, 0.5, 1e-8, 10000);
    });

    std::size_t best = 0;
    bool any_converged = false;
    for (std::size_t s = 0; s < fits.size(); ++s) {
        any_converged = any_converged || fits[s].converged;
        if (fits[s].fmin < fits[best].fmin) best = s;
    }
    if (!any_converged)
        throw NonConvergence("no simplex start reached the tolerance");
    FitResult out;
    out.params = detail::from_unconstrained(fits[best].x);
    out.loglik = -fits[best].fmin;
    out.converged = fits[best].converged;
    out.evals = fits[best].evals;
    return out;
}

}  // namespace liebscher
