#pragma once

#include <cmath>
#include <span>
#include <string>

#include "liebscher/errors.hpp"
#include "liebscher/rng.hpp"

namespace liebscher {

enum class CopulaKind { Independence, Comonotonic, Clayton, GumbelBarnett };

inline const char* kind_name(CopulaKind k) {
    switch (k) {
        case CopulaKind::Independence: return "independence";
        case CopulaKind::Comonotonic: return "comonotonic";
        case CopulaKind::Clayton: return "clayton";
        case CopulaKind::GumbelBarnett: return "gumbel_barnett";
    }
    return "?";
}

// One symmetric building block of the product construction. Evaluable as a
// cdf on the unit hypercube; some kinds also know how to produce exact draws.
struct BaseCopula {
    CopulaKind kind = CopulaKind::Independence;
    double theta = 0.0;

    static BaseCopula independence() { return {CopulaKind::Independence, 0.0}; }
    static BaseCopula comonotonic() { return {CopulaKind::Comonotonic, 0.0}; }

    static BaseCopula clayton(double theta) {
        if (!(theta > 0.0))
            throw InvalidParameter("clayton: theta must be > 0, got " + std::to_string(theta));
        return {CopulaKind::Clayton, theta};
    }

    // Standard bivariate family is a copula for theta in [0,1]; theta = 0
    // degenerates to independence.
    static BaseCopula gumbel_barnett(double theta) {
        if (!(theta >= 0.0 && theta <= 1.0))
            throw InvalidParameter("gumbel_barnett: theta must be in [0,1], got " +
                                   std::to_string(theta));
        return {CopulaKind::GumbelBarnett, theta};
    }

    double cdf(std::span<const double> u) const {
        for (double x : u)
            if (x <= 0.0) return 0.0;
        switch (kind) {
            case CopulaKind::Independence: {
                double p = 1.0;
                for (double x : u) p *= x;
                return p;
            }
            case CopulaKind::Comonotonic: {
                double m = 1.0;
                for (double x : u) m = std::min(m, x);
                return m;
            }
            case CopulaKind::Clayton: {
                double s = 1.0 - static_cast<double>(u.size());
                for (double x : u) s += std::pow(x, -theta);
                return std::pow(s, -1.0 / theta);
            }
            case CopulaKind::GumbelBarnett: {
                double p = 1.0, l = 1.0;
                for (double x : u) {
                    p *= x;
                    l *= -std::log(x);
                }
                return p * std::exp(-theta * l);
            }
        }
        return 0.0;
    }

    bool has_sampler() const { return kind != CopulaKind::GumbelBarnett; }

    // Draws one vector with this copula's law into out (dimension = out.size()).
    void sample(Rng& rng, std::span<double> out) const {
        switch (kind) {
            case CopulaKind::Independence:
                for (double& x : out) x = rng.uniform01();
                return;
            case CopulaKind::Comonotonic: {
                const double u = rng.uniform01();
                for (double& x : out) x = u;
                return;
            }
            case CopulaKind::Clayton: {
                // Gamma frailty construction: exact and rejection-free in
                // the exponentials (the gamma draw itself rejects internally).
                const double w = rng.gamma(1.0 / theta);
                for (double& x : out)
                    x = std::pow(1.0 + rng.exponential() / w, -1.0 / theta);
                return;
            }
            case CopulaKind::GumbelBarnett:
                throw UnsupportedBase("gumbel_barnett has no sampler");
        }
    }
};

}  // namespace liebscher
