#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "liebscher/construction.hpp"
#include "liebscher/errors.hpp"
#include "liebscher/matrix.hpp"

namespace liebscher {

// Analytic and tail dependence summary of a bivariate CL copula.
struct DependenceReport {
    double beta = 0.0;
    double tau = 0.0;
    double rho = 0.0;
    double lambda_lower = 0.0;
    double lambda_upper = 0.0;
    double singular_mass = 0.0;
    std::vector<double> curve_weights;  // min(p_k, q_k) per singular curve

    nlohmann::json to_json() const {
        return {{"beta", beta},
                {"tau", tau},
                {"rho", rho},
                {"lambda_lower", lambda_lower},
                {"lambda_upper", lambda_upper},
                {"singular_mass", singular_mass},
                {"curve_weights", curve_weights}};
    }
};

// Parameters of the bivariate comonotonic-based copula
// C(u,v) = prod_k min(u^{p_k}, v^{q_k}). Stored in canonical form: pairs
// sorted by the slope r_k = p_k/q_k (nondecreasing, infinities last), pairs
// with equal slope merged by summing, and all-zero pairs dropped. This makes
// the slopes strictly increasing, which the piecewise expression assumes.
class CLParams {
  public:
    static CLParams from_pq(std::vector<double> p, std::vector<double> q) {
        if (p.empty() || p.size() != q.size())
            throw InvalidParameter("p and q must have equal nonzero length");
        if (p.size() > kMaxComponents)
            throw InvalidParameter("K exceeds the 64-component cap");
        double sp = 0.0, sq = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (p[k] < 0.0 || q[k] < 0.0)
                throw InvalidParameter("p and q entries must be nonnegative");
            sp += p[k];
            sq += q[k];
        }
        if (std::abs(sp - 1.0) > 1e-12 || std::abs(sq - 1.0) > 1e-12)
            throw InvalidParameter("p and q must each sum to 1 (got " +
                                   std::to_string(sp) + ", " + std::to_string(sq) + ")");
        CLParams out;
        out.assign_canonical(std::move(p), std::move(q));
        return out;
    }

    // Build from a two-column g-exponent matrix (column 0 -> p, column 1 -> q).
    static CLParams from_exponent_matrix(const Matrix& g_exponents) {
        if (g_exponents.cols != 2)
            throw DimensionError("CL analytics require d = 2");
        std::vector<double> p(g_exponents.rows), q(g_exponents.rows);
        for (std::size_t k = 0; k < g_exponents.rows; ++k) {
            p[k] = g_exponents(k, 0);
            q[k] = g_exponents(k, 1);
        }
        return from_pq(std::move(p), std::move(q));
    }

    std::size_t components() const { return p_.size(); }
    const std::vector<double>& p() const { return p_; }
    const std::vector<double>& q() const { return q_; }
    const std::vector<double>& r() const { return r_; }

    // Piecewise closed form: on the region r_k <= ln v / ln u < r_{k+1} the
    // copula equals u^{1 - pbar_k} v^{qbar_k}; curve points v = u^{r_k}
    // belong to region k (half-open bands).
    double cdf(double u, double v) const {
        check_uv(u, v);
        if (u <= 0.0 || v <= 0.0) return 0.0;
        if (u >= 1.0) return v;
        if (v >= 1.0) return u;
        const double t = std::log(v) / std::log(u);
        // region index = number of slopes <= t, in {0,...,K}
        std::size_t k = 0;
        while (k < r_.size() && r_[k] <= t) ++k;
        const double pb = k == 0 ? 0.0 : pbar_[k - 1];
        const double qb = k == 0 ? 0.0 : qbar_[k - 1];
        return std::pow(u, 1.0 - pb) * std::pow(v, qb);
    }

    // Product form, used as the independent evaluation route.
    double cdf_product(double u, double v) const {
        check_uv(u, v);
        double prod = 1.0;
        for (std::size_t k = 0; k < p_.size(); ++k)
            prod *= std::min(std::pow(u, p_[k]), std::pow(v, q_[k]));
        return prod;
    }

    // Singular component S(u,v) = sum_k min(p_k,q_k) min(u, v^{1/r_k})^{max(1,r_k)}.
    double singular_component(double u, double v) const {
        check_uv(u, v);
        double s = 0.0;
        for (std::size_t k = 0; k < p_.size(); ++k) {
            const double w = std::min(p_[k], q_[k]);
            if (w <= 0.0) continue;  // slope 0 or infinity carries no curve mass
            const double rk = r_[k];
            const double arg = std::min(u, std::pow(v, 1.0 / rk));
            s += w * std::pow(arg, std::max(1.0, rk));
        }
        return s;
    }

    double singular_mass() const {
        double s = 0.0;
        for (std::size_t k = 0; k < p_.size(); ++k) s += std::min(p_[k], q_[k]);
        return s;
    }

    DependenceReport dependence_report() const {
        DependenceReport rep;
        const std::size_t K = p_.size();
        rep.curve_weights.resize(K);
        for (std::size_t k = 0; k < K; ++k)
            rep.curve_weights[k] = std::min(p_[k], q_[k]);
        rep.singular_mass = singular_mass();
        rep.lambda_upper = rep.singular_mass;
        rep.beta = std::exp2(rep.singular_mass) - 1.0;
        bool all_equal = true;
        for (std::size_t k = 0; k < K; ++k) all_equal = all_equal && (p_[k] == q_[k]);
        rep.lambda_lower = all_equal ? 1.0 : 0.0;
        rep.tau = kendall_tau();
        rep.rho = spearman_rho();
        return rep;
    }

    // Kendall's tau closed form; the last difference is evaluated by its
    // algebraic limit when r_K is infinite.
    double kendall_tau() const {
        const std::size_t K = p_.size();
        double tau = 1.0;
        for (std::size_t k = 0; k + 1 < K; ++k) {
            const double pb = 1.0 - pbar_[k];
            const double qb = qbar_[k];
            const double denom0 = qb * r_[k] + pb;
            if (std::isinf(r_[k + 1]))
                tau -= pb / denom0;
            else
                tau -= pb * qb * (r_[k + 1] - r_[k]) / (denom0 * (qb * r_[k + 1] + pb));
        }
        return tau;
    }

    // Spearman's rho closed form. The boundary fraction covers the outer
    // regions; the sum integrates the middle bands and carries a factor 12
    // like the leading term (the two outer-region integrals fold into the
    // closed fraction; verified against quadrature).
    double spearman_rho() const {
        const std::size_t K = p_.size();
        const double r1 = r_.front();
        const double rK = r_.back();
        double lead;
        if (std::isinf(rK))
            lead = 6.0 * r1 / (2.0 + r1);
        else
            lead = 12.0 * (1.0 + r1 + r1 * rK) / ((2.0 + r1) * (1.0 + 2.0 * rK));
        double mid = 0.0;
        for (std::size_t k = 0; k + 1 < K; ++k) {
            const double a = 1.0 + qbar_[k];
            const double b = 2.0 - pbar_[k];
            const double denom0 = a * r_[k] + b;
            if (std::isinf(r_[k + 1]))
                mid += 1.0 / (a * denom0);
            else
                mid += (r_[k + 1] - r_[k]) / (denom0 * (a * r_[k + 1] + b));
        }
        return lead - 3.0 + 12.0 * mid;
    }

    // Exponent matrix for the iterative sampler; tolerant of boundary
    // patterns (zero p or q entries), unlike product_to_iterative. Exhausted
    // stick tails yield a = 0, which leaves the coordinate untouched at that
    // step, matching the vanishing g-exponent.
    Matrix to_exponent_matrix() const {
        const std::size_t K = p_.size();
        Matrix a(K, 2);
        a(0, 0) = a(0, 1) = 1.0;
        for (std::size_t j = 0; j < 2; ++j) {
            const std::vector<double>& col = j == 0 ? p_ : q_;
            double tail = 1.0;
            for (std::size_t k = 1; k < K; ++k) {
                const double v = tail > 0.0 ? col[k - 1] / tail : 0.0;
                a(K - k, j) = std::min(std::max(v, 0.0), 1.0);
                tail -= col[k - 1];
            }
        }
        return a;
    }

    nlohmann::json to_json() const { return {{"p", p_}, {"q", q_}}; }

    static CLParams from_json(const nlohmann::json& js) {
        if (!js.contains("p") || !js.contains("q"))
            throw SpecParseError("CL parameters need \"p\" and \"q\" arrays");
        try {
            return from_pq(js.at("p").get<std::vector<double>>(),
                           js.at("q").get<std::vector<double>>());
        } catch (const InvalidParameter& e) {
            throw SpecParseError(e.what());
        }
    }

  private:
    static void check_uv(double u, double v) {
        if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
            throw InvalidParameter("(u,v) outside the unit square");
    }

    void assign_canonical(std::vector<double> p, std::vector<double> q) {
        struct Pair { double p, q, r; };
        std::vector<Pair> pairs;
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (p[k] == 0.0 && q[k] == 0.0) continue;  // inert factor
            const double r = q[k] > 0.0 ? p[k] / q[k]
                                        : std::numeric_limits<double>::infinity();
            pairs.push_back({p[k], q[k], r});
        }
        std::stable_sort(pairs.begin(), pairs.end(),
                         [](const Pair& a, const Pair& b) { return a.r < b.r; });
        std::vector<Pair> merged;
        for (const auto& pr : pairs) {
            if (!merged.empty() && slopes_equal(merged.back().r, pr.r)) {
                merged.back().p += pr.p;
                merged.back().q += pr.q;
                merged.back().r = merged.back().q > 0.0
                                      ? merged.back().p / merged.back().q
                                      : std::numeric_limits<double>::infinity();
            } else {
                merged.push_back(pr);
            }
        }
        p_.clear(); q_.clear(); r_.clear();
        for (const auto& pr : merged) {
            p_.push_back(pr.p);
            q_.push_back(pr.q);
            r_.push_back(pr.r);
        }
        pbar_.resize(p_.size());
        qbar_.resize(q_.size());
        double cp = 0.0, cq = 0.0;
        for (std::size_t k = 0; k < p_.size(); ++k) {
            cp += p_[k];
            cq += q_[k];
            pbar_[k] = cp;
            qbar_[k] = cq;
        }
    }

    static bool slopes_equal(double a, double b) {
        if (std::isinf(a) && std::isinf(b)) return true;
        if (std::isinf(a) || std::isinf(b)) return false;
        return std::abs(a - b) <= 1e-12 * (1.0 + std::max(a, b));
    }

    std::vector<double> p_, q_, r_, pbar_, qbar_;
};

}  // namespace liebscher
