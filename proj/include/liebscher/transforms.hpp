#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "liebscher/errors.hpp"

namespace liebscher {

// Absolute tolerance for bisection inverses of user-supplied transforms.
inline constexpr double kBisectTol = 1e-12;

// User-supplied transforms f_j^(k) from the class F: increasing on [0,1],
// f(0) = 0, f(1) = 1, with Id/f increasing as well. The first component
// (k = 1) is implicitly the constant function 1 and is not stored.
//
// Inverses have no closed form here, so both f^(-1) and (Id/f)^(-1) are
// obtained by bisection to absolute tolerance 1e-12.
class CustomTransforms {
  public:
    using Fn = std::function<double(double)>;

    // fns has K-1 rows (components k = 2..K), each with d entries.
    CustomTransforms(std::size_t K, std::size_t d, std::vector<Fn> fns)
        : K_(K), d_(d), fns_(std::move(fns)) {
        if (K_ < 1 || d_ < 1) throw InvalidParameter("transforms need K >= 1, d >= 1");
        if (fns_.size() != (K_ - 1) * d_)
            throw InvalidParameter("expected (K-1)*d transform functions");
        for (std::size_t k = 2; k <= K_; ++k)
            for (std::size_t j = 0; j < d_; ++j) check_membership(k, j);
    }

    std::size_t components() const { return K_; }
    std::size_t dim() const { return d_; }

    double f(std::size_t k, std::size_t j, double t) const {
        if (k == 1) return 1.0;
        return fn(k, j)(t);
    }

    // Id/f with the conventional value 0 at the origin.
    double id_over_f(std::size_t k, std::size_t j, double t) const {
        if (k == 1) return t;
        if (t <= 0.0) return 0.0;
        return t / fn(k, j)(t);
    }

    double f_inverse(std::size_t k, std::size_t j, double x) const {
        if (k == 1)
            throw InvalidParameter("f^(1) is constant and has no inverse");
        return bisect([&](double t) { return fn(k, j)(t); }, x, "f");
    }

    double id_over_f_inverse(std::size_t k, std::size_t j, double y) const {
        if (k == 1) return y;
        return bisect([&](double t) { return id_over_f(k, j, t); }, y, "Id/f");
    }

    // g^(k,K)(t) for all k at once: the ratio of nested compositions from
    // the iterative-to-product rewrite. Grounded endpoints are special-cased
    // since the ratio is 0/0 there.
    std::vector<double> g_all(std::size_t j, double t) const {
        std::vector<double> g(K_);
        if (t <= 0.0) { for (auto& v : g) v = 0.0; return g; }
        if (t >= 1.0) { for (auto& v : g) v = 1.0; return g; }
        // chain[i] = f^(i) o ... o f^(K) (t) for i = 1..K+1 (chain[K+1] = t)
        std::vector<double> chain(K_ + 2);
        chain[K_ + 1] = t;
        for (std::size_t i = K_; i >= 1; --i) {
            chain[i] = (i == 1) ? 1.0 : fn(i, j)(chain[i + 1]);
            if (i == 1) break;
        }
        for (std::size_t k = 1; k <= K_; ++k)
            g[k - 1] = chain[K_ - k + 2] / chain[K_ - k + 1];
        return g;
    }

  private:
    const Fn& fn(std::size_t k, std::size_t j) const { return fns_[(k - 2) * d_ + j]; }

    void check_membership(std::size_t k, std::size_t j) const {
        const auto& F = fn(k, j);
        const auto where = [&] {
            return " (component " + std::to_string(k) + ", dim " + std::to_string(j + 1) + ")";
        };
        if (std::abs(F(0.0)) > 1e-12 || std::abs(F(1.0) - 1.0) > 1e-12)
            throw InvalidParameter("transform must satisfy f(0)=0, f(1)=1" + where());
        double prev_f = 0.0, prev_idf = 0.0;
        for (int i = 1; i <= 101; ++i) {
            const double t = static_cast<double>(i) / 101.0;
            const double ft = F(t);
            const double it = t / ft;
            if (!(ft > prev_f))
                throw InvalidParameter("transform must be strictly increasing" + where());
            if (!(it > prev_idf))
                throw InvalidParameter("Id/f must be strictly increasing" + where());
            prev_f = ft;
            prev_idf = it;
        }
    }

    template <class G>
    double bisect(G&& g, double target, const char* what) const {
        if (target <= 0.0) return 0.0;
        if (target >= 1.0) return 1.0;
        double lo = 0.0, hi = 1.0;
        if (g(lo) > target || g(hi) < target)
            throw InvalidParameter(std::string("bisection target outside range of ") + what);
        while (hi - lo > kBisectTol) {
            const double mid = 0.5 * (lo + hi);
            if (g(mid) < target) lo = mid; else hi = mid;
        }
        return 0.5 * (lo + hi);
    }

    std::size_t K_, d_;
    std::vector<Fn> fns_;
};

}  // namespace liebscher
