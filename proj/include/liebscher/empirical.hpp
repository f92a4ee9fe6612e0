#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "liebscher/errors.hpp"
#include "liebscher/parallel.hpp"
#include "liebscher/rng.hpp"
#include "liebscher/sample.hpp"

namespace liebscher {

namespace detail {

class Fenwick {
  public:
    explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
    void add(std::size_t i) {  // 1-based
        for (; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
    }
    std::size_t prefix(std::size_t i) const {  // count of indices <= i
        std::size_t s = 0;
        for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
        return s;
    }

  private:
    std::vector<std::size_t> tree_;
};

// 1-based compressed ranks of v within the sorted distinct values of pool.
inline std::vector<std::size_t> compress(const std::vector<double>& v,
                                         const std::vector<double>& pool_sorted) {
    std::vector<std::size_t> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = static_cast<std::size_t>(
                     std::lower_bound(pool_sorted.begin(), pool_sorted.end(), v[i]) -
                     pool_sorted.begin()) + 1;
    return out;
}

// counts[i] = #{j : x[j] (<|<=) a[i]  and  y[j] (<|<=) b[i]}, offline sweep.
inline std::vector<std::size_t> dominance_counts(const std::vector<double>& x,
                                                 const std::vector<double>& y,
                                                 const std::vector<double>& a,
                                                 const std::vector<double>& b,
                                                 bool strict) {
    const std::size_t n = x.size(), m = a.size();
    std::vector<double> pool = y;
    pool.insert(pool.end(), b.begin(), b.end());
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    const auto yr = compress(y, pool);
    const auto br = compress(b, pool);

    std::vector<std::size_t> px(n), qx(m);
    std::iota(px.begin(), px.end(), 0);
    std::iota(qx.begin(), qx.end(), 0);
    std::sort(px.begin(), px.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
    std::sort(qx.begin(), qx.end(), [&](std::size_t i, std::size_t j) { return a[i] < a[j]; });

    Fenwick bit(pool.size());
    std::vector<std::size_t> counts(m);
    std::size_t next = 0;
    for (std::size_t qi : qx) {
        if (strict) {
            while (next < n && x[px[next]] < a[qi]) bit.add(yr[px[next++]]);
            const std::size_t r = br[qi];
            counts[qi] = r >= 2 ? bit.prefix(r - 1) : 0;
        } else {
            while (next < n && x[px[next]] <= a[qi]) bit.add(yr[px[next++]]);
            counts[qi] = bit.prefix(br[qi]);
        }
    }
    return counts;
}

}  // namespace detail

// Average ranks in 1..n; ties share the mean of their positions.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

// Coordinatewise ranks scaled by 1/(n+1).
inline Sample pseudo_observations(const Sample& s) {
    Sample out(s.n, s.d);
    for (std::size_t j = 0; j < s.d; ++j) {
        const auto r = average_ranks(s.column(j));
        for (std::size_t i = 0; i < s.n; ++i)
            out.at(i, j) = r[i] / static_cast<double>(s.n + 1);
    }
    return out;
}

namespace detail {

inline void require_bivariate(const Sample& s) {
    if (s.d != 2) throw DimensionError("operation requires d = 2");
}

inline void require_nondegenerate(const Sample& s) {
    for (std::size_t j = 0; j < s.d; ++j) {
        const auto col = s.column(j);
        const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
        if (*mn == *mx) throw DegenerateSample("column " + std::to_string(j + 1) + " is constant");
    }
}

// Strict descents (y_i > y_j, i < j) counted by merge sort.
inline std::uint64_t count_inversions(std::vector<double>& v, std::vector<double>& buf,
                                      std::size_t lo, std::size_t hi) {
    if (hi - lo <= 1) return 0;
    const std::size_t mid = (lo + hi) / 2;
    std::uint64_t inv = count_inversions(v, buf, lo, mid) + count_inversions(v, buf, mid, hi);
    std::size_t a = lo, b = mid, o = lo;
    while (a < mid && b < hi) {
        if (v[b] < v[a]) {
            inv += mid - a;
            buf[o++] = v[b++];
        } else {
            buf[o++] = v[a++];
        }
    }
    while (a < mid) buf[o++] = v[a++];
    while (b < hi) buf[o++] = v[b++];
    std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
    return inv;
}

inline std::uint64_t tied_pairs(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::uint64_t t = 0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j + 1 < v.size() && v[j + 1] == v[i]) ++j;
        const std::uint64_t run = j - i + 1;
        t += run * (run - 1) / 2;
        i = j + 1;
    }
    return t;
}

}  // namespace detail

// Pearson correlation of average ranks.
inline double spearman_rho(const Sample& s) {
    detail::require_bivariate(s);
    if (s.n < 2) throw DegenerateSample("need n >= 2");
    detail::require_nondegenerate(s);
    const auto rx = average_ranks(s.column(0));
    const auto ry = average_ranks(s.column(1));
    const double n = static_cast<double>(s.n);
    double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < s.n; ++i) {
        sx += rx[i];
        sy += ry[i];
        sxy += rx[i] * ry[i];
        sxx += rx[i] * rx[i];
        syy += ry[i] * ry[i];
    }
    const double num = n * sxy - sx * sy;
    const double den = std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
    return num / den;
}

// (concordant - discordant) / (n(n-1)/2); tied pairs count as neither.
// Knight's O(n log n) counting.
inline double kendall_tau(const Sample& s) {
    detail::require_bivariate(s);
    if (s.n < 2) throw DegenerateSample("need n >= 2");
    detail::require_nondegenerate(s);
    const std::size_t n = s.n;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (s.at(a, 0) != s.at(b, 0)) return s.at(a, 0) < s.at(b, 0);
        return s.at(a, 1) < s.at(b, 1);
    });
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = s.at(idx[i], 0);
        y[i] = s.at(idx[i], 1);
    }
    std::uint64_t t_x = 0, t_xy = 0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && x[j + 1] == x[i]) ++j;
            const std::uint64_t run = j - i + 1;
            t_x += run * (run - 1) / 2;
            std::size_t a = i;
            while (a <= j) {
                std::size_t b = a;
                while (b + 1 <= j && y[b + 1] == y[a]) ++b;
                const std::uint64_t r2 = b - a + 1;
                t_xy += r2 * (r2 - 1) / 2;
                a = b + 1;
            }
            i = j + 1;
        }
    }
    const std::uint64_t t_y = detail::tied_pairs(y);
    std::vector<double> buf(n);
    const std::uint64_t disc = detail::count_inversions(y, buf, 0, n);
    const double total = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    const double conc = total - static_cast<double>(disc) - static_cast<double>(t_x) -
                        static_cast<double>(t_y) + static_cast<double>(t_xy);
    return (conc - static_cast<double>(disc)) / total;
}

// Right-continuous step function on [0,1]: value `pre` before the first jump
// point, y[i] on [x[i], x[i+1]).
struct StepFunction {
    std::vector<double> x;
    std::vector<double> y;
    double pre = 0.0;

    double operator()(double t) const {
        const auto it = std::upper_bound(x.begin(), x.end(), t);
        if (it == x.begin()) return pre;
        return y[static_cast<std::size_t>(it - x.begin()) - 1];
    }
};

// Integral over [0,1] of a nonnegative step function.
inline double l1_on_unit(const StepFunction& f) {
    if (f.x.empty()) return f.pre;
    double total = f.pre * f.x.front();
    for (std::size_t i = 0; i + 1 < f.x.size(); ++i)
        total += f.y[i] * (f.x[i + 1] - f.x[i]);
    total += f.y.back() * (1.0 - f.x.back());
    return total;
}

// Integral over [0,1] of |f - g| via a merged breakpoint sweep.
inline double l1_distance_on_unit(const StepFunction& f, const StepFunction& g) {
    std::vector<double> pts;
    pts.reserve(f.x.size() + g.x.size() + 2);
    pts.push_back(0.0);
    pts.insert(pts.end(), f.x.begin(), f.x.end());
    pts.insert(pts.end(), g.x.begin(), g.x.end());
    pts.push_back(1.0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i] >= 1.0) break;
        const double width = std::min(pts[i + 1], 1.0) - pts[i];
        if (width <= 0.0) continue;
        total += std::abs(f(pts[i]) - g(pts[i])) * width;
    }
    return total;
}

// Empirical Kendall distribution function: K(t) = (1/n) #{i : W_i <= t} with
// W_i the fraction of strictly dominated companions of observation i. The
// n = 1 case uses W_1 = 0 (empty sum).
inline StepFunction kendall_distribution(const Sample& s) {
    detail::require_bivariate(s);
    const std::size_t n = s.n;
    std::vector<double> w(n, 0.0);
    if (n > 1) {
        const auto x = s.column(0);
        const auto y = s.column(1);
        const auto counts = detail::dominance_counts(x, y, x, y, /*strict=*/true);
        for (std::size_t i = 0; i < n; ++i)
            w[i] = static_cast<double>(counts[i]) / static_cast<double>(n - 1);
    }
    std::sort(w.begin(), w.end());
    StepFunction f;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && w[j + 1] == w[i]) ++j;
        f.x.push_back(w[i]);
        f.y.push_back(static_cast<double>(j + 1) / static_cast<double>(n));
        i = j + 1;
    }
    return f;
}

// Cramer-von Mises asymmetry statistic
// sum_i (C_n(u_i,v_i) - C_n(v_i,u_i))^2 over the pseudo-observations, with
// C_n the empirical copula C_n(u,v) = (1/n) #{R_i/(n+1) <= u, S_i/(n+1) <= v}.
inline double cvm_asymmetry_statistic(const Sample& s) {
    detail::require_bivariate(s);
    const auto r = average_ranks(s.column(0));
    const auto c = average_ranks(s.column(1));
    const auto straight = detail::dominance_counts(r, c, r, c, /*strict=*/false);
    const auto swapped = detail::dominance_counts(r, c, c, r, /*strict=*/false);
    const double n = static_cast<double>(s.n);
    double stat = 0.0;
    for (std::size_t i = 0; i < s.n; ++i) {
        const double diff = (static_cast<double>(straight[i]) -
                             static_cast<double>(swapped[i])) / n;
        stat += diff * diff;
    }
    return stat;
}

struct CvmResult {
    double statistic = 0.0;
    double pvalue = 1.0;
};

// Bootstrap p-value for the symmetry test: each replicate resamples rows
// with replacement, swaps the coordinates of each resampled row with
// probability 1/2 (enforcing the exchangeable null), re-ranks and recomputes
// the statistic. The add-one convention keeps the p-value off exact zero.
inline CvmResult cvm_asymmetry_pvalue(const Sample& s, int n_boot, Seed seed,
                                      int workers = 1) {
    detail::require_bivariate(s);
    CvmResult out;
    out.statistic = cvm_asymmetry_statistic(s);
    std::vector<char> geq(static_cast<std::size_t>(n_boot), 0);
    parallel_for(static_cast<std::size_t>(n_boot), workers, [&](std::size_t b) {
        Rng rng = seed.stream(b);
        Sample rep(s.n, 2);
        for (std::size_t i = 0; i < s.n; ++i) {
            const std::size_t src = rng.uniform_index(s.n);
            const bool swap = rng.uniform01() < 0.5;
            rep.at(i, 0) = s.at(src, swap ? 1 : 0);
            rep.at(i, 1) = s.at(src, swap ? 0 : 1);
        }
        geq[b] = cvm_asymmetry_statistic(rep) >= out.statistic ? 1 : 0;
    });
    std::size_t count = 0;
    for (char g : geq) count += static_cast<std::size_t>(g);
    out.pvalue = (1.0 + static_cast<double>(count)) / (1.0 + static_cast<double>(n_boot));
    return out;
}

}  // namespace liebscher
