#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "liebscher/base_copula.hpp"
#include "liebscher/cl_params.hpp"
#include "liebscher/empirical.hpp"
#include "liebscher/errors.hpp"
#include "liebscher/hilbert.hpp"
#include "liebscher/liebscher_spec.hpp"
#include "liebscher/parallel.hpp"
#include "liebscher/rng.hpp"
#include "liebscher/samplers.hpp"

namespace liebscher {

enum class AbcModel { CL, Liebscher };

// Prior on the number of components.
struct KPriorSpec {
    enum class Kind { Zipf, Binomial, Fixed };
    Kind kind = Kind::Zipf;
    double xi = 2.0;   // Zipf exponent
    int k_max = 50;    // Zipf truncation
    int binom_size = 8;
    double binom_prob = 0.3;
    int fixed_k = 2;

    DiscreteDist distribution() const {
        switch (kind) {
            case Kind::Zipf: return zipf_plus_one(xi, k_max);
            case Kind::Binomial: return binomial_plus_two(binom_size, binom_prob);
            case Kind::Fixed: return DiscreteDist({1.0}, fixed_k);
        }
        throw InvalidParameter("bad K prior");
    }
};

// Base copula slot for the general model: fixed parameter or a log-uniform
// prior on theta.
struct BaseSpec {
    CopulaKind kind = CopulaKind::Comonotonic;
    bool theta_random = false;
    double theta = 0.0;
    double theta_lo = 0.0, theta_hi = 0.0;

    bool needs_theta() const {
        return kind == CopulaKind::Clayton || kind == CopulaKind::GumbelBarnett;
    }

    BaseCopula realize(double drawn_theta) const {
        switch (kind) {
            case CopulaKind::Independence: return BaseCopula::independence();
            case CopulaKind::Comonotonic: return BaseCopula::comonotonic();
            case CopulaKind::Clayton: return BaseCopula::clayton(drawn_theta);
            case CopulaKind::GumbelBarnett: return BaseCopula::gumbel_barnett(drawn_theta);
        }
        throw InvalidParameter("bad base kind");
    }
};

struct PriorSpec {
    KPriorSpec k_prior;
    // For the general (fixed-base) model; ignored by the CL model, whose
    // components are all comonotonic. When present, K is the list length.
    std::vector<BaseSpec> bases;
};

struct AbcConfig {
    std::size_t m_prime = 2000;  // total iterations
    std::size_t m = 100;         // retained count
    std::size_t n = 0;           // synthetic sample size (0 = observed n)
    Seed seed;
    int workers = 1;
};

struct AbcDraw {
    int k = 0;
    Matrix a;                      // iterative exponents, K x d
    std::vector<double> thetas;    // per-base draws (general model)
    double distance = 0.0;
    std::uint64_t iteration = 0;
};

namespace detail {

inline constexpr std::uint64_t kPriorTag = 0x11;
inline constexpr std::uint64_t kDataTag = 0x22;

inline AbcDraw draw_prior(const PriorSpec& prior, AbcModel model,
                          const DiscreteDist& kdist, std::size_t d, Rng& rng,
                          std::uint64_t iteration) {
    AbcDraw draw;
    draw.iteration = iteration;
    if (model == AbcModel::Liebscher) {
        if (prior.bases.empty())
            throw PriorUnsupported("general model needs a base copula list");
        draw.k = static_cast<int>(prior.bases.size());
    } else {
        draw.k = kdist.sample(rng);
    }
    draw.a = Matrix(static_cast<std::size_t>(draw.k), d);
    for (std::size_t j = 0; j < d; ++j) draw.a(0, j) = 1.0;
    for (std::size_t k = 1; k < draw.a.rows; ++k)
        for (std::size_t j = 0; j < d; ++j) draw.a(k, j) = rng.uniform01();
    if (model == AbcModel::Liebscher) {
        draw.thetas.resize(prior.bases.size(), 0.0);
        for (std::size_t b = 0; b < prior.bases.size(); ++b) {
            const BaseSpec& bs = prior.bases[b];
            if (!bs.needs_theta()) continue;
            if (bs.theta_random) {
                if (!(bs.theta_lo > 0.0 && bs.theta_hi > bs.theta_lo))
                    throw PriorUnsupported("base " + std::to_string(b + 1) +
                                           " needs a valid theta prior range");
                const double u = rng.uniform01();
                draw.thetas[b] = std::exp(std::log(bs.theta_lo) +
                                          u * (std::log(bs.theta_hi) - std::log(bs.theta_lo)));
            } else if (bs.theta != 0.0 || bs.kind == CopulaKind::GumbelBarnett) {
                draw.thetas[b] = bs.theta;
            } else {
                throw PriorUnsupported("base " + std::to_string(b + 1) +
                                       " needs a fixed theta or a theta prior");
            }
        }
    }
    return draw;
}

inline Sample forward_sample(const AbcDraw& draw, AbcModel model,
                             const std::vector<BaseSpec>& bases, std::size_t n,
                             std::size_t d, Seed data_seed) {
    if (model == AbcModel::CL) return sample_cl(draw.a, n, data_seed);
    std::vector<BaseCopula> realized;
    realized.reserve(bases.size());
    for (std::size_t b = 0; b < bases.size(); ++b)
        realized.push_back(bases[b].realize(draw.thetas[b]));
    LiebscherSpec spec(d, std::move(realized), draw.a);
    return sample_liebscher(spec, n, data_seed);
}

}  // namespace detail

// Output of the rejection sampler: the M draws with the smallest Hilbert
// distances, sorted by (distance, iteration index). Synthetic samples are
// not stored; they are regenerated on demand from the per-iteration seeds.
class AbcResult {
  public:
    std::vector<AbcDraw> retained;
    double threshold = 0.0;

    AbcModel model = AbcModel::CL;
    std::vector<BaseSpec> bases;
    std::size_t n = 0;
    std::size_t d = 0;
    Seed seed;

    Sample regenerate(const AbcDraw& draw) const {
        const Seed data_seed = seed.derive(detail::kDataTag).derive(draw.iteration);
        return detail::forward_sample(draw, model, bases, n, d, data_seed);
    }
};

// Algorithm: repeat M' times (draw parameters from the prior, forward-sample
// a synthetic data set, measure its Hilbert distance to the observed data),
// then keep the M draws with the smallest distances. Iterations use derived
// substreams, so the result is identical for any worker count.
inline AbcResult run_abc(const Sample& obs, const PriorSpec& prior, const AbcConfig& cfg,
                         AbcModel model) {
    if (obs.n < 2) throw InvalidParameter("need at least two observed rows");
    if (cfg.m < 1 || cfg.m > cfg.m_prime)
        throw InvalidParameter("need 1 <= M <= M'");
    const std::size_t n = cfg.n == 0 ? obs.n : cfg.n;
    if (n != obs.n)
        throw InvalidParameter("synthetic sample size must match observed n");
    const DiscreteDist kdist = prior.k_prior.distribution();
    const auto obs_sorted = hilbert_sorted_rows(obs);

    std::vector<AbcDraw> draws(cfg.m_prime);
    const Seed prior_seed = cfg.seed.derive(detail::kPriorTag);
    const Seed data_root = cfg.seed.derive(detail::kDataTag);
    parallel_for(cfg.m_prime, cfg.workers, [&](std::size_t s) {
        Rng rng = prior_seed.stream(s);
        AbcDraw draw = detail::draw_prior(prior, model, kdist, obs.d, rng, s);
        const Sample synthetic =
            detail::forward_sample(draw, model, prior.bases, n, obs.d, data_root.derive(s));
        draw.distance = hilbert_distance_presorted(obs_sorted, synthetic);
        draws[s] = std::move(draw);
    });

    std::sort(draws.begin(), draws.end(), [](const AbcDraw& a, const AbcDraw& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.iteration < b.iteration;
    });
    AbcResult out;
    out.retained.assign(draws.begin(), draws.begin() + static_cast<std::ptrdiff_t>(cfg.m));
    out.threshold = out.retained.back().distance;
    out.model = model;
    out.bases = prior.bases;
    out.n = n;
    out.d = obs.d;
    out.seed = cfg.seed;
    return out;
}

struct RelativeErrors {
    double eta_kendall = 0.0;
    double eta_rho = 0.0;
    bool rho_error_is_absolute = false;  // |rho_obs| < 0.05 fallback
};

// Average relative errors of the Kendall distribution (L1 on [0,1]) and of
// Spearman's rho between the observed sample and each retained sample.
inline RelativeErrors relative_errors(const Sample& obs, const AbcResult& result,
                                      int workers = 1) {
    if (result.retained.empty()) throw InvalidParameter("empty ABC result");
    const StepFunction k_obs = kendall_distribution(obs);
    const double k_obs_norm = l1_on_unit(k_obs);
    const double rho_obs = spearman_rho(obs);
    const std::size_t m = result.retained.size();
    std::vector<double> ek(m), er(m);
    parallel_for(m, workers, [&](std::size_t i) {
        const Sample synthetic = result.regenerate(result.retained[i]);
        ek[i] = l1_distance_on_unit(k_obs, kendall_distribution(synthetic)) / k_obs_norm;
        er[i] = std::abs(rho_obs - spearman_rho(synthetic));
    });
    RelativeErrors out;
    for (std::size_t i = 0; i < m; ++i) {
        out.eta_kendall += ek[i];
        out.eta_rho += er[i];
    }
    out.eta_kendall /= static_cast<double>(m);
    out.eta_rho /= static_cast<double>(m);
    if (std::abs(rho_obs) < 0.05) {
        out.rho_error_is_absolute = true;  // relative error undefined near 0
    } else {
        out.eta_rho /= std::abs(rho_obs);
    }
    return out;
}

// Fraction of retained samples whose symmetry-test decision at the given
// level agrees with the observed sample's decision. (The complementary
// mismatch fraction is what the experiment tables report.)
inline double test_concordance(const Sample& obs, const AbcResult& result,
                               double level = 0.05, int n_boot = 250,
                               Seed seed = Seed{0}, int workers = 1) {
    const bool reject_obs =
        cvm_asymmetry_pvalue(obs, n_boot, seed.derive(0), workers).pvalue < level;
    const std::size_t m = result.retained.size();
    std::vector<char> agree(m, 0);
    parallel_for(m, workers, [&](std::size_t i) {
        const Sample synthetic = result.regenerate(result.retained[i]);
        const bool reject =
            cvm_asymmetry_pvalue(synthetic, n_boot, seed.derive(i + 1)).pvalue < level;
        agree[i] = reject == reject_obs ? 1 : 0;
    });
    double c = 0.0;
    for (char a : agree) c += a;
    return c / static_cast<double>(m);
}

struct PosteriorSummaries {
    double k_mean = 0.0;
    double k_median = 0.0;
    int k_mode = 0;
    std::map<int, double> k_pmf;
    // exponent cell (k,j) -> mean/median over the retained draws with K >= k
    Matrix a_mean, a_median;
    Matrix a_count;
    std::vector<double> theta_mean, theta_median;

    nlohmann::json to_json() const;
};

inline double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline PosteriorSummaries posterior_summaries(const AbcResult& result) {
    if (result.retained.empty()) throw InvalidParameter("empty ABC result");
    PosteriorSummaries out;
    std::vector<double> ks;
    std::size_t max_k = 0;
    for (const auto& dr : result.retained) {
        ks.push_back(dr.k);
        out.k_pmf[dr.k] += 1.0;
        max_k = std::max(max_k, dr.a.rows);
    }
    const double m = static_cast<double>(result.retained.size());
    out.k_mean = std::accumulate(ks.begin(), ks.end(), 0.0) / m;
    out.k_median = median_of(ks);
    int mode = 0;
    double best = -1.0;
    for (auto& [k, cnt] : out.k_pmf) {
        if (cnt > best) {
            best = cnt;
            mode = k;
        }
        cnt /= m;
    }
    out.k_mode = mode;
    out.a_mean = Matrix(max_k, result.d);
    out.a_median = Matrix(max_k, result.d);
    out.a_count = Matrix(max_k, result.d);
    for (std::size_t k = 0; k < max_k; ++k)
        for (std::size_t j = 0; j < result.d; ++j) {
            std::vector<double> vals;
            for (const auto& dr : result.retained)
                if (dr.a.rows > k) vals.push_back(dr.a(k, j));
            out.a_count(k, j) = static_cast<double>(vals.size());
            out.a_mean(k, j) = vals.empty()
                                   ? std::numeric_limits<double>::quiet_NaN()
                                   : std::accumulate(vals.begin(), vals.end(), 0.0) /
                                         static_cast<double>(vals.size());
            out.a_median(k, j) = median_of(vals);
        }
    if (result.model == AbcModel::Liebscher && !result.bases.empty()) {
        const std::size_t nb = result.bases.size();
        out.theta_mean.resize(nb);
        out.theta_median.resize(nb);
        for (std::size_t b = 0; b < nb; ++b) {
            std::vector<double> vals;
            for (const auto& dr : result.retained) vals.push_back(dr.thetas[b]);
            out.theta_mean[b] = std::accumulate(vals.begin(), vals.end(), 0.0) /
                                static_cast<double>(vals.size());
            out.theta_median[b] = median_of(vals);
        }
    }
    return out;
}

inline nlohmann::json PosteriorSummaries::to_json() const {
    nlohmann::json pmf = nlohmann::json::object();
    for (const auto& [k, p] : k_pmf) pmf[std::to_string(k)] = p;
    nlohmann::json ja_mean = nlohmann::json::array(), ja_median = nlohmann::json::array(),
                   ja_count = nlohmann::json::array();
    for (std::size_t k = 0; k < a_mean.rows; ++k) {
        nlohmann::json rm = nlohmann::json::array(), rmed = nlohmann::json::array(),
                       rc = nlohmann::json::array();
        for (std::size_t j = 0; j < a_mean.cols; ++j) {
            rm.push_back(a_mean(k, j));
            rmed.push_back(a_median(k, j));
            rc.push_back(a_count(k, j));
        }
        ja_mean.push_back(rm);
        ja_median.push_back(rmed);
        ja_count.push_back(rc);
    }
    nlohmann::json js{{"K", {{"mean", k_mean}, {"median", k_median}, {"mode", k_mode}, {"pmf", pmf}}},
                     {"A", {{"mean", ja_mean}, {"median", ja_median}, {"count", ja_count}}}};
    if (!theta_mean.empty()) {
        js["theta"] = {{"mean", theta_mean}, {"median", theta_median}};
    }
    return js;
}

// Posterior sample of Spearman's rho: the empirical rho of each retained
// synthetic sample.
inline std::vector<double> posterior_rho(const AbcResult& result, int workers = 1) {
    std::vector<double> rho(result.retained.size());
    parallel_for(rho.size(), workers, [&](std::size_t i) {
        rho[i] = spearman_rho(result.regenerate(result.retained[i]));
    });
    return rho;
}

}  // namespace liebscher
