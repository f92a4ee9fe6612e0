#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "liebscher/abc.hpp"
#include "liebscher/mle.hpp"
#include "liebscher/samplers.hpp"

namespace liebscher {

// Knobs shared by the simulation studies. Desk scale keeps CI runs in
// minutes; paper scale mirrors the published protocol.
struct ExperimentScale {
    int reps = 5;
    std::size_t m_prime = 2000;
    std::size_t m = 100;
    std::size_t n = 500;
    int n_boot = 250;
    int workers = 1;

    static ExperimentScale desk() { return {}; }
    static ExperimentScale paper() { return {20, 10000, 300, 500, 250, 1}; }
};

struct ErrorSummary {
    double eta_kendall_mean = 0.0, eta_kendall_sd = 0.0;
    double eta_rho_mean = 0.0, eta_rho_sd = 0.0;
    double f_test_mean = 0.0, f_test_sd = 0.0;  // mismatch fraction
};

namespace detail {

inline std::pair<double, double> mean_sd(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return {mean, sd};
}

}  // namespace detail

// One column of the well-specified study: `reps` independent data sets from
// CL truths with K components (free exponents drawn uniformly per rep),
// each estimated by rejection sampling; reports the averaged relative errors
// and the symmetry-test mismatch fraction.
inline ErrorSummary well_specified_column(int K, const ExperimentScale& sc, Seed seed) {
    std::vector<double> ek, er, ft;
    for (int rep = 0; rep < sc.reps; ++rep) {
        const Seed rep_seed = seed.derive(static_cast<std::uint64_t>(K))
                                  .derive(static_cast<std::uint64_t>(rep));
        Rng truth_rng = rep_seed.stream(0);
        Matrix a_true(static_cast<std::size_t>(K), 2);
        a_true(0, 0) = a_true(0, 1) = 1.0;
        for (std::size_t k = 1; k < a_true.rows; ++k)
            for (std::size_t j = 0; j < 2; ++j) a_true(k, j) = truth_rng.uniform01();
        const Sample obs = sample_cl(a_true, sc.n, rep_seed.derive(1), sc.workers);

        PriorSpec prior;
        AbcConfig cfg{sc.m_prime, sc.m, sc.n, rep_seed.derive(2), sc.workers};
        const AbcResult res = run_abc(obs, prior, cfg, AbcModel::CL);
        const RelativeErrors re = relative_errors(obs, res, sc.workers);
        const double conc =
            test_concordance(obs, res, 0.05, sc.n_boot, rep_seed.derive(3), sc.workers);
        ek.push_back(re.eta_kendall);
        er.push_back(re.eta_rho);
        ft.push_back(1.0 - conc);
    }
    ErrorSummary out;
    std::tie(out.eta_kendall_mean, out.eta_kendall_sd) = detail::mean_sd(ek);
    std::tie(out.eta_rho_mean, out.eta_rho_sd) = detail::mean_sd(er);
    std::tie(out.f_test_mean, out.f_test_sd) = detail::mean_sd(ft);
    return out;
}

// One cell of the misspecified study: a single data set from the noisy CL
// model at the given exponent means and noise variance (variance 0 uses the
// exact model), estimated with the exact-model prior.
inline ErrorSummary noisy_cell(const Matrix& means, double sigma2,
                               const ExperimentScale& sc, Seed seed) {
    const Sample obs = sigma2 > 0.0
                           ? sample_cl_noisy(NoiseSpec(means, sigma2), sc.n,
                                             seed.derive(1), sc.workers)
                           : sample_cl(means, sc.n, seed.derive(1), sc.workers);
    PriorSpec prior;
    AbcConfig cfg{sc.m_prime, sc.m, sc.n, seed.derive(2), sc.workers};
    const AbcResult res = run_abc(obs, prior, cfg, AbcModel::CL);
    const RelativeErrors re = relative_errors(obs, res, sc.workers);
    const double conc = test_concordance(obs, res, 0.05, sc.n_boot, seed.derive(3), sc.workers);
    ErrorSummary out;
    out.eta_kendall_mean = re.eta_kendall;
    out.eta_rho_mean = re.eta_rho;
    out.f_test_mean = 1.0 - conc;
    return out;
}

struct CompareRow {
    int rep = 0;
    std::size_t n = 0;
    std::string method;     // mle | abc_mean | abc_median
    std::string parameter;  // theta | p | q
    double estimate = 0.0;
    double runtime_ms = 0.0;
};

// Point-estimation comparison on the Clayton-times-independence model:
// per repetition, simulate at the truth, fit by maximum pseudo-likelihood
// and by rejection sampling with theta ~ logU[0.5,20], (p,q) ~ U(0,1)^2.
inline std::vector<CompareRow> compare_abc_mle(const CIParams& truth,
                                               const std::vector<std::size_t>& n_list,
                                               int reps, std::size_t m_prime, std::size_t m,
                                               Seed seed, int workers = 1) {
    truth.validate();
    const LiebscherSpec truth_spec = truth.to_liebscher();
    std::vector<CompareRow> rows;
    const auto emit = [&](int rep, std::size_t n, const std::string& method,
                          double th, double p, double q, double ms) {
        rows.push_back({rep, n, method, "theta", th, ms});
        rows.push_back({rep, n, method, "p", p, ms});
        rows.push_back({rep, n, method, "q", q, ms});
    };
    using clock = std::chrono::steady_clock;
    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        const std::size_t n = n_list[ni];
        for (int rep = 0; rep < reps; ++rep) {
            const Seed rep_seed = seed.derive(ni).derive(static_cast<std::uint64_t>(rep));
            const Sample data = sample_liebscher(truth_spec, n, rep_seed.derive(1), workers);

            const auto t0 = clock::now();
            const FitResult fit = fit_mle(data, 8, rep_seed.derive(2), workers);
            const double mle_ms =
                std::chrono::duration<double, std::milli>(clock::now() - t0).count();
            emit(rep, n, "mle", fit.params.theta, fit.params.p, fit.params.q, mle_ms);

            PriorSpec prior;
            prior.k_prior.kind = KPriorSpec::Kind::Fixed;
            prior.k_prior.fixed_k = 2;
            prior.bases = {
                BaseSpec{CopulaKind::Clayton, true, 0.0, 0.5, 20.0},
                BaseSpec{CopulaKind::Independence, false, 0.0, 0.0, 0.0},
            };
            AbcConfig cfg{m_prime, m, n, rep_seed.derive(3), workers};
            const auto t1 = clock::now();
            const AbcResult res = run_abc(data, prior, cfg, AbcModel::Liebscher);
            const PosteriorSummaries ps = posterior_summaries(res);
            const double abc_ms =
                std::chrono::duration<double, std::milli>(clock::now() - t1).count();
            emit(rep, n, "abc_mean", ps.theta_mean[0], ps.a_mean(1, 0), ps.a_mean(1, 1), abc_ms);
            emit(rep, n, "abc_median", ps.theta_median[0], ps.a_median(1, 0), ps.a_median(1, 1),
                 abc_ms);
        }
    }
    return rows;
}

}  // namespace liebscher
