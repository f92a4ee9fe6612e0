#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

#include "liebscher/cl_params.hpp"
#include "liebscher/empirical.hpp"
#include "liebscher/hilbert.hpp"
#include "liebscher/samplers.hpp"
#include "oracles.hpp"

using namespace liebscher;
using Catch::Matchers::WithinAbs;

namespace {

Matrix eq11_a() {
    Matrix a(2, 2);
    a(0, 0) = a(0, 1) = 1.0;
    a(1, 0) = 1.0 / 3.0;
    a(1, 1) = 0.75;
    return a;
}

}  // namespace

TEST_CASE("uniform margins for every sampler") {
    const std::size_t n = 10000;
    const double crit = oracles::ks_critical_1pct(n);

    SECTION("single independence base is plain uniforms") {
        const LiebscherSpec spec(2, {BaseCopula::independence()}, Matrix(1, 2, 1.0));
        const Sample s = sample_liebscher(spec, n, Seed{11});
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(oracles::ks_uniform(s.column(j)) < crit);
    }
    SECTION("iterative scheme with clayton and comonotonic bases") {
        Matrix a(2, 2);
        a(0, 0) = a(0, 1) = 1.0;
        a(1, 0) = 0.3;
        a(1, 1) = 0.6;
        const LiebscherSpec spec(2, {BaseCopula::clayton(5.0), BaseCopula::comonotonic()}, a);
        const Sample s = sample_liebscher(spec, n, Seed{12});
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(oracles::ks_uniform(s.column(j)) < crit);
    }
    SECTION("comonotonic-based sampler") {
        const Sample s = sample_cl(eq11_a(), n, Seed{13});
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(oracles::ks_uniform(s.column(j)) < crit);
    }
    SECTION("noisy sampler") {
        Matrix means(2, 2);
        means(0, 0) = means(0, 1) = 1.0;
        means(1, 0) = 0.4;
        means(1, 1) = 0.8;
        const Sample s = sample_cl_noisy(NoiseSpec(means, 1e-2), n, Seed{14});
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(oracles::ks_uniform(s.column(j)) < crit);
    }
}

TEST_CASE("general scheme with comonotonic bases equals the specialized sampler") {
    const Matrix a = eq11_a();
    const LiebscherSpec spec(2, {BaseCopula::comonotonic(), BaseCopula::comonotonic()}, a);
    const Sample general = sample_liebscher(spec, 5000, Seed{77});
    const Sample special = sample_cl(a, 5000, Seed{77});
    REQUIRE(general.data.size() == special.data.size());
    // byte-identical, not merely close
    CHECK(std::memcmp(general.data.data(), special.data.data(),
                      general.data.size() * sizeof(double)) == 0);
}

TEST_CASE("determinism across worker counts") {
    const Matrix a = eq11_a();
    const Sample s1 = sample_cl(a, 4000, Seed{5}, 1);
    const Sample s4 = sample_cl(a, 4000, Seed{5}, 4);
    CHECK(s1.data == s4.data);
    const LiebscherSpec spec(2, {BaseCopula::clayton(2.0), BaseCopula::independence()},
                             eq11_a());
    const Sample t1 = sample_liebscher(spec, 2000, Seed{6}, 1);
    const Sample t3 = sample_liebscher(spec, 2000, Seed{6}, 3);
    CHECK(t1.data == t3.data);
}

TEST_CASE("single clayton base reproduces its kendall tau") {
    const double theta = 5.0;
    const LiebscherSpec spec(2, {BaseCopula::clayton(theta)}, Matrix(1, 2, 1.0));
    const std::size_t n = 10000;
    const Sample s = sample_liebscher(spec, n, Seed{21});
    CHECK_THAT(kendall_tau(s), WithinAbs(theta / (theta + 2.0), 3.0 / std::sqrt(double(n))));
}

TEST_CASE("comonotonic degenerate case: equal exponent columns give x1 == x2") {
    Matrix a(3, 2);
    a(0, 0) = a(0, 1) = 1.0;
    a(1, 0) = a(1, 1) = 0.4;
    a(2, 0) = a(2, 1) = 0.7;
    const Sample s = sample_cl(a, 500, Seed{30});
    for (std::size_t i = 0; i < s.n; ++i) CHECK(s.at(i, 0) == s.at(i, 1));
}

TEST_CASE("independence pattern gives uncorrelated coordinates") {
    // p = (1,0), q = (0,1): boundary exponents a = (1, 0)
    Matrix a(2, 2);
    a(0, 0) = a(0, 1) = 1.0;
    a(1, 0) = 1.0;
    a(1, 1) = 0.0;
    const std::size_t n = 20000;
    const Sample s = sample_cl(a, n, Seed{31});
    CHECK_THAT(spearman_rho(s), WithinAbs(0.0, 3.0 / std::sqrt(double(n))));
}

TEST_CASE("singular curve mass fractions") {
    const CLParams c = CLParams::from_pq({1.0 / 3.0, 2.0 / 3.0}, {0.75, 0.25});
    const std::size_t n = 100000;
    const Sample s = sample_cl(c, n, Seed{32}, 2);
    double f1 = 0, f2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = s.at(i, 0), y = s.at(i, 1);
        if (std::abs(y - std::pow(x, 4.0 / 9.0)) < 1e-9) ++f1;
        if (std::abs(y - std::pow(x, 8.0 / 3.0)) < 1e-9) ++f2;
    }
    CHECK_THAT(f1 / double(n), WithinAbs(1.0 / 3.0, 0.01));
    CHECK_THAT(f2 / double(n), WithinAbs(0.25, 0.01));
}

TEST_CASE("empirical cdf converges to the analytic cdf (DKW band)") {
    const CLParams c = CLParams::from_pq({1.0 / 3.0, 2.0 / 3.0}, {0.75, 0.25});
    const std::size_t n = 100000;
    const Sample s = sample_cl(c, n, Seed{33}, 2);
    const double band = 2.0 * std::sqrt(std::log(2.0 / 0.01) / (2.0 * double(n)));
    double sup = 0.0;
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) {
            const double u = i / 20.0, v = j / 20.0;
            std::size_t cnt = 0;
            for (std::size_t r = 0; r < n; ++r)
                cnt += (s.at(r, 0) <= u && s.at(r, 1) <= v) ? 1 : 0;
            sup = std::max(sup, std::abs(double(cnt) / double(n) - c.cdf(u, v)));
        }
    CHECK(sup <= band);
}

TEST_CASE("noise specification") {
    Matrix means(2, 2);
    means(0, 0) = means(0, 1) = 1.0;
    means(1, 0) = 0.4;
    means(1, 1) = 0.8;
    SECTION("moment matching at mean 0.4, variance 0.1") {
        const NoiseSpec noise(means, 0.1);
        const auto [al, be] = noise.beta_parameters(0.4);
        CHECK_THAT(al, WithinAbs(0.56, 1e-12));
        CHECK_THAT(be, WithinAbs(0.84, 1e-12));
    }
    SECTION("variance outside the Beta envelope is rejected") {
        CHECK_THROWS_AS(NoiseSpec(means, 0.4 * 0.6), InvalidNoise);
        CHECK_THROWS_AS(NoiseSpec(means, 0.17), InvalidNoise);  // 0.8*0.2 = 0.16
        CHECK_THROWS_AS(NoiseSpec(means, 0.0), InvalidNoise);
    }
    SECTION("drawn exponents have the requested mean") {
        const double sigma2 = 1e-2;
        const NoiseSpec noise(means, sigma2);
        const std::size_t n = 20000;
        Seed seed{40};
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            Rng rng = seed.stream(i);
            const auto [al, be] = noise.beta_parameters(0.8);
            mean += rng.beta(al, be);
        }
        mean /= double(n);
        CHECK_THAT(mean, WithinAbs(0.8, 3.0 * std::sqrt(sigma2 / double(n))));
    }
    SECTION("vanishing noise is statistically indistinguishable from exact") {
        const std::size_t n = 2000;
        const NoiseSpec noise(means, 1e-12);
        const Sample noisy = sample_cl_noisy(noise, n, Seed{41});
        const Sample exact_same = sample_cl(means, n, Seed{42});
        const Sample exact_a = sample_cl(means, n, Seed{43});
        const Sample exact_b = sample_cl(means, n, Seed{44});
        CHECK(hilbert_distance(noisy, exact_same) <
              hilbert_distance(exact_a, exact_b) * 1.5 + 0.01);
    }
}

TEST_CASE("sampled values stay in the open unit interval") {
    const Sample s = sample_cl(eq11_a(), 20000, Seed{50});
    for (double x : s.data) {
        CHECK(x > 0.0);
        CHECK(x < 1.0);
    }
}

TEST_CASE("csv round trip") {
    const Sample s = sample_cl(eq11_a(), 64, Seed{51});
    std::stringstream ss;
    write_sample_csv(s, ss);
    const Sample back = read_sample_csv(ss);
    REQUIRE(back.n == s.n);
    REQUIRE(back.d == s.d);
    CHECK(back.data == s.data);  // 17 significant digits round-trip doubles
}
