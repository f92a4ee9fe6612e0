#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>

#include "liebscher/construction.hpp"
#include "liebscher/liebscher_spec.hpp"
#include "liebscher/rng.hpp"
#include "liebscher/transforms.hpp"

using namespace liebscher;
using Catch::Matchers::WithinAbs;

namespace {

Matrix ones_row(std::size_t d) {
    Matrix a(1, d);
    for (std::size_t j = 0; j < d; ++j) a(0, j) = 1.0;
    return a;
}

Matrix random_a(std::size_t K, std::size_t d, Rng& rng) {
    Matrix a(K, d);
    for (std::size_t j = 0; j < d; ++j) a(0, j) = 1.0;
    for (std::size_t k = 1; k < K; ++k)
        for (std::size_t j = 0; j < d; ++j)
            a(k, j) = 0.02 + 0.96 * rng.uniform01();
    return a;
}

}  // namespace

TEST_CASE("stick-breaking exponents, hand-computed cases") {
    SECTION("K = 1 gives the unit weight") {
        const Matrix p = stick_breaking_exponents(ones_row(3));
        for (std::size_t j = 0; j < 3; ++j) CHECK(p(0, j) == 1.0);
    }
    SECTION("K = 2") {
        Matrix a(2, 1);
        a(0, 0) = 1.0;
        a(1, 0) = 0.4;
        const Matrix p = stick_breaking_exponents(a);
        CHECK_THAT(p(0, 0), WithinAbs(0.4, 1e-15));
        CHECK_THAT(p(1, 0), WithinAbs(0.6, 1e-15));
    }
    SECTION("K = 3") {
        Matrix a(3, 1);
        a(0, 0) = 1.0;
        a(1, 0) = 0.5;
        a(2, 0) = 0.25;
        const Matrix p = stick_breaking_exponents(a);
        CHECK_THAT(p(0, 0), WithinAbs(0.25, 1e-15));
        CHECK_THAT(p(1, 0), WithinAbs(0.375, 1e-15));
        CHECK_THAT(p(2, 0), WithinAbs(0.375, 1e-15));
        CHECK_THAT(p(0, 0) + p(1, 0) + p(2, 0), WithinAbs(1.0, 1e-15));
    }
}

TEST_CASE("stick-breaking columns sum to one") {
    Rng rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t K = 1 + rng.uniform_index(12);
        const std::size_t d = 2 + rng.uniform_index(3);
        const Matrix p = stick_breaking_exponents(random_a(K, d, rng));
        for (std::size_t j = 0; j < d; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                CHECK(p(k, j) >= 0.0);
                s += p(k, j);
            }
            CHECK_THAT(s, WithinAbs(1.0, 1e-12));
        }
    }
}

TEST_CASE("exponent matrix validation") {
    Matrix a(2, 2);
    a(0, 0) = a(0, 1) = 1.0;
    a(1, 0) = 1.0;  // boundary, rejected in strict mode
    a(1, 1) = 0.5;
    CHECK_THROWS_AS(stick_breaking_exponents(a), InvalidParameter);
    CHECK_NOTHROW(stick_breaking_exponents(a, /*strict=*/false));
    a(1, 0) = 0.0;
    CHECK_THROWS_AS(stick_breaking_exponents(a), InvalidParameter);
    a(0, 0) = 0.9;
    CHECK_THROWS_AS(stick_breaking_exponents(a, /*strict=*/false), InvalidParameter);
    CHECK_THROWS_AS(validate_exponent_matrix(Matrix(65, 2, 0.5)), InvalidParameter);
}

TEST_CASE("product_to_iterative inverts stick breaking") {
    SECTION("trivial K = 1") {
        Matrix p(1, 2);
        p(0, 0) = p(0, 1) = 1.0;
        const Matrix a = product_to_iterative(p);
        CHECK(a(0, 0) == 1.0);
        CHECK(a(0, 1) == 1.0);
    }
    SECTION("hand inversion of (0.4, 0.6)") {
        Matrix p(2, 1);
        p(0, 0) = 0.4;
        p(1, 0) = 0.6;
        const Matrix a = product_to_iterative(p);
        CHECK_THAT(a(1, 0), WithinAbs(0.4, 1e-15));
    }
    SECTION("seeded round trips at K = 5") {
        Rng rng(7);
        for (int trial = 0; trial < 40; ++trial) {
            const Matrix a = random_a(5, 2, rng);
            const Matrix p = stick_breaking_exponents(a);
            const Matrix a2 = product_to_iterative(p);
            const Matrix p2 = stick_breaking_exponents(a2);
            for (std::size_t k = 0; k < 5; ++k)
                for (std::size_t j = 0; j < 2; ++j) {
                    CHECK_THAT(a2(k, j), WithinAbs(a(k, j), 1e-12));
                    CHECK_THAT(p2(k, j), WithinAbs(p(k, j), 1e-12));
                }
        }
    }
    SECTION("vanishing tail raises DegenerateExponent") {
        Matrix p(3, 1);
        p(0, 0) = 0.4;
        p(1, 0) = 0.6;
        p(2, 0) = 0.0;  // tail empty after component 2 of 3
        CHECK_THROWS_AS(product_to_iterative(p), DegenerateExponent);
    }
}

TEST_CASE("constraint: the g-transforms multiply to the identity") {
    Rng rng(11);
    const Matrix a = random_a(4, 2, rng);
    const Matrix p = stick_breaking_exponents(a);
    for (int i = 0; i <= 100; ++i) {
        const double u = static_cast<double>(i) / 100.0;
        for (std::size_t j = 0; j < 2; ++j) {
            double prod = 1.0;
            for (std::size_t k = 0; k < 4; ++k) prod *= std::pow(u, p(k, j));
            CHECK_THAT(prod, WithinAbs(u, 1e-12));
        }
    }
}

TEST_CASE("gumbel-barnett fusion") {
    SECTION("K = 1 passthrough") {
        CHECK_THAT(gumbel_barnett_fused_theta({0.5}, {1.0}, 2), WithinAbs(0.5, 1e-15));
    }
    SECTION("hand-computed d = 2 cases") {
        CHECK_THAT(gumbel_barnett_fused_theta({0.2, 0.4}, {0.5, 0.5}, 2),
                   WithinAbs(0.15, 1e-15));
        const double th = 0.9;
        CHECK_THAT(gumbel_barnett_fused_theta({th, th}, {1.0 / 3.0, 2.0 / 3.0}, 2),
                   WithinAbs(5.0 * th / 9.0, 1e-15));
    }
    SECTION("constraint violation") {
        CHECK_THROWS_AS(gumbel_barnett_fused_theta({0.5, 0.5}, {0.6, 0.6}, 2),
                        ConstraintViolation);
    }
    SECTION("pointwise fusion of the product on a 21x21 grid") {
        const std::vector<double> thetas{0.2, 0.4, 0.3};
        const std::vector<double> shared_p{0.5, 0.3, 0.2};
        Matrix p(3, 2);
        for (std::size_t k = 0; k < 3; ++k) p(k, 0) = p(k, 1) = shared_p[k];
        const Matrix a = product_to_iterative(p);
        std::vector<BaseCopula> bases;
        for (double th : thetas) bases.push_back(BaseCopula::gumbel_barnett(th));
        const LiebscherSpec spec(2, bases, a);
        const double fused = gumbel_barnett_fused_theta(thetas, shared_p, 2);
        const BaseCopula target = BaseCopula::gumbel_barnett(fused);
        for (int i = 0; i <= 20; ++i)
            for (int j = 0; j <= 20; ++j) {
                const double u = i / 20.0, v = j / 20.0;
                const double uv[2] = {u, v};
                CHECK_THAT(spec.cdf(u, v),
                           WithinAbs(target.cdf(std::span<const double>(uv, 2)), 1e-12));
            }
    }
}

TEST_CASE("custom transforms: power case matches the analytic path") {
    // f(t) = t^{1-a} expressed as an opaque callable; the Prop-5 composition
    // machinery must reproduce the stick-breaking exponents.
    const std::size_t K = 3, d = 2;
    Rng rng(5);
    const Matrix a = random_a(K, d, rng);
    std::vector<CustomTransforms::Fn> fns;
    for (std::size_t k = 1; k < K; ++k)
        for (std::size_t j = 0; j < d; ++j) {
            const double e = 1.0 - a(k, j);
            fns.push_back([e](double t) { return std::pow(t, e); });
        }
    const auto tr = std::make_shared<CustomTransforms>(K, d, std::move(fns));
    const Matrix p = stick_breaking_exponents(a);
    for (double t : {0.05, 0.3, 0.77, 0.999}) {
        for (std::size_t j = 0; j < d; ++j) {
            const auto g = tr->g_all(j, t);
            for (std::size_t k = 0; k < K; ++k)
                CHECK_THAT(g[k], WithinAbs(std::pow(t, p(k, j)), 1e-12));
        }
    }
    SECTION("grid identity for the composed g functions") {
        for (int i = 0; i <= 100; ++i) {
            const double t = static_cast<double>(i) / 100.0;
            for (std::size_t j = 0; j < d; ++j) {
                const auto g = tr->g_all(j, t);
                double prod = 1.0;
                for (double gk : g) prod *= gk;
                CHECK_THAT(prod, WithinAbs(t, 1e-10));
            }
        }
    }
    SECTION("bisection inverses undo the transforms") {
        for (double x : {0.1, 0.42, 0.9}) {
            const double t = tr->f_inverse(2, 0, x);
            CHECK_THAT(tr->f(2, 0, t), WithinAbs(x, 1e-10));
            const double s = tr->id_over_f_inverse(2, 1, x);
            CHECK_THAT(tr->id_over_f(2, 1, s), WithinAbs(x, 1e-10));
        }
    }
}

TEST_CASE("custom transforms reject functions outside the class") {
    // f(t) = t^2 has Id/f = 1/t decreasing
    std::vector<CustomTransforms::Fn> bad{[](double t) { return t * t; },
                                          [](double t) { return t; }};
    CHECK_THROWS_AS(CustomTransforms(2, 2, std::move(bad)), InvalidParameter);
    // f(1) != 1
    std::vector<CustomTransforms::Fn> bad2{[](double t) { return 0.5 * t; },
                                           [](double t) { return std::sqrt(t); }};
    CHECK_THROWS_AS(CustomTransforms(2, 2, std::move(bad2)), InvalidParameter);
}
