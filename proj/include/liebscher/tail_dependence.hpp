#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "liebscher/errors.hpp"

namespace liebscher {

// Combined tail coefficients of a bivariate product-construction copula from
// per-component inputs.

// Lower tail, symmetric case: lambda_L = prod_k lambda_L(C_k), where the
// shared transforms are regularly varying with indices gamma^(k) summing
// to 1. If any component has asymmetric behavior at the origin the
// coefficient vanishes regardless of the component values.
struct LowerTailInputs {
    std::vector<double> component_lambdas;  // lambda_L(C_k)
    std::vector<double> rv_indices;         // gamma^(k), must sum to 1
    bool has_asymmetric_component = false;  // some g_1^(k)/g_2^(k) -> 0
};

inline double lower_tail_coefficient(const LowerTailInputs& in) {
    if (in.has_asymmetric_component) return 0.0;
    if (in.component_lambdas.empty() ||
        in.component_lambdas.size() != in.rv_indices.size())
        throw InvalidParameter("need one (lambda, gamma) pair per component");
    double s = 0.0;
    for (double g : in.rv_indices) s += g;
    if (std::abs(s - 1.0) > 1e-9)
        throw ConstraintViolation("regular-variation indices must sum to 1");
    double prod = 1.0;
    for (double l : in.component_lambdas) prod *= l;
    return prod;
}

// Upper tail, general case: lambda_U = sum_k Lambda_U(C_k; d1^(k), d2^(k))
// with the transform derivatives at 1 summing to 1 in each coordinate.
using UpperTailFn = std::function<double(double, double)>;

inline double comonotonic_upper_tail(double x, double y) { return std::min(x, y); }
inline double independence_upper_tail(double, double) { return 0.0; }

struct UpperTailInputs {
    std::vector<UpperTailFn> tail_fns;                 // Lambda_U(C_k; .,.)
    std::vector<std::array<double, 2>> derivatives;    // (d1^(k), d2^(k))
};

inline double upper_tail_coefficient(const UpperTailInputs& in) {
    if (in.tail_fns.empty() || in.tail_fns.size() != in.derivatives.size())
        throw InvalidParameter("need one (Lambda_U, derivative pair) per component");
    double s1 = 0.0, s2 = 0.0;
    for (const auto& d : in.derivatives) {
        s1 += d[0];
        s2 += d[1];
    }
    if (std::abs(s1 - 1.0) > 1e-9 || std::abs(s2 - 1.0) > 1e-9)
        throw ConstraintViolation("transform derivatives at 1 must sum to 1 per coordinate");
    double total = 0.0;
    for (std::size_t k = 0; k < in.tail_fns.size(); ++k)
        total += in.tail_fns[k](in.derivatives[k][0], in.derivatives[k][1]);
    return total;
}

}  // namespace liebscher
