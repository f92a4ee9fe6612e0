#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "liebscher/base_copula.hpp"
#include "liebscher/construction.hpp"
#include "liebscher/errors.hpp"
#include "liebscher/matrix.hpp"
#include "liebscher/transforms.hpp"

namespace liebscher {

inline void validate_unit_point(std::span<const double> u, std::size_t d) {
    if (u.size() != d) throw DimensionError("point dimension mismatch");
    for (double x : u)
        if (!(x >= 0.0 && x <= 1.0))
            throw InvalidParameter("unit-point coordinate outside [0,1]");
}

// Full description of a product-construction copula: K base copulas combined
// through per-dimension transforms. bases[k] pairs with the k-th derived
// g-transform, so the cdf is prod_k C_k(g_1^(k)(u_1), ..., g_d^(k)(u_d)).
class LiebscherSpec {
  public:
    // Power transforms described by the iterative exponent matrix A
    // (K rows, d columns, first row all ones, later rows in (0,1)).
    LiebscherSpec(std::size_t d, std::vector<BaseCopula> bases, Matrix a)
        : d_(d), bases_(std::move(bases)), a_(std::move(a)) {
        if (d_ < 2) throw InvalidParameter("spec needs d >= 2");
        if (bases_.empty() || bases_.size() != a_.rows)
            throw InvalidParameter("need one base copula per component");
        if (a_.cols != d_) throw InvalidParameter("exponent matrix has wrong width");
        p_ = stick_breaking_exponents(a_, /*strict=*/true);
    }

    // General transforms from the class F.
    LiebscherSpec(std::size_t d, std::vector<BaseCopula> bases,
                  std::shared_ptr<const CustomTransforms> transforms)
        : d_(d), bases_(std::move(bases)), custom_(std::move(transforms)) {
        if (d_ < 2) throw InvalidParameter("spec needs d >= 2");
        if (!custom_) throw InvalidParameter("null transforms");
        if (bases_.empty() || bases_.size() != custom_->components())
            throw InvalidParameter("need one base copula per component");
        if (custom_->dim() != d_) throw InvalidParameter("transforms have wrong width");
    }

    std::size_t dim() const { return d_; }
    std::size_t components() const { return bases_.size(); }
    const std::vector<BaseCopula>& bases() const { return bases_; }
    bool is_power() const { return !custom_; }
    const Matrix& iterative_exponents() const { return a_; }
    const Matrix& g_exponents() const { return p_; }
    const CustomTransforms& custom_transforms() const { return *custom_; }

    double cdf(std::span<const double> u) const {
        validate_unit_point(u, d_);
        const std::size_t K = components();
        std::vector<double> t(d_);
        double prod = 1.0;
        if (is_power()) {
            for (std::size_t k = 0; k < K; ++k) {
                for (std::size_t j = 0; j < d_; ++j) t[j] = std::pow(u[j], p_(k, j));
                prod *= bases_[k].cdf(t);
            }
            return prod;
        }
        // custom: evaluate all g^(k)(u_j) per dimension, then fold
        std::vector<std::vector<double>> g(d_);
        for (std::size_t j = 0; j < d_; ++j) g[j] = custom_->g_all(j, u[j]);
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t j = 0; j < d_; ++j) t[j] = g[j][k];
            prod *= bases_[k].cdf(t);
        }
        return prod;
    }

    double cdf(double u, double v) const {
        const double uv[2] = {u, v};
        return cdf(std::span<const double>(uv, 2));
    }

    static LiebscherSpec from_json(const nlohmann::json& js) {
        const auto require = [&](const char* key) {
            if (!js.contains(key))
                throw SpecParseError(std::string("missing field \"") + key + "\"");
        };
        require("d"); require("K"); require("bases"); require("A");
        const auto d = js.at("d").get<std::size_t>();
        const auto K = js.at("K").get<std::size_t>();
        std::vector<BaseCopula> bases;
        for (const auto& b : js.at("bases")) {
            if (!b.contains("kind")) throw SpecParseError("base copula missing \"kind\"");
            const std::string kind = b.at("kind").get<std::string>();
            try {
                if (kind == "independence") bases.push_back(BaseCopula::independence());
                else if (kind == "comonotonic") bases.push_back(BaseCopula::comonotonic());
                else if (kind == "clayton")
                    bases.push_back(BaseCopula::clayton(b.at("theta").get<double>()));
                else if (kind == "gumbel_barnett")
                    bases.push_back(BaseCopula::gumbel_barnett(b.at("theta").get<double>()));
                else throw SpecParseError("unknown base copula kind \"" + kind + "\"");
            } catch (const nlohmann::json::exception&) {
                throw SpecParseError("base copula \"" + kind + "\" needs a numeric \"theta\"");
            }
        }
        if (bases.size() != K)
            throw SpecParseError("\"bases\" must list exactly K entries");
        const auto& ja = js.at("A");
        if (!ja.is_array() || ja.size() != K)
            throw SpecParseError("\"A\" must be a K-row matrix");
        Matrix a(K, d);
        for (std::size_t k = 0; k < K; ++k) {
            if (!ja[k].is_array() || ja[k].size() != d)
                throw SpecParseError("row " + std::to_string(k + 1) + " of \"A\" must have d entries");
            for (std::size_t j = 0; j < d; ++j) a(k, j) = ja[k][j].get<double>();
        }
        try {
            return LiebscherSpec(d, std::move(bases), std::move(a));
        } catch (const InvalidParameter& e) {
            throw SpecParseError(e.what());
        }
    }

    nlohmann::json to_json() const {
        if (!is_power())
            throw InvalidParameter("custom transforms are not serializable");
        nlohmann::json jb = nlohmann::json::array();
        for (const auto& b : bases_) {
            nlohmann::json e{{"kind", kind_name(b.kind)}};
            if (b.kind == CopulaKind::Clayton || b.kind == CopulaKind::GumbelBarnett)
                e["theta"] = b.theta;
            jb.push_back(e);
        }
        nlohmann::json ja = nlohmann::json::array();
        for (std::size_t k = 0; k < a_.rows; ++k) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t j = 0; j < a_.cols; ++j) row.push_back(a_(k, j));
            ja.push_back(row);
        }
        return {{"d", d_}, {"K", components()}, {"bases", jb}, {"A", ja}};
    }

  private:
    std::size_t d_;
    std::vector<BaseCopula> bases_;
    Matrix a_;
    Matrix p_;
    std::shared_ptr<const CustomTransforms> custom_;
};

}  // namespace liebscher
