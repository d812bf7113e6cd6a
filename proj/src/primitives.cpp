#include "vilab/primitives.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "vilab/common.hpp"

namespace vilab {

double CostParams::operator()(double e) const {
    switch (family) {
        case CostFamily::Exponential:
            return c0 * std::exp(-lambda * e);
        case CostFamily::Quadratic:
            return c0 - b1 * e - b2 * e * e;
    }
    throw ConfigError("unknown cost family");
}

double CostParams::deriv(double e) const {
    switch (family) {
        case CostFamily::Exponential:
            return -lambda * c0 * std::exp(-lambda * e);
        case CostFamily::Quadratic:
            return -b1 - 2.0 * b2 * e;
    }
    throw ConfigError("unknown cost family");
}

double PriceDist::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    return -std::expm1(-x / mean);
}

double PriceDist::pdf(double x) const {
    if (x < 0.0) return 0.0;
    return std::exp(-x / mean) / mean;
}

double PriceDist::survival(double x) const {
    if (x <= 0.0) return 1.0;
    return std::exp(-x / mean);
}

void ModelPrimitives::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("alpha must lie strictly in (0, 1)");
    if (!(k_fixed >= 0.0)) throw ConfigError("k_fixed must be >= 0");
    if (!(t >= 0.0)) throw ConfigError("downstream tariff t must be >= 0");
    if (!(tau >= 0.0)) throw ConfigError("upstream tariff tau must be >= 0");
    if (!(e_max > 0.0)) throw ConfigError("e_max must be > 0");
    if (!(price_dist.mean > 0.0))
        throw ConfigError("price distribution mean must be > 0");

    // V strictly decreasing and concave, probed by finite differences on a
    // grid covering the working tariff range.
    const double t_hi = std::max(2.0, t) + 0.5;
    const double h = 1e-5;
    for (int i = 0; i <= 20; ++i) {
        const double ti = t_hi * i / 20.0 + h;
        const double d1 = (value_params(ti + h) - value_params(ti - h)) / (2 * h);
        const double d2 =
            (value_params(ti + h) - 2 * value_params(ti) + value_params(ti - h)) /
            (h * h);
        if (!(d1 < 0.0)) throw ConfigError("V(t) must be strictly decreasing");
        if (!(d2 < 1e-9)) throw ConfigError("V(t) must be strictly concave");
    }

    // c strictly decreasing on [0, e_max] and positive at e_max.
    for (int i = 0; i <= 32; ++i) {
        const double e = e_max * i / 32.0;
        if (!(cost_params.deriv(e) < 0.0))
            throw ConfigError("c(e) must be strictly decreasing on [0, e_max]");
    }
    if (!(cost_params(e_max) > 0.0))
        throw ConfigError("c(e_max) must be positive");

    // F a proper distribution on [0, inf): F(0) = 0, nondecreasing, -> 1.
    if (price_dist.cdf(0.0) != 0.0) throw ConfigError("F(0) must be 0");
    double prev = 0.0;
    for (double x : {0.1, 1.0, 5.0, 25.0, 125.0}) {
        const double fx = price_dist.cdf(x);
        if (fx < prev) throw ConfigError("F must be nondecreasing");
        prev = fx;
    }
    if (!(price_dist.cdf(200.0 * price_dist.mean) > 1.0 - 1e-9))
        throw ConfigError("F must approach 1 in the tail");
}

ModelPrimitives ModelPrimitives::with_t(double t_new) const {
    ModelPrimitives p = *this;
    p.t = t_new;
    return p;
}

ModelPrimitives ModelPrimitives::with_tau(double tau_new) const {
    ModelPrimitives p = *this;
    p.tau = tau_new;
    return p;
}

ModelPrimitives ModelPrimitives::with_alpha(double alpha_new) const {
    ModelPrimitives p = *this;
    p.alpha = alpha_new;
    return p;
}

ModelPrimitives ModelPrimitives::from_json(const nlohmann::json& j) {
    ModelPrimitives p;
    try {
        p.alpha = j.at("alpha").get<double>();
        p.t = j.value("t", p.t);
        p.tau = j.value("tau", p.tau);
        p.k_fixed = j.value("k_fixed", p.k_fixed);
        if (j.contains("value_params")) {
            const auto& v = j.at("value_params");
            p.value_params.v0 = v.value("v0", p.value_params.v0);
            p.value_params.a1 = v.value("a1", p.value_params.a1);
            p.value_params.a2 = v.value("a2", p.value_params.a2);
        }
        if (j.contains("cost_params")) {
            const auto& c = j.at("cost_params");
            const std::string family = c.value("family", "exponential");
            if (family == "exponential") {
                p.cost_params.family = CostFamily::Exponential;
                p.cost_params.c0 = c.value("c0", p.cost_params.c0);
                p.cost_params.lambda = c.value("lambda", p.cost_params.lambda);
            } else if (family == "quadratic") {
                p.cost_params.family = CostFamily::Quadratic;
                p.cost_params.c0 = c.value("c0", p.cost_params.c0);
                p.cost_params.b1 = c.value("b1", 0.5);
                p.cost_params.b2 = c.value("b2", 0.25);
            } else {
                throw ConfigError("unknown cost family: " + family);
            }
        }
        if (j.contains("price_dist")) {
            const auto& f = j.at("price_dist");
            const std::string family = f.value("family", "exponential");
            if (family != "exponential")
                throw ConfigError("unknown price distribution family: " + family);
            p.price_dist.mean = f.value("mean", p.price_dist.mean);
        }
        p.e_max = j.value("e_max", p.e_max);
        p.constrained_variant = j.value("constrained_variant", false);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad primitives config: ") + e.what());
    }
    p.validate();
    return p;
}

nlohmann::json ModelPrimitives::to_json() const {
    nlohmann::json j;
    j["alpha"] = alpha;
    j["t"] = t;
    j["tau"] = tau;
    j["k_fixed"] = k_fixed;
    j["value_params"] = {{"v0", value_params.v0},
                         {"a1", value_params.a1},
                         {"a2", value_params.a2}};
    if (cost_params.family == CostFamily::Exponential) {
        j["cost_params"] = {{"family", "exponential"},
                            {"c0", cost_params.c0},
                            {"lambda", cost_params.lambda}};
    } else {
        j["cost_params"] = {{"family", "quadratic"},
                            {"c0", cost_params.c0},
                            {"b1", cost_params.b1},
                            {"b2", cost_params.b2}};
    }
    j["price_dist"] = {{"family", "exponential"}, {"mean", price_dist.mean}};
    j["e_max"] = e_max;
    j["constrained_variant"] = constrained_variant;
    return j;
}

}  // namespace vilab
