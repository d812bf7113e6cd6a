#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

namespace vilab {

// Downstream value of production, V(t) = v0 - a1*t - a2*t^2.
// Strictly decreasing and strictly concave in the downstream tariff t
// as long as a1, a2 > 0.
struct ValueParams {
    double v0 = 10.0;
    double a1 = 0.5;
    double a2 = 0.05;

    double operator()(double t) const { return v0 - a1 * t - a2 * t * t; }
};

enum class CostFamily { Exponential, Quadratic };

// Seller production cost as a function of relationship-specific investment.
// Exponential: c(e) = c0 * exp(-lambda * e)   (convex, satisfies the
//   second-order condition of the investment problem).
// Quadratic:   c(e) = c0 - b1*e - b2*e^2      (concave; kept to demonstrate
//   the curvature failure of the investment objective).
struct CostParams {
    CostFamily family = CostFamily::Exponential;
    double c0 = 4.0;
    double lambda = 1.5;  // exponential decay
    double b1 = 0.0;      // quadratic slope
    double b2 = 0.0;      // quadratic curvature

    double operator()(double e) const;
    double deriv(double e) const;
};

enum class PriceFamily { Exponential };

// Distribution of the foreign input price p_f, supported on [0, inf).
struct PriceDist {
    PriceFamily family = PriceFamily::Exponential;
    double mean = 5.0;

    double cdf(double x) const;
    double pdf(double x) const;
    double survival(double x) const;  // 1 - cdf, exact in the tail
};

// All symbols of the two-firm sourcing game: bargaining weight, tariffs,
// integration fixed cost, functional forms, and the investment search domain.
struct ModelPrimitives {
    double alpha = 0.5;    // seller bargaining weight
    double t = 1.0;        // downstream tariff
    double tau = 0.0;      // upstream tariff
    double k_fixed = 0.5;  // integration fixed cost K
    ValueParams value_params;
    CostParams cost_params;
    PriceDist price_dist;
    double e_max = 6.0;
    bool constrained_variant = false;  // restrict investment to c(e) <= V(t)

    double value() const { return value_params(t); }
    double cost(double e) const { return cost_params(e); }
    double cost_deriv(double e) const { return cost_params.deriv(e); }

    // Checks the shape restrictions: alpha in (0,1), V' < 0 and V'' < 0 on a
    // sample grid, c strictly decreasing and positive at e_max, F a proper
    // distribution on [0, inf). Throws ConfigError on violation.
    void validate() const;

    ModelPrimitives with_t(double t_new) const;
    ModelPrimitives with_tau(double tau_new) const;
    ModelPrimitives with_alpha(double alpha_new) const;

    static ModelPrimitives from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

}  // namespace vilab
