#pragma once

#include "vilab/primitives.hpp"

namespace vilab {

enum class Regime { NonIntegration, Integration };

// Ex-post sourcing outcome for a realized foreign price.
//   Import:           p_f + tau <= c(e)        (buyer imports)
//   DomesticInterior: c(e) < p_f + tau <= V(t) (domestic trade, price tracks p_f)
//   DomesticCapped:   p_f + tau > V(t)         (domestic trade, price capped by V)
enum class SourcingCase { Import, DomesticInterior, DomesticCapped };

enum class OrgChoice { Integrate, NotIntegrate };

struct EquilibriumSolution {
    Regime regime = Regime::NonIntegration;
    double e_star = 0.0;
    // True when e_star satisfies the first-order condition strictly inside
    // [0, e_max]. False for domain endpoints and for solutions pinned at the
    // c(e) <= V(t) constraint boundary.
    bool interior = false;
    // Constrained variant only: e_star sits at the smallest feasible
    // investment, where c(e) = V(t) binds.
    bool constraint_bound = false;
    double seller_profit = 0.0;  // NonIntegration only
    double buyer_profit = 0.0;   // NonIntegration only
    double total_surplus = 0.0;
    double foc_residual = 0.0;
};

struct SocReport {
    bool at_root = false;        // a first-order-condition root exists in the domain
    double e = 0.0;              // evaluation point (root, or chosen optimum)
    double second_difference = 0.0;
    bool pass = false;           // second difference negative (local concavity)
};

// Bargained price of the specialized input for a realized foreign price p_f.
double price_schedule(const ModelPrimitives& prim, double e, double p_f);

SourcingCase ex_post_sourcing(const ModelPrimitives& prim, double e, double p_f);

// Expected profits over the foreign-price distribution. The finite segments
// are integrated by adaptive quadrature; the upper tail, where the integrand
// is constant, uses the survival function analytically.
double seller_expected_profit(const ModelPrimitives& prim, double e);
double buyer_expected_profit(const ModelPrimitives& prim, double e);
double integrated_expected_profit(const ModelPrimitives& prim, double e);

// Optimal investment for the given regime: sign-scan plus bisection on the
// first-order condition, with endpoint comparison. Under constrained_variant
// the search is restricted to {e : c(e) <= V(t)}.
EquilibriumSolution solve_investment(const ModelPrimitives& prim, Regime regime);

// Joint-surplus difference between integration and non-integration at the
// respective optimal investments. Independent of k_fixed.
double delta_surplus(const ModelPrimitives& prim);

// Integrate iff the surplus difference strictly exceeds the fixed cost;
// ties resolve to NotIntegrate.
OrgChoice organizational_choice(const ModelPrimitives& prim);

// Second-order-condition diagnostic: central second difference of the regime
// objective at the FOC root (or at the chosen optimum when no root exists).
SocReport soc_check(const ModelPrimitives& prim, Regime regime);

// Left-hand side of both investment first-order conditions,
// -c'(e) * [1 - F(c(e) - tau)]. Equals 1/alpha at e^n and 1 at e^v.
double foc_lhs(const ModelPrimitives& prim, double e);

}  // namespace vilab
