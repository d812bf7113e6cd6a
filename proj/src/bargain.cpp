#include "vilab/bargain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "vilab/common.hpp"
#include "vilab/quadrature.hpp"

namespace vilab {
namespace {

constexpr double kRootTol = 1e-12;
constexpr double kQuadTol = 1e-12;
constexpr double kFeasSlack = 1e-12;

void check_e(const ModelPrimitives& prim, double e) {
    if (!(e >= 0.0 && e <= prim.e_max))
        throw DataError("investment e outside [0, e_max]");
}

void check_feasible(const ModelPrimitives& prim, double e) {
    if (prim.cost(e) > prim.value() + kFeasSlack)
        throw DataError("infeasible primitives: c(e) > V(t)");
}

// Integration bracket [max(c-tau,0), max(V-tau,0)] for the domestic-trade
// region in foreign-price space.
struct Brackets {
    double lo;  // import/domestic boundary
    double hi;  // interior/capped boundary
};

Brackets brackets(const ModelPrimitives& prim, double e) {
    const double c = prim.cost(e);
    const double v = prim.value();
    return {std::max(c - prim.tau, 0.0), std::max(v - prim.tau, 0.0)};
}

}  // namespace

double price_schedule(const ModelPrimitives& prim, double e, double p_f) {
    check_e(prim, e);
    if (!(p_f >= 0.0)) throw DataError("foreign price p_f must be >= 0");
    const double c = prim.cost(e);
    const double v = prim.value();
    const double landed = p_f + prim.tau;
    if (v >= landed) return prim.alpha * landed + (1.0 - prim.alpha) * c;
    return prim.alpha * v + (1.0 - prim.alpha) * c;
}

SourcingCase ex_post_sourcing(const ModelPrimitives& prim, double e, double p_f) {
    check_e(prim, e);
    check_feasible(prim, e);
    const double c = prim.cost(e);
    const double v = prim.value();
    const double landed = p_f + prim.tau;
    if (landed <= c) return SourcingCase::Import;
    if (landed <= v) return SourcingCase::DomesticInterior;
    return SourcingCase::DomesticCapped;
}

double seller_expected_profit(const ModelPrimitives& prim, double e) {
    check_e(prim, e);
    check_feasible(prim, e);
    const double c = prim.cost(e);
    const double v = prim.value();
    const auto [lo, hi] = brackets(prim, e);
    const auto& dist = prim.price_dist;
    double mid = 0.0;
    if (hi > lo) {
        mid = integrate(
            [&](double p) { return (p + prim.tau - c) * dist.pdf(p); }, lo, hi,
            kQuadTol);
    }
    return prim.alpha * mid + prim.alpha * (v - c) * dist.survival(hi) - e;
}

double buyer_expected_profit(const ModelPrimitives& prim, double e) {
    check_e(prim, e);
    check_feasible(prim, e);
    const double c = prim.cost(e);
    const double v = prim.value();
    const auto [lo, hi] = brackets(prim, e);
    const auto& dist = prim.price_dist;
    double import_part = 0.0;
    if (lo > 0.0) {
        import_part = integrate(
            [&](double p) { return (v - p - prim.tau) * dist.pdf(p); }, 0.0, lo,
            kQuadTol);
    }
    double domestic_part = 0.0;
    if (hi > lo) {
        domestic_part = integrate(
            [&](double p) {
                return (v - price_schedule(prim, e, p)) * dist.pdf(p);
            },
            lo, hi, kQuadTol);
    }
    const double capped_part =
        (1.0 - prim.alpha) * (v - c) * dist.survival(hi);
    return import_part + domestic_part + capped_part;
}

double integrated_expected_profit(const ModelPrimitives& prim, double e) {
    check_e(prim, e);
    check_feasible(prim, e);
    const double c = prim.cost(e);
    const double v = prim.value();
    const double lo = std::max(c - prim.tau, 0.0);
    const auto& dist = prim.price_dist;
    double import_part = 0.0;
    if (lo > 0.0) {
        import_part = integrate(
            [&](double p) { return (v - p - prim.tau) * dist.pdf(p); }, 0.0, lo,
            kQuadTol);
    }
    return import_part + (v - c) * dist.survival(lo) - e;
}

double foc_lhs(const ModelPrimitives& prim, double e) {
    const double c = prim.cost(e);
    return -prim.cost_deriv(e) * prim.price_dist.survival(c - prim.tau);
}

namespace {

double objective(const ModelPrimitives& prim, Regime regime, double e) {
    return regime == Regime::NonIntegration
               ? seller_expected_profit(prim, e)
               : integrated_expected_profit(prim, e);
}

// Smallest investment with c(e) <= V(t); 0 when already feasible at e = 0.
double feasible_floor(const ModelPrimitives& prim) {
    const double v = prim.value();
    if (prim.cost(0.0) <= v) return 0.0;
    if (prim.cost(prim.e_max) > v)
        throw DataError("constraint c(e) <= V(t) infeasible on [0, e_max]");
    double lo = 0.0, hi = prim.e_max;
    while (hi - lo > kRootTol) {
        const double m = 0.5 * (lo + hi);
        (prim.cost(m) > v ? lo : hi) = m;
    }
    return hi;  // upper end of the bracket: guaranteed c <= V
}

std::vector<double> foc_roots(const ModelPrimitives& prim, double rhs,
                              double lo, double hi) {
    constexpr int kScan = 64;
    std::vector<double> roots;
    auto f = [&](double e) { return foc_lhs(prim, e) - rhs; };
    double prev_e = lo;
    double prev_f = f(lo);
    for (int i = 1; i <= kScan; ++i) {
        const double e = lo + (hi - lo) * i / kScan;
        const double fe = f(e);
        if (prev_f == 0.0) {
            roots.push_back(prev_e);
        } else if (prev_f * fe < 0.0) {
            double a = prev_e, b = e, fa = prev_f;
            while (b - a > kRootTol) {
                const double m = 0.5 * (a + b);
                const double fm = f(m);
                if (fa * fm <= 0.0) {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        prev_e = e;
        prev_f = fe;
    }
    if (prev_f == 0.0) roots.push_back(prev_e);
    return roots;
}

double second_difference(const ModelPrimitives& prim, Regime regime, double e,
                         double lo, double hi) {
    double h = 1e-3;
    h = std::min({h, (e - lo > 0 ? e - lo : h), (hi - e > 0 ? hi - e : h)});
    if (h <= 0.0) h = 1e-3;
    const double f0 = objective(prim, regime, e);
    const double fp = objective(prim, regime, std::min(e + h, hi));
    const double fm = objective(prim, regime, std::max(e - h, lo));
    return (fp - 2.0 * f0 + fm) / (h * h);
}

}  // namespace

EquilibriumSolution solve_investment(const ModelPrimitives& prim,
                                     Regime regime) {
    prim.validate();
    const double rhs =
        regime == Regime::NonIntegration ? 1.0 / prim.alpha : 1.0;
    const double lo = prim.constrained_variant ? feasible_floor(prim) : 0.0;
    const double hi = prim.e_max;
    if (!prim.constrained_variant) check_feasible(prim, 0.0);

    const std::vector<double> roots = foc_roots(prim, rhs, lo, hi);

    struct Candidate {
        double e;
        double obj;
        bool is_root;
        bool soc_ok;
    };
    std::vector<Candidate> candidates;
    for (double r : roots) {
        const bool soc_ok = second_difference(prim, regime, r, lo, hi) < 0.0;
        candidates.push_back({r, objective(prim, regime, r), true, soc_ok});
    }
    candidates.push_back({lo, objective(prim, regime, lo), false, false});
    candidates.push_back({hi, objective(prim, regime, hi), false, false});

    const Candidate* best = &candidates.front();
    for (const Candidate& cand : candidates) {
        if (cand.obj > best->obj ||
            (cand.obj == best->obj && cand.is_root && !best->is_root)) {
            best = &cand;
        }
    }
    if (best->is_root && !best->soc_ok) {
        throw NumericalError(
            "investment objective is locally convex at the chosen FOC root");
    }

    EquilibriumSolution sol;
    sol.regime = regime;
    sol.e_star = best->e;
    sol.foc_residual = foc_lhs(prim, best->e) - rhs;
    sol.interior = best->is_root && best->e > lo + kRootTol &&
                   best->e < hi - kRootTol;
    sol.constraint_bound =
        prim.constrained_variant && !best->is_root && best->e == lo && lo > 0.0;
    if (regime == Regime::NonIntegration) {
        sol.seller_profit = seller_expected_profit(prim, sol.e_star);
        sol.buyer_profit = buyer_expected_profit(prim, sol.e_star);
        sol.total_surplus = sol.seller_profit + sol.buyer_profit;
    } else {
        sol.seller_profit = std::numeric_limits<double>::quiet_NaN();
        sol.buyer_profit = std::numeric_limits<double>::quiet_NaN();
        sol.total_surplus = integrated_expected_profit(prim, sol.e_star);
    }
    return sol;
}

double delta_surplus(const ModelPrimitives& prim) {
    const EquilibriumSolution non = solve_investment(prim, Regime::NonIntegration);
    const EquilibriumSolution integ = solve_investment(prim, Regime::Integration);
    return integ.total_surplus - non.total_surplus;
}

OrgChoice organizational_choice(const ModelPrimitives& prim) {
    const double gap = delta_surplus(prim) - prim.k_fixed;
    if (gap > 1e-12) return OrgChoice::Integrate;
    return OrgChoice::NotIntegrate;
}

SocReport soc_check(const ModelPrimitives& prim, Regime regime) {
    const double rhs =
        regime == Regime::NonIntegration ? 1.0 / prim.alpha : 1.0;
    const double lo = prim.constrained_variant ? feasible_floor(prim) : 0.0;
    const double hi = prim.e_max;
    const std::vector<double> roots = foc_roots(prim, rhs, lo, hi);

    SocReport report;
    if (!roots.empty()) {
        // Report at the best root by objective value.
        double best = roots.front();
        double best_obj = objective(prim, regime, best);
        for (double r : roots) {
            const double obj = objective(prim, regime, r);
            if (obj > best_obj) {
                best = r;
                best_obj = obj;
            }
        }
        report.at_root = true;
        report.e = best;
    } else {
        report.at_root = false;
        report.e = objective(prim, regime, lo) >= objective(prim, regime, hi)
                       ? lo
                       : hi;
    }
    report.second_difference = second_difference(prim, regime, report.e, lo, hi);
    report.pass = report.second_difference < 0.0;
    return report;
}

}  // namespace vilab
