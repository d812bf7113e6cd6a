#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vilab/bargain.hpp"
#include "vilab/primitives.hpp"

namespace vilab {

// Central difference (f(x+h) - f(x-h)) / 2h.
double fd_derivative(const std::function<double(double)>& f, double x,
                     double h);

// Same, but switches to a second-order one-sided stencil when x - h (or
// x + h) would leave [lower, upper]. Used for derivatives in t and tau,
// which live on [0, inf).
double fd_derivative_bounded(const std::function<double(double)>& f, double x,
                             double h, double lower, double upper);

// Response of the surplus gap U^v - U^n to the downstream tariff via the
// seller-investment channel: -(1-alpha)/alpha * d e^n / dt, with the
// investment response taken by central difference of solve_investment.
double d_delta_u_dt(const ModelPrimitives& prim, double h = 1e-4);

// Response of the surplus gap to the upstream tariff: the import-probability
// gap F(c(e^n)-tau) - F(c(e^v)-tau) minus the investment channel
// (1-alpha)/alpha * d e^n / dtau.
double d_delta_u_dtau(const ModelPrimitives& prim, double h = 1e-4);

struct StaticsPoint {
    double alpha = 0.0, t = 0.0, tau = 0.0;
    bool constrained = false;
    double e_n = 0.0, e_v = 0.0, delta_u = 0.0;
    bool en_interior = false, ev_interior = false;
    bool soc_ok = false;              // both regimes pass the SOC diagnostic
    bool constraint_bound = false;    // e^n pinned at c(e) = V(t)
    bool import_risk_active = false;  // F(c(e^n) - tau) > 0
    double d_delta_u_dt_analytic = 0.0, d_delta_u_dt_fd = 0.0;
    double d_delta_u_dtau_analytic = 0.0, d_delta_u_dtau_fd = 0.0;
    double d_en_dt_fd = 0.0, d_en_dtau_fd = 0.0;
    bool theorem_ordering = false;  // e^v > e^n
    std::string error;              // non-empty when the point failed to solve
};

struct GridSpec {
    ModelPrimitives base;
    std::vector<double> alphas = {0.3, 0.5, 0.7};
    double t_min = 0.0, t_max = 2.0, t_step = 0.25;
    double tau_min = 0.0, tau_max = 2.0, tau_step = 0.25;
    double h_investment = 1e-4;  // FD step for e^n responses
    double h_surplus = 1e-3;     // FD step for the surplus gap

    static GridSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

// Grid-level adjudication of the three tariff hypotheses. Fractions are
// taken over interior, SOC-passing points; the import-investment channel
// additionally conditions on active import risk (tau below the prohibitive
// level c(e^n)), outside of which the channel is identically zero.
struct VerdictSummary {
    int total_points = 0;
    int solved_points = 0;
    int interior_soc_points = 0;
    int import_active_points = 0;
    int constraint_bound_points = 0;
    int theorem_violations = 0;  // among interior SOC-passing points

    double frac_dt_negative = 0.0;   // share of interior points, gap falls in t
    double frac_dt_zero = 0.0;       // share with |d gap/dt| <= zero_tol
    double frac_dtau_negative = 0.0; // share of interior points, gap falls in tau
    double frac_den_dtau_positive_active = 0.0;  // among import-active points
    int den_dtau_nonpositive_active = 0;
    int den_dtau_nonzero_inactive = 0;
    bool constraint_dt_negative = true;  // gap response < 0 at every bound point

    // Bargaining-weight channel: (1-alpha)/alpha by alpha level, and whether
    // the gap response magnitude grows as alpha falls.
    std::vector<double> alpha_levels;
    std::vector<double> prefactor_by_alpha;
    bool prefactor_monotone = false;

    double zero_tol = 1e-6;

    std::string to_markdown() const;
};

struct SweepResult {
    std::vector<StaticsPoint> points;
    VerdictSummary verdict;
};

SweepResult hypothesis_sweep(const GridSpec& grid);

}  // namespace vilab
