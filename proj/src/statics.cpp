#include "vilab/statics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vilab/common.hpp"

namespace vilab {

double fd_derivative(const std::function<double(double)>& f, double x,
                     double h) {
    if (!(h > 0.0)) throw ConfigError("fd step must be positive");
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

double fd_derivative_bounded(const std::function<double(double)>& f, double x,
                             double h, double lower, double upper) {
    if (!(h > 0.0)) throw ConfigError("fd step must be positive");
    if (x - h >= lower && x + h <= upper) return fd_derivative(f, x, h);
    if (x + 2 * h <= upper) {
        // second-order forward stencil
        return (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2 * h)) / (2.0 * h);
    }
    if (x - 2 * h >= lower) {
        return (3.0 * f(x) - 4.0 * f(x - h) + f(x - 2 * h)) / (2.0 * h);
    }
    throw ConfigError("fd interval does not fit inside the bounds");
}

namespace {

double en_response_t(const ModelPrimitives& prim, double h) {
    auto en_of_t = [&](double t) {
        return solve_investment(prim.with_t(t), Regime::NonIntegration).e_star;
    };
    return fd_derivative_bounded(en_of_t, prim.t, h, 0.0,
                                 std::numeric_limits<double>::infinity());
}

double en_response_tau(const ModelPrimitives& prim, double h) {
    auto en_of_tau = [&](double tau) {
        return solve_investment(prim.with_tau(tau), Regime::NonIntegration)
            .e_star;
    };
    return fd_derivative_bounded(en_of_tau, prim.tau, h, 0.0,
                                 std::numeric_limits<double>::infinity());
}

void require_solvable_interior(const ModelPrimitives& prim) {
    const auto non = solve_investment(prim, Regime::NonIntegration);
    const auto integ = solve_investment(prim, Regime::Integration);
    // Domain endpoints make the local responses meaningless; constraint-bound
    // solutions still move smoothly with the tariffs and are allowed.
    if ((!non.interior && !non.constraint_bound) || !integ.interior)
        throw NumericalError("comparative statics require non-endpoint equilibria");
}

}  // namespace

double d_delta_u_dt(const ModelPrimitives& prim, double h) {
    require_solvable_interior(prim);
    const double pref = (1.0 - prim.alpha) / prim.alpha;
    return -pref * en_response_t(prim, h);
}

double d_delta_u_dtau(const ModelPrimitives& prim, double h) {
    require_solvable_interior(prim);
    const auto non = solve_investment(prim, Regime::NonIntegration);
    const auto integ = solve_investment(prim, Regime::Integration);
    const auto& dist = prim.price_dist;
    const double gap = dist.cdf(prim.cost(non.e_star) - prim.tau) -
                       dist.cdf(prim.cost(integ.e_star) - prim.tau);
    const double pref = (1.0 - prim.alpha) / prim.alpha;
    return gap - pref * en_response_tau(prim, h);
}

GridSpec GridSpec::from_json(const nlohmann::json& j) {
    GridSpec g;
    try {
        if (j.contains("primitives"))
            g.base = ModelPrimitives::from_json(j.at("primitives"));
        if (j.contains("alphas"))
            g.alphas = j.at("alphas").get<std::vector<double>>();
        g.t_min = j.value("t_min", g.t_min);
        g.t_max = j.value("t_max", g.t_max);
        g.t_step = j.value("t_step", g.t_step);
        g.tau_min = j.value("tau_min", g.tau_min);
        g.tau_max = j.value("tau_max", g.tau_max);
        g.tau_step = j.value("tau_step", g.tau_step);
        g.h_investment = j.value("h_investment", g.h_investment);
        g.h_surplus = j.value("h_surplus", g.h_surplus);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad grid spec: ") + e.what());
    }
    if (g.alphas.empty() || g.t_step <= 0 || g.tau_step <= 0 ||
        g.t_max < g.t_min || g.tau_max < g.tau_min)
        throw ConfigError("grid spec defines an empty grid");
    return g;
}

nlohmann::json GridSpec::to_json() const {
    nlohmann::json j;
    j["primitives"] = base.to_json();
    j["alphas"] = alphas;
    j["t_min"] = t_min;
    j["t_max"] = t_max;
    j["t_step"] = t_step;
    j["tau_min"] = tau_min;
    j["tau_max"] = tau_max;
    j["tau_step"] = tau_step;
    j["h_investment"] = h_investment;
    j["h_surplus"] = h_surplus;
    return j;
}

namespace {

std::vector<double> axis(double lo, double hi, double step) {
    std::vector<double> out;
    for (double x = lo; x <= hi + 1e-12; x += step) out.push_back(x);
    return out;
}

StaticsPoint evaluate_point(const ModelPrimitives& prim, const GridSpec& grid) {
    StaticsPoint pt;
    pt.alpha = prim.alpha;
    pt.t = prim.t;
    pt.tau = prim.tau;
    pt.constrained = prim.constrained_variant;
    try {
        const auto non = solve_investment(prim, Regime::NonIntegration);
        const auto integ = solve_investment(prim, Regime::Integration);
        pt.e_n = non.e_star;
        pt.e_v = integ.e_star;
        pt.delta_u = integ.total_surplus - non.total_surplus;
        pt.en_interior = non.interior;
        pt.ev_interior = integ.interior;
        pt.constraint_bound = non.constraint_bound;
        pt.theorem_ordering = integ.e_star > non.e_star;
        pt.import_risk_active =
            prim.price_dist.cdf(prim.cost(non.e_star) - prim.tau) > 0.0;
        const auto soc_n = soc_check(prim, Regime::NonIntegration);
        const auto soc_v = soc_check(prim, Regime::Integration);
        pt.soc_ok = soc_n.pass && soc_v.pass;

        pt.d_en_dt_fd = en_response_t(prim, grid.h_investment);
        pt.d_en_dtau_fd = en_response_tau(prim, grid.h_investment);
        const double pref = (1.0 - prim.alpha) / prim.alpha;
        pt.d_delta_u_dt_analytic = -pref * pt.d_en_dt_fd;
        const auto& dist = prim.price_dist;
        pt.d_delta_u_dtau_analytic =
            dist.cdf(prim.cost(non.e_star) - prim.tau) -
            dist.cdf(prim.cost(integ.e_star) - prim.tau) -
            pref * pt.d_en_dtau_fd;

        auto du_of_t = [&](double t) { return delta_surplus(prim.with_t(t)); };
        auto du_of_tau = [&](double tau) {
            return delta_surplus(prim.with_tau(tau));
        };
        const double inf = std::numeric_limits<double>::infinity();
        pt.d_delta_u_dt_fd =
            fd_derivative_bounded(du_of_t, prim.t, grid.h_surplus, 0.0, inf);
        pt.d_delta_u_dtau_fd =
            fd_derivative_bounded(du_of_tau, prim.tau, grid.h_surplus, 0.0, inf);
    } catch (const std::exception& e) {
        pt.error = e.what();
    }
    return pt;
}

}  // namespace

SweepResult hypothesis_sweep(const GridSpec& grid) {
    const std::vector<double> ts = axis(grid.t_min, grid.t_max, grid.t_step);
    const std::vector<double> taus =
        axis(grid.tau_min, grid.tau_max, grid.tau_step);
    if (grid.alphas.empty() || ts.empty() || taus.empty())
        throw ConfigError("empty sweep grid");

    SweepResult result;
    for (double alpha : grid.alphas) {
        for (double t : ts) {
            for (double tau : taus) {
                ModelPrimitives prim = grid.base;
                prim.alpha = alpha;
                prim.t = t;
                prim.tau = tau;
                result.points.push_back(evaluate_point(prim, grid));
            }
        }
    }

    VerdictSummary& v = result.verdict;
    v.total_points = static_cast<int>(result.points.size());
    int n_dt_neg = 0, n_dt_zero = 0, n_dtau_neg = 0;
    int n_active_pos = 0;
    for (const StaticsPoint& pt : result.points) {
        if (!pt.error.empty()) continue;
        ++v.solved_points;
        if (pt.constraint_bound) {
            ++v.constraint_bound_points;
            if (!(pt.d_delta_u_dt_analytic < 0.0))
                v.constraint_dt_negative = false;
        }
        const bool usable = pt.en_interior && pt.ev_interior && pt.soc_ok;
        if (!usable) continue;
        ++v.interior_soc_points;
        if (!pt.theorem_ordering) ++v.theorem_violations;
        if (pt.d_delta_u_dt_analytic < -v.zero_tol) ++n_dt_neg;
        if (std::abs(pt.d_delta_u_dt_analytic) <= v.zero_tol) ++n_dt_zero;
        if (pt.d_delta_u_dtau_analytic < -v.zero_tol) ++n_dtau_neg;
        if (pt.import_risk_active) {
            ++v.import_active_points;
            if (pt.d_en_dtau_fd > v.zero_tol) {
                ++n_active_pos;
            } else {
                ++v.den_dtau_nonpositive_active;
            }
        } else if (std::abs(pt.d_en_dtau_fd) > v.zero_tol) {
            ++v.den_dtau_nonzero_inactive;
        }
    }
    if (v.interior_soc_points > 0) {
        v.frac_dt_negative = double(n_dt_neg) / v.interior_soc_points;
        v.frac_dt_zero = double(n_dt_zero) / v.interior_soc_points;
        v.frac_dtau_negative = double(n_dtau_neg) / v.interior_soc_points;
    }
    if (v.import_active_points > 0) {
        v.frac_den_dtau_positive_active =
            double(n_active_pos) / v.import_active_points;
    }

    v.alpha_levels = grid.alphas;
    for (double a : grid.alphas) v.prefactor_by_alpha.push_back((1.0 - a) / a);
    v.prefactor_monotone = true;
    std::vector<double> sorted_alpha = grid.alphas;
    std::sort(sorted_alpha.begin(), sorted_alpha.end());
    for (std::size_t i = 1; i < sorted_alpha.size(); ++i) {
        const double lo = (1.0 - sorted_alpha[i - 1]) / sorted_alpha[i - 1];
        const double hi = (1.0 - sorted_alpha[i]) / sorted_alpha[i];
        if (!(lo > hi)) v.prefactor_monotone = false;
    }
    return result;
}

std::string VerdictSummary::to_markdown() const {
    std::ostringstream os;
    os.precision(6);
    os << "# Hypothesis sweep verdicts\n\n";
    os << "- grid points: " << total_points << " (solved " << solved_points
       << ", interior+SOC " << interior_soc_points << ")\n";
    os << "- investment ordering e_v > e_n: "
       << (theorem_violations == 0 ? "holds" : "VIOLATED") << " ("
       << theorem_violations << " violations among interior SOC points)\n\n";
    os << "## H1: surplus-gap response to the downstream tariff\n";
    os << "- share negative: " << frac_dt_negative << "\n";
    os << "- share zero (|.| <= " << zero_tol << "): " << frac_dt_zero << "\n";
    os << "- constraint-bound points: " << constraint_bound_points
       << "; gap response negative at all of them: "
       << (constraint_bound_points > 0
               ? (constraint_dt_negative ? "yes" : "NO")
               : "n/a")
       << "\n\n";
    os << "## H2: surplus-gap response to the upstream tariff\n";
    os << "- share negative: " << frac_dtau_negative << "\n";
    os << "- import-risk-active interior points: " << import_active_points
       << "; share with d e_n/d tau > 0: " << frac_den_dtau_positive_active
       << "\n";
    os << "- active points with nonpositive investment response: "
       << den_dtau_nonpositive_active << "\n";
    os << "- inactive points with nonzero investment response: "
       << den_dtau_nonzero_inactive << "\n\n";
    os << "## H3: bargaining-weight channel\n";
    os << "- alpha levels:";
    for (double a : alpha_levels) os << " " << a;
    os << "\n- prefactor (1-alpha)/alpha:";
    for (double p : prefactor_by_alpha) os << " " << p;
    os << "\n- magnitude grows as alpha falls: "
       << (prefactor_monotone ? "yes" : "NO") << "\n";
    return os.str();
}

}  // namespace vilab
