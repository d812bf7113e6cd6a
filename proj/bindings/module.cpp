// Python bindings for the main operations: bargaining-model solutions and
// comparative statics, upstreamness, tariff aggregation, the synthetic panel
// generator, and the estimators. Configs travel as JSON strings; tabular data
// as dicts of column lists.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "vilab/bargain.hpp"
#include "vilab/common.hpp"
#include "vilab/deals.hpp"
#include "vilab/estimate.hpp"
#include "vilab/io_table.hpp"
#include "vilab/panel.hpp"
#include "vilab/statics.hpp"
#include "vilab/synth.hpp"
#include "vilab/tariff.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace vilab;

namespace {

ModelPrimitives primitives_from(const std::string& config) {
    return ModelPrimitives::from_json(json::parse(config));
}

py::dict solution_dict(const EquilibriumSolution& sol) {
    py::dict d;
    d["e_star"] = sol.e_star;
    d["interior"] = sol.interior;
    d["constraint_bound"] = sol.constraint_bound;
    d["seller_profit"] = sol.seller_profit;
    d["buyer_profit"] = sol.buyer_profit;
    d["total_surplus"] = sol.total_surplus;
    d["foc_residual"] = sol.foc_residual;
    return d;
}

ColumnTable table_from(const py::dict& data) {
    ColumnTable table;
    for (const auto& item : data) {
        const auto name = item.first.cast<std::string>();
        const py::list values = item.second.cast<py::list>();
        if (values.size() > 0 && py::isinstance<py::str>(values[0])) {
            table.add_str(name, values.cast<std::vector<std::string>>());
        } else {
            table.add_num(name, values.cast<std::vector<double>>());
        }
    }
    return table;
}

py::dict table_to(const ColumnTable& table) {
    py::dict d;
    for (const auto& name : table.names()) {
        if (table.is_numeric(name)) {
            d[name.c_str()] = table.num(name);
        } else {
            d[name.c_str()] = table.str(name);
        }
    }
    return d;
}

py::dict result_dict(const EstimationResult& result) {
    py::dict d;
    d["terms"] = result.terms;
    d["coef"] = std::vector<double>(result.coef.data(),
                                    result.coef.data() + result.coef.size());
    d["se"] =
        std::vector<double>(result.se.data(), result.se.data() + result.se.size());
    d["z"] =
        std::vector<double>(result.z.data(), result.z.data() + result.z.size());
    d["loglik"] = result.loglik;
    d["loglik_null"] = result.loglik_null;
    d["pseudo_r2"] = result.pseudo_r2;
    d["n_used"] = result.n_used;
    d["n_input"] = result.n_input;
    d["dropped_missing"] = result.dropped.missing;
    d["dropped_separation"] = result.dropped.separation;
    d["iterations"] = result.iterations;
    d["n_clusters"] = result.n_clusters;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "bargaining-model laboratory: sourcing, tariffs, upstreamness, "
              "count-data estimation";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<DataError>(m, "DataError");
    py::register_exception<NumericalError>(m, "NumericalError");

    m.def(
        "solve",
        [](const std::string& config) {
            const auto prim = primitives_from(config);
            py::dict d;
            d["non_integration"] = solution_dict(
                solve_investment(prim, Regime::NonIntegration));
            d["integration"] =
                solution_dict(solve_investment(prim, Regime::Integration));
            d["delta_surplus"] = delta_surplus(prim);
            d["choice"] = organizational_choice(prim) == OrgChoice::Integrate
                              ? "integrate"
                              : "not_integrate";
            return d;
        },
        py::arg("config"),
        "Solve both regimes of the sourcing game for a primitives JSON "
        "string.");

    m.def(
        "seller_expected_profit",
        [](const std::string& config, double e) {
            return seller_expected_profit(primitives_from(config), e);
        },
        py::arg("config"), py::arg("e"));
    m.def(
        "buyer_expected_profit",
        [](const std::string& config, double e) {
            return buyer_expected_profit(primitives_from(config), e);
        },
        py::arg("config"), py::arg("e"));
    m.def(
        "integrated_expected_profit",
        [](const std::string& config, double e) {
            return integrated_expected_profit(primitives_from(config), e);
        },
        py::arg("config"), py::arg("e"));

    m.def(
        "surplus_gap_responses",
        [](const std::string& config) {
            const auto prim = primitives_from(config);
            py::dict d;
            d["dt"] = d_delta_u_dt(prim);
            d["dtau"] = d_delta_u_dtau(prim);
            return d;
        },
        py::arg("config"),
        "Analytic responses of the surplus gap to both tariffs.");

    m.def(
        "hypothesis_sweep",
        [](const std::string& grid_config) {
            const auto grid = GridSpec::from_json(json::parse(grid_config));
            const auto result = hypothesis_sweep(grid);
            py::dict d;
            d["markdown"] = result.verdict.to_markdown();
            d["interior_soc_points"] = result.verdict.interior_soc_points;
            d["theorem_violations"] = result.verdict.theorem_violations;
            d["frac_dt_negative"] = result.verdict.frac_dt_negative;
            d["frac_dt_zero"] = result.verdict.frac_dt_zero;
            d["frac_dtau_negative"] = result.verdict.frac_dtau_negative;
            d["frac_den_dtau_positive_active"] =
                result.verdict.frac_den_dtau_positive_active;
            return d;
        },
        py::arg("grid_config"));

    m.def(
        "upstreamness",
        [](const Eigen::MatrixXd& flows, const Eigen::VectorXd& final_demand,
           const Eigen::VectorXd& total_output, const std::string& method,
           int max_terms) {
            IoTable io;
            io.year = 0;
            for (Eigen::Index i = 0; i < flows.rows(); ++i)
                io.sectors.push_back("s" + std::to_string(i));
            io.flows = flows;
            io.final_demand = final_demand;
            io.total_output = total_output;
            return upstreamness(
                io, method == "series" ? UpsMethod::Series : UpsMethod::Solve,
                max_terms);
        },
        py::arg("flows"), py::arg("final_demand"), py::arg("total_output"),
        py::arg("method") = "solve", py::arg("max_terms") = 200,
        "Production-chain position of each sector; 1 means purely final use.");

    m.def(
        "direct_requirements",
        [](const Eigen::MatrixXd& flows, const Eigen::VectorXd& final_demand,
           const Eigen::VectorXd& total_output) {
            IoTable io;
            io.year = 0;
            for (Eigen::Index i = 0; i < flows.rows(); ++i)
                io.sectors.push_back("s" + std::to_string(i));
            io.flows = flows;
            io.final_demand = final_demand;
            io.total_output = total_output;
            return direct_requirements(io);
        },
        py::arg("flows"), py::arg("final_demand"), py::arg("total_output"));

    m.def("upstream_tariff", &upstream_tariff, py::arg("tariff_by_sector"),
          py::arg("requirements"));

    m.def(
        "upstream_quartiles",
        [](const std::map<std::string, double>& ups) {
            return upstream_quartiles(ups);
        },
        py::arg("ups"));

    m.def(
        "classify_deal",
        [](const std::string& acquirer_industry,
           const std::string& target_industry,
           const std::map<std::string, double>& ups) {
            DealRecord deal;
            deal.deal_id = "py";
            deal.acquirer_industry = acquirer_industry;
            deal.target_industry = target_industry;
            switch (classify_deal(deal, ups)) {
                case DealDirection::Backward: return std::string("backward");
                case DealDirection::Forward: return std::string("forward");
                case DealDirection::Horizontal: break;
            }
            return std::string("horizontal");
        },
        py::arg("acquirer_industry"), py::arg("target_industry"),
        py::arg("ups"));

    m.def(
        "synth_panel",
        [](const std::string& config, std::uint64_t seed) {
            return table_to(
                synth_dgp(SynthConfig::from_json(json::parse(config)), seed));
        },
        py::arg("config") = "{}", py::arg("seed") = 1,
        "Synthetic firm-year panel with a planted tariff coefficient.");

    m.def(
        "estimate",
        [](const py::dict& panel, const std::string& spec_config) {
            const json j = json::parse(spec_config);
            EstimationSpec spec;
            spec.outcome = j.value("outcome", "backward_count");
            spec.regressors =
                j.value("regressors", std::vector<std::string>{});
            spec.fixed_effects =
                j.value("fixed_effects", std::vector<std::string>{});
            spec.cluster = j.value("cluster", "");
            const std::string estimator = j.value("estimator", "ppml");
            if (estimator == "ppml") spec.estimator = Estimator::Ppml;
            else if (estimator == "ols") spec.estimator = Estimator::Ols;
            else if (estimator == "logit") spec.estimator = Estimator::Logit;
            else throw ConfigError("unknown estimator: " + estimator);
            spec.tol = j.value("tol", spec.tol);
            spec.max_iter = j.value("max_iter", spec.max_iter);
            spec.absorb = j.value("absorb", spec.absorb);
            spec.null_model = j.value("null_model", spec.null_model);
            return result_dict(estimate(table_from(panel), spec));
        },
        py::arg("panel"), py::arg("spec"),
        "Fit PPML/OLS/logit with fixed effects and clustered errors on a "
        "dict-of-columns panel.");

    m.attr("__version__") = kVersion;
}
