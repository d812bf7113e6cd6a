#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "vilab/common.hpp"
#include "vilab/estimate.hpp"
#include "vilab/synth.hpp"

using namespace vilab;

namespace {

// Independent check: straight Newton ascent on the Poisson log-likelihood
// with an explicit dense design, no IRLS, no absorption.
Eigen::VectorXd newton_poisson(const Eigen::VectorXd& y,
                               const Eigen::MatrixXd& x) {
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
    for (int iter = 0; iter < 200; ++iter) {
        const Eigen::VectorXd mu = (x * beta).array().exp().matrix();
        const Eigen::VectorXd grad = x.transpose() * (y - mu);
        const Eigen::MatrixXd hess = x.transpose() * mu.asDiagonal() * x;
        const Eigen::VectorXd step = hess.ldlt().solve(grad);
        beta += step;
        if (step.cwiseAbs().maxCoeff() < 1e-12) break;
    }
    return beta;
}

ColumnTable poisson_panel(std::mt19937& rng, int n, double beta_x,
                          int n_groups = 0) {
    std::normal_distribution<double> nx(0.0, 1.0);
    std::vector<double> y(n), x(n), w(n);
    std::vector<std::string> group(n);
    std::vector<double> group_effect(std::max(n_groups, 1), 0.0);
    for (auto& g : group_effect) g = 0.5 * nx(rng);
    for (int i = 0; i < n; ++i) {
        x[i] = nx(rng);
        w[i] = nx(rng);
        const int g = n_groups > 0 ? i % n_groups : 0;
        group[i] = "g" + std::to_string(g);
        const double eta = -0.7 + beta_x * x[i] + 0.3 * w[i] +
                           (n_groups > 0 ? group_effect[g] : 0.0);
        std::poisson_distribution<int> draw(std::exp(eta));
        y[i] = draw(rng);
    }
    ColumnTable t;
    t.add_num("y", std::move(y));
    t.add_num("x", std::move(x));
    t.add_num("w", std::move(w));
    t.add_str("group", std::move(group));
    return t;
}

}  // namespace

TEST_CASE("intercept-only PPML recovers the log mean") {
    ColumnTable t;
    t.add_num("y", {0, 1, 2, 3});
    EstimationSpec spec;
    spec.outcome = "y";
    const auto res = estimate(t, spec);
    CHECK(res.terms.at(0) == "const");
    CHECK(res.coef(0) == doctest::Approx(std::log(1.5)).epsilon(1e-9));
    CHECK(res.pseudo_r2 == doctest::Approx(0.0));
}

TEST_CASE("no-FE PPML matches an independent Newton fit") {
    std::mt19937 rng(31);
    const auto panel = poisson_panel(rng, 200, 0.4);
    EstimationSpec spec;
    spec.outcome = "y";
    spec.regressors = {"x", "w"};
    const auto res = estimate(panel, spec);

    Eigen::MatrixXd x(200, 3);
    Eigen::VectorXd y(200);
    for (int i = 0; i < 200; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = panel.num("x")[i];
        x(i, 2) = panel.num("w")[i];
        y(i) = panel.num("y")[i];
    }
    const auto beta = newton_poisson(y, x);
    CHECK(std::abs(res.coef(0) - beta(0)) < 1e-6);
    CHECK(std::abs(res.coef(1) - beta(1)) < 1e-6);
    CHECK(std::abs(res.coef(2) - beta(2)) < 1e-6);
}

TEST_CASE("absorbed fixed effects equal explicit dummies") {
    std::mt19937 rng(77);
    auto panel = poisson_panel(rng, 400, -0.5, 8);
    // second dimension: blocks of 16, not collinear with the first
    std::vector<std::string> period(400);
    for (int i = 0; i < 400; ++i)
        period[i] = "p" + std::to_string((i / 16) % 5);
    panel.add_str("period", std::move(period));

    EstimationSpec spec;
    spec.outcome = "y";
    spec.regressors = {"x", "w"};
    spec.fixed_effects = {"group", "period"};
    const auto absorbed = estimate(panel, spec);
    spec.absorb = false;
    const auto dummies = estimate(panel, spec);

    const int ix = dummies.term_index("x");
    const int iw = dummies.term_index("w");
    CHECK(std::abs(absorbed.coef(absorbed.term_index("x")) - dummies.coef(ix)) <
          1e-6);
    CHECK(std::abs(absorbed.coef(absorbed.term_index("w")) - dummies.coef(iw)) <
          1e-6);
    // the score identity holds on the absorbed regressors
    CHECK(absorbed.score_max_abs < 1e-8);
    // clustered inference agrees across the two routes
    EstimationSpec cspec = spec;
    cspec.absorb = true;
    cspec.cluster = "group";
    const auto ca = estimate(panel, cspec);
    cspec.absorb = false;
    const auto cd = estimate(panel, cspec);
    CHECK(std::abs(ca.se(ca.term_index("x")) - cd.se(cd.term_index("x"))) <
          1e-6 * std::max(1.0, ca.se(ca.term_index("x"))));
}

TEST_CASE("all-zero outcome groups are dropped and reported") {
    ColumnTable t;
    t.add_num("y", {0, 0, 1, 2, 0, 3});
    t.add_num("x", {1, 2, 3, 4, 5, 6});
    t.add_str("firm", {"a", "a", "b", "b", "c", "c"});
    EstimationSpec spec;
    spec.outcome = "y";
    spec.regressors = {"x"};
    spec.fixed_effects = {"firm"};
    const auto res = estimate(t, spec);
    CHECK(res.n_used == 4);
    CHECK(res.dropped.separation == 2);
    CHECK(res.n_used + res.dropped.total() == res.n_input);
}

TEST_CASE("cluster covariance conventions") {
    std::mt19937 rng(13);
    const int n = 120;
    Eigen::MatrixXd scores(n, 2);
    Eigen::MatrixXd bread = Eigen::MatrixXd::Identity(2, 2) * 0.01;
    std::normal_distribution<double> nd;
    for (int i = 0; i < n; ++i) {
        scores(i, 0) = nd(rng);
        scores(i, 1) = nd(rng);
    }
    SUBCASE("each row its own cluster equals HC0 times n/(n-1)") {
        std::vector<int> ids(n);
        for (int i = 0; i < n; ++i) ids[i] = i;
        const auto cov = cluster_covariance(bread, scores, ids, n);
        const Eigen::MatrixXd hc0 =
            bread * (scores.transpose() * scores) * bread;
        const Eigen::MatrixXd expected = hc0 * (double(n) / (n - 1));
        CHECK((cov - expected).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("fewer than two clusters is an error") {
        std::vector<int> ids(n, 0);
        CHECK_THROWS_AS(cluster_covariance(bread, scores, ids, 1), DataError);
    }
}

TEST_CASE("duplicating clusters leaves z-statistics invariant") {
    std::mt19937 rng(19);
    auto panel = poisson_panel(rng, 300, 0.3, 10);
    EstimationSpec spec;
    spec.outcome = "y";
    spec.regressors = {"x", "w"};
    spec.fixed_effects = {"group"};
    spec.cluster = "group";
    const auto base = estimate(panel, spec);

    // stack the panel on itself: same clusters, every row twice
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < panel.rows(); ++i) idx.push_back(i);
    for (std::size_t i = 0; i < panel.rows(); ++i) idx.push_back(i);
    const auto doubled = panel.select_rows(idx);
    const auto dup = estimate(doubled, spec);

    const int ix = base.term_index("x");
    CHECK(std::abs(base.coef(ix) - dup.coef(dup.term_index("x"))) < 1e-7);
    CHECK(std::abs(base.z(ix) - dup.z(dup.term_index("x"))) < 1e-6);
}

TEST_CASE("outcome scaling shifts only the intercept") {
    std::mt19937 rng(23);
    const auto panel = poisson_panel(rng, 300, 0.4);
    EstimationSpec spec;
    spec.outcome = "y";
    spec.regressors = {"x", "w"};
    const auto base = estimate(panel, spec);

    ColumnTable scaled;
    std::vector<double> y3;
    for (double v : panel.num("y")) y3.push_back(3.0 * v);
    scaled.add_num("y", std::move(y3));
    scaled.add_num("x", panel.num("x"));
    scaled.add_num("w", panel.num("w"));
    const auto res3 = estimate(scaled, spec);
    CHECK(std::abs(res3.coef(res3.term_index("x")) -
                   base.coef(base.term_index("x"))) < 1e-8);
    CHECK(std::abs(res3.coef(res3.term_index("w")) -
                   base.coef(base.term_index("w"))) < 1e-8);
    CHECK(res3.coef(0) == doctest::Approx(base.coef(0) + std::log(3.0))
                              .epsilon(1e-7));
}

TEST_CASE("pseudo R2") {
    CHECK(pseudo_r2(-50.0, -50.0) == 0.0);
    CHECK(pseudo_r2(-40.0, -50.0) == doctest::Approx(0.2));
    CHECK_THROWS_AS(pseudo_r2(-40.0, 0.0), NumericalError);

    // saturated-style fit on strictly positive outcomes lands in (0, 1]
    ColumnTable t;
    t.add_num("y", {1, 2, 3, 4, 5, 8});
    std::vector<double> x;
    for (double v : t.num("y")) x.push_back(std::log(v));
    t.add_num("x", std::move(x));
    EstimationSpec spec;
    spec.outcome = "y";
    spec.regressors = {"x"};
    const auto res = estimate(t, spec);
    CHECK(res.pseudo_r2 > 0.0);
    CHECK(res.pseudo_r2 <= 1.0);
}

TEST_CASE("within-transformed OLS equals dummy-variable OLS") {
    std::mt19937 rng(29);
    const int n = 240;
    std::normal_distribution<double> nd;
    std::vector<double> y(n), x(n);
    std::vector<std::string> group(n);
    for (int i = 0; i < n; ++i) {
        const int g = i % 6;
        x[i] = nd(rng);
        y[i] = 1.0 + 0.8 * x[i] + 0.4 * g + nd(rng);
        group[i] = "g" + std::to_string(g);
    }
    ColumnTable panel;
    panel.add_num("y", std::move(y));
    panel.add_num("x", std::move(x));
    panel.add_str("group", std::move(group));

    EstimationSpec spec;
    spec.outcome = "y";
    spec.regressors = {"x"};
    spec.fixed_effects = {"group"};
    spec.estimator = Estimator::Ols;
    const auto within = estimate(panel, spec);

    // dummy-variable oracle via the normal equations
    Eigen::MatrixXd design(n, 7);
    Eigen::VectorXd yy(n);
    for (int i = 0; i < n; ++i) {
        design(i, 0) = panel.num("x")[i];
        for (int g = 0; g < 6; ++g)
            design(i, 1 + g) = panel.str("group")[i] == "g" + std::to_string(g)
                                   ? 1.0
                                   : 0.0;
        yy(i) = panel.num("y")[i];
    }
    const Eigen::VectorXd beta =
        (design.transpose() * design).ldlt().solve(design.transpose() * yy);
    CHECK(std::abs(within.coef(within.term_index("x")) - beta(0)) < 1e-8);
}

TEST_CASE("logit recovers the sign of a planted effect") {
    std::mt19937 rng(37);
    std::normal_distribution<double> nd;
    int correct = 0;
    const int reps = 40;
    for (int rep = 0; rep < reps; ++rep) {
        const int n = 800;
        std::vector<double> y(n), x(n);
        std::vector<std::string> period(n);
        for (int i = 0; i < n; ++i) {
            x[i] = nd(rng);
            period[i] = "p" + std::to_string(i % 4);
            const double eta = -1.0 - 0.6 * x[i] + 0.2 * (i % 4);
            const double p = 1.0 / (1.0 + std::exp(-eta));
            std::bernoulli_distribution draw(p);
            y[i] = draw(rng) ? 1.0 : 0.0;
        }
        ColumnTable panel;
        panel.add_num("y", std::move(y));
        panel.add_num("x", std::move(x));
        panel.add_str("period", std::move(period));
        EstimationSpec spec;
        spec.outcome = "y";
        spec.regressors = {"x"};
        spec.fixed_effects = {"period"};
        spec.estimator = Estimator::Logit;
        const auto res = estimate(panel, spec);
        if (res.coef(res.term_index("x")) < 0.0) ++correct;
    }
    CHECK(correct >= static_cast<int>(0.95 * reps));
}

TEST_CASE("logit drops all-one and all-zero groups") {
    ColumnTable t;
    t.add_num("y", {1, 1, 0, 1, 1, 0, 0, 0});
    t.add_num("x", {0.1, 0.4, -0.2, 0.9, -0.5, 0.3, -0.1, 0.2});
    t.add_str("g", {"a", "a", "b", "b", "b", "b", "c", "c"});
    EstimationSpec spec;
    spec.outcome = "y";
    spec.regressors = {"x"};
    spec.fixed_effects = {"g"};
    spec.estimator = Estimator::Logit;
    const auto res = estimate(t, spec);
    CHECK(res.n_used == 4);  // only group b is informative
    CHECK(res.dropped.separation == 4);
}

TEST_CASE("OLS attenuates the count-scale coefficient relative to PPML") {
    SynthConfig config;
    config.n_firms = 200;
    config.n_industries = 20;
    const auto panel = synth_dgp(config, 99);
    EstimationSpec spec;
    spec.outcome = "backward_count";
    spec.regressors = {"downstream_tariff"};
    spec.fixed_effects = {"firm_id", "industry_code", "year"};
    spec.cluster = "firm_id";
    const auto ppml = estimate(panel, spec);
    spec.estimator = Estimator::Ols;
    const auto ols = estimate(panel, spec);
    const double b_ppml = ppml.coef(ppml.term_index("downstream_tariff"));
    const double b_ols = ols.coef(ols.term_index("downstream_tariff"));
    CHECK(b_ppml < 0.0);
    CHECK(b_ols < 0.0);
    CHECK(std::abs(b_ols) < std::abs(b_ppml));
}

TEST_CASE("missing values drop with a count") {
    ColumnTable t;
    t.add_num("y", {1, 2, std::nan(""), 3});
    t.add_num("x", {0.5, std::nan(""), 0.1, 0.2});
    EstimationSpec spec;
    spec.outcome = "y";
    spec.regressors = {"x"};
    const auto res = estimate(t, spec);
    CHECK(res.n_used == 2);
    CHECK(res.dropped.missing == 2);
}
