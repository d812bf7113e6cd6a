#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "vilab/common.hpp"
#include "vilab/estimate.hpp"
#include "vilab/synth.hpp"

using namespace vilab;

namespace {

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = mean(a), mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("rng determinism and distribution sanity") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());

    Rng r(7);
    double sum = 0.0, sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.03);
    CHECK(std::abs(sq / n - 1.0) < 0.05);

    Rng p(11);
    double psum = 0.0;
    for (int i = 0; i < n; ++i) psum += p.poisson(2.5);
    CHECK(std::abs(psum / n - 2.5) < 0.05);

    // forked streams differ from the parent and from each other
    Rng root(5);
    Rng f1 = root.fork(1), f2 = root.fork(2);
    CHECK(f1.uniform() != f2.uniform());
}

TEST_CASE("same seed gives an identical panel") {
    SynthConfig config;
    config.n_firms = 60;
    config.n_industries = 10;
    const auto a = synth_dgp(config, 42);
    const auto b = synth_dgp(config, 42);
    REQUIRE(a.rows() == b.rows());
    for (const auto& name : a.names()) {
        if (a.is_numeric(name)) {
            CHECK(a.num(name) == b.num(name));
        } else {
            CHECK(a.str(name) == b.str(name));
        }
    }
    const auto c = synth_dgp(config, 43);
    CHECK(a.num("backward_count") != c.num("backward_count"));
}

TEST_CASE("generated tariffs match the configured level and decline") {
    SynthConfig config;
    config.n_firms = 400;
    config.n_industries = 40;
    const auto panel = synth_dgp(config, 7);
    const auto& tariff = panel.num("downstream_tariff");
    CHECK(std::abs(mean(tariff) - config.tariff_mean) < 0.5);

    // time-mean declines: first-year average above last-year average
    const auto& year = panel.num("year");
    double first = 0.0, last = 0.0;
    int nf = 0, nl = 0;
    for (std::size_t i = 0; i < panel.rows(); ++i) {
        if (year[i] == config.year_min) {
            first += tariff[i];
            ++nf;
        }
        if (year[i] == config.year_max) {
            last += tariff[i];
            ++nl;
        }
    }
    CHECK(first / nf > last / nl);
}

TEST_CASE("null coefficient stays insignificant at the nominal rate") {
    SynthConfig config;
    config.n_firms = 120;
    config.n_industries = 12;
    config.beta_tariff = 0.0;
    config.sigma_firm = 0.0;
    config.sigma_industry = 0.0;
    config.sigma_year = 0.0;
    int significant = 0;
    const int reps = 100;
    for (int rep = 0; rep < reps; ++rep) {
        const auto panel = synth_dgp(config, 1000 + rep);
        const auto& y = panel.num("backward_count");
        const auto& x = panel.num("downstream_tariff");
        const double r = correlation(x, y);
        const double n = static_cast<double>(y.size());
        const double t = r * std::sqrt((n - 2.0) / (1.0 - r * r));
        if (std::abs(t) > 1.96) ++significant;
    }
    // ~5% nominal size; allow wide slack for 100 replications
    CHECK(significant <= 12);
}

TEST_CASE("planted coefficient is recovered by the estimator") {
    SynthConfig config;
    config.n_firms = 300;
    config.n_industries = 30;
    const auto panel = synth_dgp(config, 2024);
    EstimationSpec spec;
    spec.outcome = "backward_count";
    spec.regressors = {"downstream_tariff"};
    for (const auto& c : SynthConfig::default_controls())
        spec.regressors.push_back(c.name);
    spec.fixed_effects = {"firm_id", "industry_code", "year"};
    spec.cluster = "firm_id";
    const auto res = estimate(panel, spec);
    const int idx = res.term_index("downstream_tariff");
    CHECK(std::abs(res.coef(idx) - config.beta_tariff) <= 2.5 * res.se(idx));
}

TEST_CASE("config json round trip") {
    SynthConfig config;
    config.n_firms = 10;
    config.n_industries = 5;
    config.beta_tariff = -0.1;
    const auto j = config.to_json();
    const auto back = SynthConfig::from_json(j);
    CHECK(back.n_firms == 10);
    CHECK(back.beta_tariff == -0.1);
    CHECK(back.controls.size() == SynthConfig::default_controls().size());

    nlohmann::json bad = j;
    bad["n_firms"] = 0;
    CHECK_THROWS_AS(SynthConfig::from_json(bad), ConfigError);
}
