#include "vilab/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "vilab/common.hpp"

namespace vilab {

double Rng::uniform() {
    return std::ldexp(static_cast<double>(engine_() >> 11), -53);
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

int Rng::poisson(double mean) {
    if (mean < 0.0) throw ConfigError("poisson mean must be nonnegative");
    if (mean == 0.0) return 0;
    if (mean < 30.0) {
        const double limit = std::exp(-mean);
        int k = 0;
        double prod = uniform();
        while (prod > limit) {
            ++k;
            prod *= uniform();
        }
        return k;
    }
    // normal approximation for large means, adequate for synthetic counts
    const double draw = mean + std::sqrt(mean) * normal();
    return std::max(0, static_cast<int>(std::lround(draw)));
}

int Rng::uniform_int(int n) {
    if (n <= 0) throw ConfigError("uniform_int needs n > 0");
    const std::uint64_t bound =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % static_cast<std::uint64_t>(n);
    std::uint64_t draw = engine_();
    while (draw >= bound) draw = engine_();
    return static_cast<int>(draw % static_cast<std::uint64_t>(n));
}

Rng Rng::fork(std::uint64_t stream) const {
    // splitmix64 step on (seed, stream) for a decorrelated child seed
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
}

std::vector<ControlSpec> SynthConfig::default_controls() {
    return {
        {"age", 2.445, 0.756, 0.05},       {"size", 14.04, 1.367, 0.02},
        {"skill", 11.74, 1.327, 0.03},     {"leverage", 0.350, 0.131, -0.10},
        {"liquidity", 1.041, 0.430, 0.01}, {"hhi", 0.196, 0.193, -0.05},
    };
}

SynthConfig SynthConfig::from_json(const nlohmann::json& j) {
    SynthConfig c;
    try {
        c.n_firms = j.value("n_firms", c.n_firms);
        c.n_industries = j.value("n_industries", c.n_industries);
        c.year_min = j.value("year_min", c.year_min);
        c.year_max = j.value("year_max", c.year_max);
        c.beta_tariff = j.value("beta_tariff", c.beta_tariff);
        c.beta_upstream = j.value("beta_upstream", c.beta_upstream);
        c.tariff_mean = j.value("tariff_mean", c.tariff_mean);
        c.tariff_base_sd = j.value("tariff_base_sd", c.tariff_base_sd);
        c.tariff_decline = j.value("tariff_decline", c.tariff_decline);
        c.tariff_noise_sd = j.value("tariff_noise_sd", c.tariff_noise_sd);
        c.tariff_noise_rho = j.value("tariff_noise_rho", c.tariff_noise_rho);
        c.sigma_firm = j.value("sigma_firm", c.sigma_firm);
        c.sigma_industry = j.value("sigma_industry", c.sigma_industry);
        c.sigma_year = j.value("sigma_year", c.sigma_year);
        c.mean_outcome = j.value("mean_outcome", c.mean_outcome);
        c.soe_share = j.value("soe_share", c.soe_share);
        c.high_tech_share = j.value("high_tech_share", c.high_tech_share);
        c.differentiated_share =
            j.value("differentiated_share", c.differentiated_share);
        if (j.contains("controls")) {
            for (const auto& jc : j.at("controls")) {
                ControlSpec s;
                s.name = jc.at("name").get<std::string>();
                s.mean = jc.value("mean", 0.0);
                s.sd = jc.value("sd", 1.0);
                s.coef = jc.value("coef", 0.0);
                c.controls.push_back(std::move(s));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad synth config: ") + e.what());
    }
    if (c.n_firms <= 0 || c.n_industries <= 0 || c.year_max < c.year_min)
        throw ConfigError("synth config counts are invalid");
    if (c.n_industries > c.n_firms)
        throw ConfigError("synth config needs at least one firm per industry");
    return c;
}

nlohmann::json SynthConfig::to_json() const {
    nlohmann::json j;
    j["n_firms"] = n_firms;
    j["n_industries"] = n_industries;
    j["year_min"] = year_min;
    j["year_max"] = year_max;
    j["beta_tariff"] = beta_tariff;
    j["beta_upstream"] = beta_upstream;
    j["tariff_mean"] = tariff_mean;
    j["tariff_base_sd"] = tariff_base_sd;
    j["tariff_decline"] = tariff_decline;
    j["tariff_noise_sd"] = tariff_noise_sd;
    j["tariff_noise_rho"] = tariff_noise_rho;
    j["sigma_firm"] = sigma_firm;
    j["sigma_industry"] = sigma_industry;
    j["sigma_year"] = sigma_year;
    j["mean_outcome"] = mean_outcome;
    j["soe_share"] = soe_share;
    j["high_tech_share"] = high_tech_share;
    j["differentiated_share"] = differentiated_share;
    nlohmann::json controls_json = nlohmann::json::array();
    for (const auto& s :
         controls.empty() ? default_controls() : controls) {
        controls_json.push_back({{"name", s.name},
                                 {"mean", s.mean},
                                 {"sd", s.sd},
                                 {"coef", s.coef}});
    }
    j["controls"] = controls_json;
    return j;
}

namespace {

std::string padded(const std::string& prefix, int value, int width) {
    std::string digits = std::to_string(value);
    while (static_cast<int>(digits.size()) < width)
        digits.insert(digits.begin(), '0');
    return prefix + digits;
}

}  // namespace

ColumnTable synth_dgp(const SynthConfig& config, std::uint64_t seed) {
    const int n_years = config.year_max - config.year_min + 1;
    const auto controls =
        config.controls.empty() ? SynthConfig::default_controls()
                                : config.controls;
    Rng rng(seed);

    // industry tariff paths: dispersed persistent levels on a common decline
    const double base_mean =
        config.tariff_mean + config.tariff_decline * (n_years - 1) / 2.0;
    std::vector<std::vector<double>> tariff(
        config.n_industries, std::vector<double>(n_years, 0.0));
    std::vector<double> base(config.n_industries);
    Rng tariff_rng = rng.fork(1);
    // centered offsets keep the realized cross-industry mean on target
    double offset_mean = 0.0;
    for (int j = 0; j < config.n_industries; ++j) {
        base[j] = config.tariff_base_sd * tariff_rng.normal();
        offset_mean += base[j];
    }
    offset_mean /= config.n_industries;
    for (int j = 0; j < config.n_industries; ++j) {
        base[j] = std::max(0.5, base_mean + base[j] - offset_mean);
        double noise = 0.0;
        for (int ty = 0; ty < n_years; ++ty) {
            const double innovation = tariff_rng.normal();
            noise = ty == 0 ? config.tariff_noise_sd * innovation
                            : config.tariff_noise_rho * noise +
                                  config.tariff_noise_sd *
                                      std::sqrt(1.0 - config.tariff_noise_rho *
                                                          config.tariff_noise_rho) *
                                      innovation;
            tariff[j][ty] = std::max(
                0.0, base[j] - config.tariff_decline * ty + noise);
        }
    }

    // upstream exposure: each industry draws on three others
    Rng mix_rng = rng.fork(2);
    std::vector<std::array<int, 3>> suppliers(config.n_industries);
    std::vector<std::array<double, 3>> shares(config.n_industries);
    for (int j = 0; j < config.n_industries; ++j) {
        double total = 0.0;
        for (int s = 0; s < 3; ++s) {
            suppliers[j][s] = mix_rng.uniform_int(config.n_industries);
            shares[j][s] = 0.1 + mix_rng.uniform();
            total += shares[j][s];
        }
        for (int s = 0; s < 3; ++s) shares[j][s] /= total;
    }
    std::vector<std::vector<double>> upstream(
        config.n_industries, std::vector<double>(n_years, 0.0));
    for (int j = 0; j < config.n_industries; ++j)
        for (int ty = 0; ty < n_years; ++ty)
            for (int s = 0; s < 3; ++s)
                upstream[j][ty] += shares[j][s] * tariff[suppliers[j][s]][ty];

    // effects and firm attributes
    Rng fe_rng = rng.fork(3);
    std::vector<double> firm_effect(config.n_firms);
    std::vector<int> firm_industry(config.n_firms);
    std::vector<int> firm_soe(config.n_firms), firm_tech(config.n_firms);
    for (int f = 0; f < config.n_firms; ++f) {
        firm_effect[f] = config.sigma_firm * fe_rng.normal();
        firm_industry[f] = f % config.n_industries;
        firm_soe[f] = fe_rng.uniform() < config.soe_share ? 1 : 0;
        firm_tech[f] = fe_rng.uniform() < config.high_tech_share ? 1 : 0;
    }
    std::vector<double> industry_effect(config.n_industries);
    std::vector<int> industry_differentiated(config.n_industries);
    for (int j = 0; j < config.n_industries; ++j) {
        industry_effect[j] = config.sigma_industry * fe_rng.normal();
        industry_differentiated[j] =
            fe_rng.uniform() < config.differentiated_share ? 1 : 0;
    }
    std::vector<double> year_effect(n_years);
    for (int ty = 0; ty < n_years; ++ty)
        year_effect[ty] = config.sigma_year * fe_rng.normal();

    // center the log-mean so the average outcome lands near the target
    double control_mean_part = 0.0;
    double control_var_part = 0.0;
    for (const auto& s : controls) {
        control_mean_part += s.coef * s.mean;
        control_var_part += s.coef * s.coef * s.sd * s.sd;
    }
    const double tariff_var = config.tariff_base_sd * config.tariff_base_sd +
                              config.tariff_noise_sd * config.tariff_noise_sd;
    const double eta_var =
        config.beta_tariff * config.beta_tariff * tariff_var +
        config.sigma_firm * config.sigma_firm +
        config.sigma_industry * config.sigma_industry +
        config.sigma_year * config.sigma_year + control_var_part;
    const double intercept =
        std::log(config.mean_outcome) -
        config.beta_tariff * config.tariff_mean -
        config.beta_upstream * config.tariff_mean * 0.0 -
        control_mean_part - 0.5 * eta_var;

    const std::size_t n = static_cast<std::size_t>(config.n_firms) * n_years;
    std::vector<std::string> firm_ids(n), industry_codes(n);
    std::vector<double> years(n), tariffs(n), upstreams(n), outcomes(n),
        forward(n), soe(n), tech(n), differentiated(n);
    std::vector<std::vector<double>> control_values(
        controls.size(), std::vector<double>(n, 0.0));

    Rng draw_rng = rng.fork(4);
    std::size_t row = 0;
    for (int f = 0; f < config.n_firms; ++f) {
        const int j = firm_industry[f];
        for (int ty = 0; ty < n_years; ++ty, ++row) {
            firm_ids[row] = padded("F", f + 1, 5);
            industry_codes[row] = padded("I", j + 1, 3);
            years[row] = config.year_min + ty;
            tariffs[row] = tariff[j][ty];
            upstreams[row] = upstream[j][ty];
            soe[row] = firm_soe[f];
            tech[row] = firm_tech[f];
            differentiated[row] = industry_differentiated[j];

            double eta = intercept + config.beta_tariff * tariff[j][ty] +
                         config.beta_upstream * upstream[j][ty] +
                         firm_effect[f] + industry_effect[j] + year_effect[ty];
            for (std::size_t c = 0; c < controls.size(); ++c) {
                const double v =
                    controls[c].mean + controls[c].sd * draw_rng.normal();
                control_values[c][row] = v;
                eta += controls[c].coef * v;
            }
            outcomes[row] = draw_rng.poisson(std::exp(eta));
            // a second count with no tariff dependence, for placebo columns
            forward[row] = draw_rng.poisson(config.mean_outcome);
        }
    }

    ColumnTable out;
    out.add_str("firm_id", std::move(firm_ids));
    out.add_num("year", std::move(years));
    out.add_str("industry_code", std::move(industry_codes));
    out.add_num("backward_count", std::move(outcomes));
    out.add_num("forward_count", std::move(forward));
    out.add_num("downstream_tariff", std::move(tariffs));
    out.add_num("upstream_tariff", std::move(upstreams));
    for (std::size_t c = 0; c < controls.size(); ++c)
        out.add_num(controls[c].name, std::move(control_values[c]));
    out.add_num("soe", std::move(soe));
    out.add_num("high_tech", std::move(tech));
    out.add_num("differentiated", std::move(differentiated));
    return out;
}

}  // namespace vilab
