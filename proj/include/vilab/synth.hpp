#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vilab/panel.hpp"

namespace vilab {

// Deterministic random source built on mt19937_64 with hand-rolled
// transforms, so identical seeds give identical panels across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    double uniform();                 // [0, 1)
    double normal();                  // standard normal, Box-Muller
    int poisson(double mean);
    int uniform_int(int n);           // {0, ..., n-1}
    Rng fork(std::uint64_t stream) const;  // derived, independent stream

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
    std::uint64_t seed_ = 0;
};

struct ControlSpec {
    std::string name;
    double mean = 0.0;
    double sd = 1.0;
    double coef = 0.0;
};

// Configuration of the synthetic firm-year panel: counts, the planted tariff
// coefficient, fixed-effect scales, tariff-path calibration targets, and
// control distributions.
struct SynthConfig {
    int n_firms = 500;
    int n_industries = 50;
    int year_min = 2000;
    int year_max = 2009;

    double beta_tariff = -0.044;
    double beta_upstream = 0.0;

    double tariff_mean = 9.502;       // target time-average level
    double tariff_base_sd = 3.0;      // dispersion of industry base levels
    double tariff_decline = 0.35;     // per-year fall in the common level
    double tariff_noise_sd = 1.5;     // industry-year deviations
    double tariff_noise_rho = 0.7;    // their within-industry persistence

    double sigma_firm = 0.3;
    double sigma_industry = 0.2;
    double sigma_year = 0.1;
    double mean_outcome = 0.4;

    double soe_share = 0.287;
    double high_tech_share = 0.188;
    double differentiated_share = 0.665;

    std::vector<ControlSpec> controls;  // defaults applied when empty

    static SynthConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    static std::vector<ControlSpec> default_controls();
};

// Draws the panel: Poisson outcomes with log-mean
// beta*tariff + beta_up*upstream + controls + firm/industry/year effects.
// Tariff paths are persistent within industry and decline in the time mean.
ColumnTable synth_dgp(const SynthConfig& config, std::uint64_t seed);

}  // namespace vilab
