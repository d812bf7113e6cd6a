#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vilab/panel.hpp"

namespace vilab {

// One product-level tariff observation. Rates in percentage points.
struct TariffLine {
    int year = 0;
    std::string hs6;
    double mfn_rate = 0.0;
    std::optional<double> ahs_rate;
    double import_value = 0.0;

    static std::vector<TariffLine> from_csv(const std::string& path);
};

// hs6 -> one or more industry codes.
struct HsConcordance {
    std::multimap<std::string, std::string> map;

    static HsConcordance from_csv(const std::string& path,
                                  const std::string& code_column =
                                      "industry_code");
};

enum class TariffMode { Simple, Weighted, Ahs };

struct IndustryTariffs {
    // (year, industry) -> rate
    std::map<std::pair<int, std::string>, double> values;
    // industries that fell back to the simple mean for lack of trade value
    std::set<std::pair<int, std::string>> weighted_fallback;
    std::size_t skipped_missing_ahs = 0;
};

// Aggregates product lines to industry-level rates. Simple: unweighted mean.
// Weighted: trade-value-weighted mean; zero-value industries fall back to
// Simple and are flagged. Ahs: unweighted mean of the applied rate, lines
// without one skipped.
IndustryTariffs industry_tariff(const std::vector<TariffLine>& lines,
                                const HsConcordance& concordance,
                                TariffMode mode);

// Upstream tariff exposure: years-by-sectors tariff matrix times the
// requirements matrix (direct requirements by default; pass the normalized
// complete-requirements matrix for the alternative mode).
Eigen::MatrixXd upstream_tariff(const Eigen::MatrixXd& tariff_by_sector,
                                const Eigen::MatrixXd& requirements);

// Complete requirements (Leontief inverse minus identity), columns normalized
// to sum to one.
Eigen::MatrixXd complete_requirements_normalized(
    const Eigen::MatrixXd& direct);

// Shifts a (year, industry_code) panel k years forward: the value reported at
// year y becomes the value observed at y - k. The k leading years drop out.
ColumnTable lag_series(const ColumnTable& panel, int k);

}  // namespace vilab
