#include "vilab/tariff.hpp"

#include <algorithm>
#include <cmath>

#include "vilab/common.hpp"
#include "vilab/csv.hpp"

namespace vilab {

std::vector<TariffLine> TariffLine::from_csv(const std::string& path) {
    const auto file = csv::read_file(path);
    const int c_year = file.require_column("year");
    const int c_hs6 = file.require_column("hs6");
    const int c_mfn = file.require_column("mfn_rate");
    const int c_ahs = file.column("ahs_rate");
    const int c_value = file.column("import_value");

    std::vector<TariffLine> lines;
    for (const auto& row : file.rows) {
        TariffLine line;
        line.year = csv::to_int(row[c_year], path);
        line.hs6 = row[c_hs6];
        if (line.hs6.size() != 6 ||
            !std::all_of(line.hs6.begin(), line.hs6.end(),
                         [](char c) { return c >= '0' && c <= '9'; }))
            throw DataError(path + ": hs6 code must be 6 digits, got '" +
                            line.hs6 + "'");
        line.mfn_rate = csv::to_double(row[c_mfn], path);
        if (line.mfn_rate < 0.0)
            throw DataError(path + ": negative tariff rate for " + line.hs6);
        if (c_ahs >= 0 && !row[c_ahs].empty()) {
            line.ahs_rate = csv::to_double(row[c_ahs], path);
            if (*line.ahs_rate < 0.0)
                throw DataError(path + ": negative applied rate for " +
                                line.hs6);
        }
        if (c_value >= 0 && !row[c_value].empty()) {
            line.import_value = csv::to_double(row[c_value], path);
            if (line.import_value < 0.0)
                throw DataError(path + ": negative import value for " +
                                line.hs6);
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

HsConcordance HsConcordance::from_csv(const std::string& path,
                                      const std::string& code_column) {
    const auto file = csv::read_file(path);
    const int c_hs6 = file.require_column("hs6");
    const int c_code = file.require_column(code_column);
    HsConcordance conc;
    for (const auto& row : file.rows)
        conc.map.insert({row[c_hs6], row[c_code]});
    return conc;
}

IndustryTariffs industry_tariff(const std::vector<TariffLine>& lines,
                                const HsConcordance& concordance,
                                TariffMode mode) {
    struct Accum {
        double rate_sum = 0.0;
        double weighted_sum = 0.0;
        double value_sum = 0.0;
        std::size_t n = 0;
    };
    std::map<std::pair<int, std::string>, Accum> groups;
    IndustryTariffs out;

    for (const auto& line : lines) {
        const auto [begin, end] = concordance.map.equal_range(line.hs6);
        if (begin == end)
            throw DataError("hs6 " + line.hs6 + " has no industry mapping");
        double rate = line.mfn_rate;
        if (mode == TariffMode::Ahs) {
            if (!line.ahs_rate) {
                ++out.skipped_missing_ahs;
                continue;
            }
            rate = *line.ahs_rate;
        }
        for (auto it = begin; it != end; ++it) {
            Accum& acc = groups[{line.year, it->second}];
            acc.rate_sum += rate;
            acc.weighted_sum += rate * line.import_value;
            acc.value_sum += line.import_value;
            ++acc.n;
        }
    }

    for (const auto& [key, acc] : groups) {
        if (acc.n == 0) continue;
        const double simple = acc.rate_sum / static_cast<double>(acc.n);
        if (mode == TariffMode::Weighted) {
            if (acc.value_sum > 0.0) {
                out.values[key] = acc.weighted_sum / acc.value_sum;
            } else {
                out.values[key] = simple;
                out.weighted_fallback.insert(key);
            }
        } else {
            out.values[key] = simple;
        }
    }
    return out;
}

Eigen::MatrixXd upstream_tariff(const Eigen::MatrixXd& tariff_by_sector,
                                const Eigen::MatrixXd& requirements) {
    if (tariff_by_sector.cols() != requirements.rows())
        throw DataError("tariff matrix has " +
                        std::to_string(tariff_by_sector.cols()) +
                        " sectors, requirements matrix has " +
                        std::to_string(requirements.rows()) + " rows");
    return tariff_by_sector * requirements;
}

Eigen::MatrixXd complete_requirements_normalized(const Eigen::MatrixXd& direct) {
    const auto n = direct.rows();
    if (direct.cols() != n) throw DataError("requirements matrix must be square");
    const Eigen::MatrixXd leontief =
        (Eigen::MatrixXd::Identity(n, n) - direct).inverse();
    Eigen::MatrixXd complete = leontief - Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double colsum = complete.col(j).sum();
        if (colsum > 0.0) complete.col(j) /= colsum;
    }
    return complete;
}

ColumnTable lag_series(const ColumnTable& panel, int k) {
    if (k < 1) throw ConfigError("lag depth must be >= 1");
    const auto& year = panel.num("year");
    const auto& industry = panel.str("industry_code");
    if (year.empty()) throw DataError("cannot lag an empty panel");
    const auto [lo, hi] = std::minmax_element(year.begin(), year.end());
    if (static_cast<int>(*hi - *lo) < k)
        throw DataError("lag depth " + std::to_string(k) +
                        " exceeds the panel year span");

    std::map<std::pair<int, std::string>, std::size_t> index;
    for (std::size_t i = 0; i < panel.rows(); ++i)
        index[{static_cast<int>(year[i]), industry[i]}] = i;

    std::vector<std::size_t> keep;
    std::vector<std::size_t> source;
    for (std::size_t i = 0; i < panel.rows(); ++i) {
        const auto it =
            index.find({static_cast<int>(year[i]) - k, industry[i]});
        if (it == index.end()) continue;  // leading years drop out
        keep.push_back(i);
        source.push_back(it->second);
    }

    ColumnTable out;
    {
        std::vector<double> years;
        std::vector<std::string> industries;
        for (std::size_t i : keep) {
            years.push_back(year[i]);
            industries.push_back(industry[i]);
        }
        out.add_num("year", std::move(years));
        out.add_str("industry_code", std::move(industries));
    }
    for (const auto& name : panel.names()) {
        if (name == "year" || name == "industry_code") continue;
        if (!panel.is_numeric(name)) continue;
        const auto& src = panel.num(name);
        std::vector<double> vals;
        vals.reserve(source.size());
        for (std::size_t i : source) vals.push_back(src[i]);
        out.add_num(name, std::move(vals));
    }
    return out;
}

}  // namespace vilab
