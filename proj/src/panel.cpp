#include "vilab/panel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "vilab/common.hpp"
#include "vilab/csv.hpp"

namespace vilab {

bool ColumnTable::has(const std::string& name) const {
    return columns_.count(name) > 0;
}

bool ColumnTable::is_numeric(const std::string& name) const {
    const auto it = columns_.find(name);
    if (it == columns_.end()) throw DataError("no such column: " + name);
    return std::holds_alternative<std::vector<double>>(it->second);
}

void ColumnTable::check_size(std::size_t incoming, const std::string& name) {
    if (columns_.empty()) {
        n_rows_ = incoming;
    } else if (incoming != n_rows_) {
        throw DataError("column " + name + " has " + std::to_string(incoming) +
                        " rows, table has " + std::to_string(n_rows_));
    }
}

void ColumnTable::add_num(const std::string& name, std::vector<double> values) {
    check_size(values.size(), name);
    if (!columns_.count(name)) order_.push_back(name);
    columns_[name] = std::move(values);
}

void ColumnTable::add_str(const std::string& name,
                          std::vector<std::string> values) {
    check_size(values.size(), name);
    if (!columns_.count(name)) order_.push_back(name);
    columns_[name] = std::move(values);
}

std::vector<double>& ColumnTable::num(const std::string& name) {
    const auto it = columns_.find(name);
    if (it == columns_.end()) throw DataError("no such column: " + name);
    if (!std::holds_alternative<std::vector<double>>(it->second))
        throw DataError("column " + name + " is not numeric");
    return std::get<std::vector<double>>(it->second);
}

const std::vector<double>& ColumnTable::num(const std::string& name) const {
    return const_cast<ColumnTable*>(this)->num(name);
}

std::vector<std::string>& ColumnTable::str(const std::string& name) {
    const auto it = columns_.find(name);
    if (it == columns_.end()) throw DataError("no such column: " + name);
    if (!std::holds_alternative<std::vector<std::string>>(it->second))
        throw DataError("column " + name + " is not a string column");
    return std::get<std::vector<std::string>>(it->second);
}

const std::vector<std::string>& ColumnTable::str(const std::string& name) const {
    return const_cast<ColumnTable*>(this)->str(name);
}

ColumnTable ColumnTable::select_rows(const std::vector<std::size_t>& idx) const {
    ColumnTable out;
    for (const auto& name : order_) {
        if (is_numeric(name)) {
            const auto& src = num(name);
            std::vector<double> vals;
            vals.reserve(idx.size());
            for (std::size_t i : idx) vals.push_back(src.at(i));
            out.add_num(name, std::move(vals));
        } else {
            const auto& src = str(name);
            std::vector<std::string> vals;
            vals.reserve(idx.size());
            for (std::size_t i : idx) vals.push_back(src.at(i));
            out.add_str(name, std::move(vals));
        }
    }
    out.n_rows_ = idx.size();
    return out;
}

void ColumnTable::winsorize(const std::string& name, double lo_pct,
                            double hi_pct) {
    auto& col = num(name);
    std::vector<double> sorted;
    sorted.reserve(col.size());
    for (double v : col)
        if (!std::isnan(v)) sorted.push_back(v);
    if (sorted.empty()) return;
    std::sort(sorted.begin(), sorted.end());
    auto nearest_rank = [&](double pct) {
        const auto rank = static_cast<std::size_t>(
            std::ceil(pct / 100.0 * static_cast<double>(sorted.size())));
        return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
    };
    const double lo = nearest_rank(lo_pct);
    const double hi = nearest_rank(hi_pct);
    for (double& v : col) {
        if (std::isnan(v)) continue;
        v = std::clamp(v, lo, hi);
    }
}

ColumnTable ColumnTable::from_csv(const std::string& path,
                                  const std::set<std::string>& string_columns) {
    const auto file = csv::read_file(path);
    ColumnTable out;
    for (std::size_t c = 0; c < file.header.size(); ++c) {
        const std::string& name = file.header[c];
        if (string_columns.count(name)) {
            std::vector<std::string> vals;
            vals.reserve(file.rows.size());
            for (const auto& row : file.rows) vals.push_back(row[c]);
            out.add_str(name, std::move(vals));
        } else {
            std::vector<double> vals;
            vals.reserve(file.rows.size());
            for (const auto& row : file.rows)
                vals.push_back(csv::to_double(row[c], path + ":" + name));
            out.add_num(name, std::move(vals));
        }
    }
    return out;
}

std::string JoinReport::describe() const {
    std::ostringstream os;
    os << "panel join: " << rows_in << " firm-years in, " << rows_out
       << " rows out; missing tariff keys " << missing_tariff_keys
       << ", missing quartiles " << missing_quartile_keys
       << ", deals outside panel " << unmatched_deals;
    return os.str();
}

ColumnTable build_panel(
    const ColumnTable& firm_years, const ColumnTable& tariff_panel,
    const std::map<std::string, int>& quartiles,
    const std::vector<std::pair<DealRecord, DealDirection>>& classified_deals,
    JoinReport* report) {
    JoinReport local;
    JoinReport& rep = report ? *report : local;
    rep.rows_in = firm_years.rows();

    const auto& firm_id = firm_years.str("firm_id");
    const auto& year = firm_years.num("year");
    const auto& industry = firm_years.str("industry_code");

    // deal counts by firm-year
    std::map<std::pair<std::string, int>, std::array<double, 4>> counts;
    std::set<std::pair<std::string, int>> firm_year_keys;
    for (std::size_t i = 0; i < firm_years.rows(); ++i)
        firm_year_keys.insert({firm_id[i], static_cast<int>(year[i])});
    for (const auto& [deal, direction] : classified_deals) {
        const std::pair<std::string, int> key{deal.acquirer_firm_id, deal.year};
        if (!firm_year_keys.count(key)) {
            ++rep.unmatched_deals;
            continue;
        }
        auto& c = counts[key];
        const bool tech = deal.tech_flag.value_or(0) != 0;
        if (direction == DealDirection::Backward) {
            c[0] += 1.0;
            if (tech) c[2] += 1.0;
        } else if (direction == DealDirection::Forward) {
            c[1] += 1.0;
            if (tech) c[3] += 1.0;
        }
    }

    // tariff columns keyed by (year, industry)
    const auto& t_year = tariff_panel.num("year");
    const auto& t_industry = tariff_panel.str("industry_code");
    std::vector<std::string> tariff_cols;
    for (const auto& name : tariff_panel.names())
        if (name != "year" && name != "industry_code" &&
            tariff_panel.is_numeric(name))
            tariff_cols.push_back(name);
    std::map<std::pair<int, std::string>, std::size_t> tariff_index;
    for (std::size_t i = 0; i < tariff_panel.rows(); ++i)
        tariff_index[{static_cast<int>(t_year[i]), t_industry[i]}] = i;

    ColumnTable out;
    out.add_str("firm_id", firm_id);
    out.add_num("year", year);
    out.add_str("industry_code", industry);

    const std::size_t n = firm_years.rows();
    std::vector<double> backward(n, 0.0), forward(n, 0.0), tech_backward(n, 0.0),
        tech_forward(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto it =
            counts.find({firm_id[i], static_cast<int>(year[i])});
        if (it == counts.end()) continue;
        backward[i] = it->second[0];
        forward[i] = it->second[1];
        tech_backward[i] = it->second[2];
        tech_forward[i] = it->second[3];
    }
    out.add_num("backward_count", std::move(backward));
    out.add_num("forward_count", std::move(forward));
    out.add_num("tech_backward_count", std::move(tech_backward));
    out.add_num("tech_forward_count", std::move(tech_forward));

    const double nan = std::nan("");
    for (const auto& col : tariff_cols) {
        const auto& src = tariff_panel.num(col);
        std::vector<double> vals(n, nan);
        for (std::size_t i = 0; i < n; ++i) {
            const auto it =
                tariff_index.find({static_cast<int>(year[i]), industry[i]});
            if (it != tariff_index.end()) vals[i] = src[it->second];
        }
        out.add_num(col, std::move(vals));
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::pair<int, std::string> key{static_cast<int>(year[i]),
                                              industry[i]};
        if (!tariff_index.count(key)) ++rep.missing_tariff_keys;
    }

    std::vector<double> quartile(n, nan);
    for (std::size_t i = 0; i < n; ++i) {
        const auto it = quartiles.find(industry[i]);
        if (it == quartiles.end()) {
            ++rep.missing_quartile_keys;
        } else {
            quartile[i] = it->second;
        }
    }
    out.add_num("ups_quartile", std::move(quartile));

    // pass through every remaining firm-year column (controls, group flags)
    for (const auto& name : firm_years.names()) {
        if (name == "firm_id" || name == "year" || name == "industry_code")
            continue;
        if (firm_years.is_numeric(name)) {
            out.add_num(name, firm_years.num(name));
        } else {
            out.add_str(name, firm_years.str(name));
        }
    }

    rep.rows_out = out.rows();
    return out;
}

}  // namespace vilab
