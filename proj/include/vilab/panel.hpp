#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "vilab/deals.hpp"

namespace vilab {

// Columnar table with numeric and string columns; the unit of exchange
// between the pipeline stages and the CSV files on disk.
class ColumnTable {
public:
    std::size_t rows() const { return n_rows_; }
    bool empty() const { return n_rows_ == 0; }
    bool has(const std::string& name) const;
    bool is_numeric(const std::string& name) const;
    const std::vector<std::string>& names() const { return order_; }

    void add_num(const std::string& name, std::vector<double> values);
    void add_str(const std::string& name, std::vector<std::string> values);

    std::vector<double>& num(const std::string& name);
    const std::vector<double>& num(const std::string& name) const;
    std::vector<std::string>& str(const std::string& name);
    const std::vector<std::string>& str(const std::string& name) const;

    ColumnTable select_rows(const std::vector<std::size_t>& idx) const;

    // Clamp a numeric column at its nearest-rank percentiles (defaults: 1st
    // and 99th). NaNs are left untouched.
    void winsorize(const std::string& name, double lo_pct = 1.0,
                   double hi_pct = 99.0);

    // Columns listed in string_columns are read as strings; all others must
    // parse as numbers (empty cells become NaN).
    static ColumnTable from_csv(const std::string& path,
                                const std::set<std::string>& string_columns);

private:
    using Column = std::variant<std::vector<double>, std::vector<std::string>>;
    void check_size(std::size_t incoming, const std::string& name);

    std::vector<std::string> order_;
    std::map<std::string, Column> columns_;
    std::size_t n_rows_ = 0;
};

struct JoinReport {
    std::size_t rows_in = 0;
    std::size_t rows_out = 0;
    std::size_t missing_tariff_keys = 0;    // firm-years without a tariff row
    std::size_t missing_quartile_keys = 0;  // industries without a quartile
    std::size_t unmatched_deals = 0;        // classified deals outside the panel

    std::string describe() const;
};

// Assembles the estimation panel: deal counts by firm-year and direction,
// tariff columns joined on (year, industry_code), quartile flags attached,
// every firm-year control column passed through. Missing joins become NaN
// and are counted in the report, never dropped silently.
ColumnTable build_panel(
    const ColumnTable& firm_years, const ColumnTable& tariff_panel,
    const std::map<std::string, int>& quartiles,
    const std::vector<std::pair<DealRecord, DealDirection>>& classified_deals,
    JoinReport* report = nullptr);

}  // namespace vilab
