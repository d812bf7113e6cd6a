#include "vilab/deals.hpp"

#include <algorithm>
#include <cmath>

#include "vilab/common.hpp"
#include "vilab/csv.hpp"

namespace vilab {

std::vector<DealRecord> DealRecord::from_csv(const std::string& path) {
    const auto file = csv::read_file(path);
    const int c_id = file.require_column("deal_id");
    const int c_year = file.require_column("year");
    const int c_firm = file.require_column("acquirer_firm_id");
    const int c_acq = file.require_column("acquirer_industry");
    const int c_tgt = file.require_column("target_industry");
    const int c_status = file.require_column("status");
    const int c_tech = file.column("tech_flag");

    std::vector<DealRecord> deals;
    for (const auto& row : file.rows) {
        DealRecord d;
        d.deal_id = row[c_id];
        d.year = csv::to_int(row[c_year], path);
        d.acquirer_firm_id = row[c_firm];
        d.acquirer_industry = row[c_acq];
        d.target_industry = row[c_tgt];
        d.status = row[c_status];
        if (c_tech >= 0 && !row[c_tech].empty())
            d.tech_flag = csv::to_int(row[c_tech], path);
        deals.push_back(std::move(d));
    }
    return deals;
}

DealDirection classify_deal(const DealRecord& deal,
                            const std::map<std::string, double>& ups) {
    if (deal.acquirer_industry == deal.target_industry)
        return DealDirection::Horizontal;
    const auto acq = ups.find(deal.acquirer_industry);
    const auto tgt = ups.find(deal.target_industry);
    if (acq == ups.end())
        throw DataError("deal " + deal.deal_id + ": acquirer industry " +
                        deal.acquirer_industry + " has no upstreamness");
    if (tgt == ups.end())
        throw DataError("deal " + deal.deal_id + ": target industry " +
                        deal.target_industry + " has no upstreamness");
    if (tgt->second > acq->second) return DealDirection::Backward;
    if (tgt->second < acq->second) return DealDirection::Forward;
    return DealDirection::Horizontal;
}

std::map<std::string, int> upstream_quartiles(
    const std::map<std::string, double>& ups) {
    if (ups.size() < 4)
        throw DataError("quartiles require at least 4 industries, got " +
                        std::to_string(ups.size()));
    std::vector<double> values;
    values.reserve(ups.size());
    for (const auto& [_, v] : ups) values.push_back(v);
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    auto nearest_rank = [&](double pct) {
        const auto rank = static_cast<std::size_t>(
            std::ceil(pct / 100.0 * static_cast<double>(n)));
        return values[std::max<std::size_t>(rank, 1) - 1];
    };
    const double q25 = nearest_rank(25.0);
    const double q50 = nearest_rank(50.0);
    const double q75 = nearest_rank(75.0);

    std::map<std::string, int> out;
    for (const auto& [industry, v] : ups) {
        int q = 4;
        if (v <= q25) {
            q = 1;
        } else if (v <= q50) {
            q = 2;
        } else if (v <= q75) {
            q = 3;
        }
        out[industry] = q;
    }
    return out;
}

}  // namespace vilab
