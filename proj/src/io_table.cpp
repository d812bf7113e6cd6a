#include "vilab/io_table.hpp"

#include <cmath>
#include <limits>

#include "vilab/common.hpp"
#include "vilab/csv.hpp"

namespace vilab {

int IoTable::index_of(const std::string& sector) const {
    for (std::size_t i = 0; i < sectors.size(); ++i)
        if (sectors[i] == sector) return static_cast<int>(i);
    return -1;
}

void IoTable::validate() const {
    const auto n = static_cast<Eigen::Index>(sectors.size());
    if (n == 0) throw DataError("IO table has no sectors");
    if (flows.rows() != n || flows.cols() != n || final_demand.size() != n ||
        total_output.size() != n)
        throw DataError("IO table dimensions are inconsistent");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(total_output(i) > 0.0))
            throw DataError("total output must be positive for sector " +
                            sectors[i]);
        if (final_demand(i) < 0.0)
            throw DataError("final demand must be nonnegative for sector " +
                            sectors[i]);
        const double used = final_demand(i) + flows.row(i).sum();
        if (used > total_output(i) * (1.0 + 1e-6))
            throw DataError("sector " + sectors[i] +
                            " uses more output than it produces");
    }
    if ((flows.array() < 0.0).any())
        throw DataError("IO flows must be nonnegative");
}

IoTable IoTable::from_csv(const std::string& io_csv,
                          const std::string& totals_csv, int year) {
    const auto totals = csv::read_file(totals_csv);
    const int t_year = totals.require_column("year");
    const int t_sector = totals.require_column("sector");
    const int t_final = totals.require_column("final_demand");
    const int t_output = totals.require_column("total_output");

    IoTable io;
    io.year = year;
    for (const auto& row : totals.rows) {
        if (csv::to_int(row[t_year], totals_csv) != year) continue;
        io.sectors.push_back(row[t_sector]);
    }
    if (io.sectors.empty())
        throw DataError(totals_csv + ": no sectors for year " +
                        std::to_string(year));
    const auto n = static_cast<Eigen::Index>(io.sectors.size());
    io.flows = Eigen::MatrixXd::Zero(n, n);
    io.final_demand = Eigen::VectorXd::Zero(n);
    io.total_output = Eigen::VectorXd::Zero(n);
    for (const auto& row : totals.rows) {
        if (csv::to_int(row[t_year], totals_csv) != year) continue;
        const int i = io.index_of(row[t_sector]);
        io.final_demand(i) = csv::to_double(row[t_final], totals_csv);
        io.total_output(i) = csv::to_double(row[t_output], totals_csv);
    }

    const auto flows = csv::read_file(io_csv);
    const int f_year = flows.require_column("year");
    const int f_seller = flows.require_column("seller_sector");
    const int f_buyer = flows.require_column("buyer_sector");
    const int f_flow = flows.require_column("flow");
    for (const auto& row : flows.rows) {
        if (csv::to_int(row[f_year], io_csv) != year) continue;
        const int i = io.index_of(row[f_seller]);
        const int j = io.index_of(row[f_buyer]);
        if (i < 0 || j < 0)
            throw DataError(io_csv + ": unknown sector in flow row");
        io.flows(i, j) += csv::to_double(row[f_flow], io_csv);
    }
    io.validate();
    return io;
}

Eigen::MatrixXd direct_requirements(const IoTable& io) {
    io.validate();
    const auto n = io.flows.rows();
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        if (!(io.total_output(j) > 0.0))
            throw DataError("zero total output for sector " + io.sectors[j]);
        d.col(j) = io.flows.col(j) / io.total_output(j);
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        const double colsum = d.col(j).sum();
        if (colsum >= 1.0)
            throw DataError("direct requirements of sector " + io.sectors[j] +
                            " sum to " + std::to_string(colsum) +
                            "; economy is not viable");
    }
    return d;
}

Eigen::VectorXd upstreamness(const IoTable& io, UpsMethod method,
                             int max_terms) {
    const Eigen::MatrixXd d = direct_requirements(io);
    const auto n = d.rows();

    if (method == UpsMethod::Series) {
        // sum_k k * [D^{k-1} F]_i / Y_i, accumulated stage by stage
        Eigen::VectorXd stage = io.final_demand;  // D^{k-1} F at k = 1
        Eigen::VectorXd ups = Eigen::VectorXd::Zero(n);
        double prev_norm = std::numeric_limits<double>::infinity();
        for (int k = 1; k <= max_terms; ++k) {
            ups += double(k) * stage.cwiseQuotient(io.total_output);
            const double norm = stage.norm() * k;
            if (k > 8 && norm > prev_norm * 1.5 && norm > 1e-6)
                throw NumericalError("upstreamness series diverges");
            prev_norm = norm;
            stage = d * stage;
        }
        return ups;
    }

    // Solve (I - Delta) u = 1 with Delta(i, j) = d(i, j) * Y_j / Y_i.
    Eigen::MatrixXd delta(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            delta(i, j) = d(i, j) * io.total_output(j) / io.total_output(i);
    const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - delta;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
    if (!lu.isInvertible())
        throw NumericalError("upstreamness system is singular");
    return lu.solve(Eigen::VectorXd::Ones(n));
}

SectorConcordance SectorConcordance::from_csv(const std::string& path) {
    const auto file = csv::read_file(path);
    const int c_sector = file.require_column("io_sector");
    const int c_industry = file.require_column("industry_code");
    const int c_weight = file.column("weight");
    SectorConcordance conc;
    for (const auto& row : file.rows) {
        Row r;
        r.io_sector = row[c_sector];
        r.industry_code = row[c_industry];
        r.weight = c_weight >= 0 ? csv::to_double(row[c_weight], path) : 1.0;
        if (!(r.weight >= 0.0))
            throw DataError(path + ": negative concordance weight");
        conc.rows.push_back(std::move(r));
    }
    return conc;
}

std::map<std::string, double> industry_upstreamness(
    const IoTable& io, const Eigen::VectorXd& ups,
    const SectorConcordance& concordance) {
    std::map<std::string, double> weighted_sum;
    std::map<std::string, double> weight_total;
    for (const auto& row : concordance.rows) {
        const int i = io.index_of(row.io_sector);
        if (i < 0)
            throw DataError("concordance references unknown sector " +
                            row.io_sector);
        const double w = row.weight * io.total_output(i);
        weighted_sum[row.industry_code] += w * ups(i);
        weight_total[row.industry_code] += w;
    }
    std::map<std::string, double> out;
    for (const auto& [industry, total] : weight_total) {
        if (!(total > 0.0))
            throw DataError("industry " + industry +
                            " has zero concordance weight");
        out[industry] = weighted_sum[industry] / total;
    }
    return out;
}

}  // namespace vilab
