#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vilab {

// One year of an input-output table: intermediate flows (seller row, buyer
// column), final demand and total output per sector.
struct IoTable {
    int year = 0;
    std::vector<std::string> sectors;
    Eigen::MatrixXd flows;         // flows(i, j): value sold by i to j
    Eigen::VectorXd final_demand;  // F_i
    Eigen::VectorXd total_output;  // Y_i

    int index_of(const std::string& sector) const;

    // Dimensional consistency, nonnegative flows, and the accounting
    // inequality Y_i >= F_i + sum_j flows(i, j) up to a relative slack for
    // inventory/residual columns.
    void validate() const;

    // io_csv long form: year,seller_sector,buyer_sector,flow
    // totals_csv:       year,sector,final_demand,total_output
    static IoTable from_csv(const std::string& io_csv,
                            const std::string& totals_csv, int year);
};

// d(i, j) = flows(i, j) / Y_j: value of input from i per unit of j's output.
// Throws DataError on zero output or a column summing to >= 1.
Eigen::MatrixXd direct_requirements(const IoTable& io);

enum class UpsMethod { Series, Solve };

// Distance-weighted measure of how far each sector's output travels before
// reaching final use; 1 for purely final-goods sectors.
//
// Series sums the staged terms sum_k k * [D^{k-1} F]_i / Y_i directly to
// max_terms. Solve uses the equivalent linear system (I - Delta) u = 1 with
// Delta(i, j) = d(i, j) * Y_j / Y_i, which turns the staged sum into a
// geometric series.
Eigen::VectorXd upstreamness(const IoTable& io, UpsMethod method,
                             int max_terms = 200);

// Output-weighted aggregation of sector upstreamness to industry codes.
// Rows are (io_sector, industry_code, weight); effective weight is
// weight * Y_sector.
struct SectorConcordance {
    struct Row {
        std::string io_sector;
        std::string industry_code;
        double weight = 1.0;
    };
    std::vector<Row> rows;

    static SectorConcordance from_csv(const std::string& path);
};

std::map<std::string, double> industry_upstreamness(
    const IoTable& io, const Eigen::VectorXd& ups,
    const SectorConcordance& concordance);

}  // namespace vilab
