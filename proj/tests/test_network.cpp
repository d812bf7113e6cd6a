#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "vilab/common.hpp"
#include "vilab/deals.hpp"
#include "vilab/io_table.hpp"

using namespace vilab;

namespace {

IoTable all_final() {
    IoTable io;
    io.year = 2005;
    io.sectors = {"a", "b", "c"};
    io.flows = Eigen::MatrixXd::Zero(3, 3);
    io.final_demand.resize(3);
    io.final_demand << 10, 20, 30;
    io.total_output = io.final_demand;
    return io;
}

// sector 2's entire output is intermediate to sector 1; sector 1 is final
IoTable chain() {
    IoTable io;
    io.year = 2005;
    io.sectors = {"s1", "s2"};
    io.flows = Eigen::MatrixXd::Zero(2, 2);
    io.flows(1, 0) = 40.0;
    io.final_demand.resize(2);
    io.final_demand << 100, 0;
    io.total_output.resize(2);
    io.total_output << 100, 40;
    return io;
}

IoTable random_table(std::mt19937& rng, int n) {
    std::uniform_real_distribution<double> uy(50.0, 200.0), ushare(0.0, 1.0);
    IoTable io;
    io.year = 2000;
    io.flows = Eigen::MatrixXd::Zero(n, n);
    io.final_demand.resize(n);
    io.total_output.resize(n);
    for (int i = 0; i < n; ++i) io.sectors.push_back("s" + std::to_string(i));
    for (int j = 0; j < n; ++j) io.total_output(j) = uy(rng);
    // keep every requirements column summing below 0.6 so the staged series
    // dies off quickly
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXd shares(n);
        for (int i = 0; i < n; ++i) shares(i) = ushare(rng);
        shares *= 0.6 / shares.sum();
        for (int i = 0; i < n; ++i)
            io.flows(i, j) = shares(i) * io.total_output(j);
    }
    for (int i = 0; i < n; ++i) {
        const double intermediate = io.flows.row(i).sum();
        if (intermediate > io.total_output(i))
            io.total_output(i) = intermediate * 1.2;
        io.final_demand(i) = io.total_output(i) - intermediate;
    }
    io.validate();
    return io;
}

}  // namespace

TEST_CASE("direct requirements") {
    SUBCASE("no intermediates give a zero matrix") {
        const auto d = direct_requirements(all_final());
        CHECK(d.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("pure chain coefficient") {
        const auto d = direct_requirements(chain());
        CHECK(d(1, 0) == doctest::Approx(0.4));
        CHECK(d(0, 1) == 0.0);
    }
    SUBCASE("non-viable economy is rejected") {
        IoTable io = chain();
        io.flows(1, 0) = 150.0;  // sector 2 sells more into s1 than s1 produces
        io.total_output(1) = 150.0;
        CHECK_THROWS_AS(direct_requirements(io), DataError);
    }
    SUBCASE("zero output is rejected") {
        IoTable io = all_final();
        io.total_output(1) = 0.0;
        CHECK_THROWS_AS(direct_requirements(io), DataError);
    }
}

TEST_CASE("upstreamness fixtures") {
    SUBCASE("all-final economy sits at 1") {
        for (auto method : {UpsMethod::Series, UpsMethod::Solve}) {
            const auto ups = upstreamness(all_final(), method);
            for (int i = 0; i < 3; ++i)
                CHECK(ups(i) == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
    SUBCASE("two-sector chain") {
        for (auto method : {UpsMethod::Series, UpsMethod::Solve}) {
            const auto ups = upstreamness(chain(), method);
            CHECK(ups(0) == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(ups(1) == doctest::Approx(2.0).epsilon(1e-14));
        }
    }
    SUBCASE("round-about two-sector table") {
        IoTable io;
        io.year = 2000;
        io.sectors = {"x", "y"};
        io.total_output.resize(2);
        io.total_output << 100, 80;
        Eigen::MatrixXd d(2, 2);
        d << 0.2, 0.3, 0.1, 0.4;
        io.flows.resize(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                io.flows(i, j) = d(i, j) * io.total_output(j);
        io.final_demand =
            io.total_output - io.flows.rowwise().sum();
        io.validate();
        const auto solve = upstreamness(io, UpsMethod::Solve);
        const auto series = upstreamness(io, UpsMethod::Series, 500);
        CHECK((solve - series).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(solve.minCoeff() >= 1.0);
    }
}

TEST_CASE("series and solve agree on random tables") {
    std::mt19937 rng(42);
    for (int rep = 0; rep < 10; ++rep) {
        const auto io = random_table(rng, 10);
        const auto solve = upstreamness(io, UpsMethod::Solve);
        const auto series = upstreamness(io, UpsMethod::Series, 200);
        CHECK((solve - series).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(solve.minCoeff() >= 1.0 - 1e-12);

        // truncation error falls as terms are added
        const auto s50 = upstreamness(io, UpsMethod::Series, 50);
        const auto s100 = upstreamness(io, UpsMethod::Series, 100);
        const double err50 = (solve - s50).cwiseAbs().maxCoeff();
        const double err100 = (solve - s100).cwiseAbs().maxCoeff();
        CHECK(err100 <= err50 + 1e-15);
    }
}

TEST_CASE("upstreamness equals 1 exactly when all output is final") {
    std::mt19937 rng(7);
    const auto io = random_table(rng, 6);
    const auto ups = upstreamness(io, UpsMethod::Solve);
    for (int i = 0; i < 6; ++i) {
        const bool sells_intermediate = io.flows.row(i).sum() > 0.0;
        if (!sells_intermediate) CHECK(ups(i) == doctest::Approx(1.0));
        if (sells_intermediate) CHECK(ups(i) > 1.0);
    }
}

TEST_CASE("deal classification") {
    std::map<std::string, double> ups{
        {"1000", 1.2}, {"2000", 3.4}, {"3000", 3.4}, {"4000", 0.9}};
    DealRecord deal;
    deal.deal_id = "d1";
    deal.year = 2010;
    deal.acquirer_firm_id = "f1";

    deal.acquirer_industry = "1000";
    deal.target_industry = "2000";
    CHECK(classify_deal(deal, ups) == DealDirection::Backward);

    deal.acquirer_industry = "2000";
    deal.target_industry = "1000";
    CHECK(classify_deal(deal, ups) == DealDirection::Forward);

    deal.acquirer_industry = "2000";
    deal.target_industry = "2000";
    CHECK(classify_deal(deal, ups) == DealDirection::Horizontal);

    // ties across distinct codes resolve to horizontal
    deal.acquirer_industry = "2000";
    deal.target_industry = "3000";
    CHECK(classify_deal(deal, ups) == DealDirection::Horizontal);

    deal.target_industry = "9999";
    CHECK_THROWS_AS(classify_deal(deal, ups), DataError);
}

TEST_CASE("classification is antisymmetric") {
    std::map<std::string, double> ups{
        {"a", 0.9}, {"b", 1.4}, {"c", 2.8}, {"d", 2.8}};
    std::vector<std::string> codes{"a", "b", "c", "d"};
    for (const auto& acq : codes) {
        for (const auto& tgt : codes) {
            DealRecord fwd, rev;
            fwd.acquirer_industry = acq;
            fwd.target_industry = tgt;
            rev.acquirer_industry = tgt;
            rev.target_industry = acq;
            const auto a = classify_deal(fwd, ups);
            const auto b = classify_deal(rev, ups);
            if (a == DealDirection::Horizontal) {
                CHECK(b == DealDirection::Horizontal);
            } else if (a == DealDirection::Backward) {
                CHECK(b == DealDirection::Forward);
            } else {
                CHECK(b == DealDirection::Backward);
            }
        }
    }
}

TEST_CASE("upstream quartiles") {
    SUBCASE("four distinct values split one per quartile") {
        std::map<std::string, double> ups{
            {"a", 1.0}, {"b", 2.0}, {"c", 3.0}, {"d", 4.0}};
        const auto q = upstream_quartiles(ups);
        CHECK(q.at("a") == 1);
        CHECK(q.at("b") == 2);
        CHECK(q.at("c") == 3);
        CHECK(q.at("d") == 4);
    }
    SUBCASE("all-equal values degenerate to the lowest quartile") {
        std::map<std::string, double> ups{
            {"a", 2.0}, {"b", 2.0}, {"c", 2.0}, {"d", 2.0}};
        const auto q = upstream_quartiles(ups);
        for (const auto& [_, v] : q) CHECK(v == 1);
    }
    SUBCASE("eight distinct values give two per quartile") {
        std::map<std::string, double> ups;
        for (int i = 0; i < 8; ++i)
            ups["i" + std::to_string(i)] = 1.0 + 0.3 * i;
        const auto q = upstream_quartiles(ups);
        std::map<int, int> counts;
        for (const auto& [_, v] : q) ++counts[v];
        for (int k = 1; k <= 4; ++k) CHECK(counts[k] == 2);
    }
    SUBCASE("fewer than four industries is an error") {
        std::map<std::string, double> ups{{"a", 1.0}, {"b", 2.0}, {"c", 3.0}};
        CHECK_THROWS_AS(upstream_quartiles(ups), DataError);
    }
}

TEST_CASE("io table csv round trip") {
    const std::string dir = "io_test_tmp";
    std::filesystem::create_directories(dir);
    {
        std::ofstream io(dir + "/io_table.csv");
        io << "year,seller_sector,buyer_sector,flow\n";
        io << "2005,s2,s1,40\n";
    }
    {
        std::ofstream totals(dir + "/sector_totals.csv");
        totals << "year,sector,final_demand,total_output\n";
        totals << "2005,s1,100,100\n";
        totals << "2005,s2,0,40\n";
    }
    const auto io = IoTable::from_csv(dir + "/io_table.csv",
                                      dir + "/sector_totals.csv", 2005);
    const auto ups = upstreamness(io, UpsMethod::Solve);
    CHECK(ups(io.index_of("s1")) == doctest::Approx(1.0));
    CHECK(ups(io.index_of("s2")) == doctest::Approx(2.0));
    std::filesystem::remove_all(dir);
}

TEST_CASE("industry aggregation weights by output") {
    const auto io = chain();  // Y = (100, 40), UPS = (1, 2)
    const auto ups = upstreamness(io, UpsMethod::Solve);
    SectorConcordance conc;
    conc.rows = {{"s1", "IND", 1.0}, {"s2", "IND", 1.0}};
    const auto by_industry = industry_upstreamness(io, ups, conc);
    CHECK(by_industry.at("IND") ==
          doctest::Approx((100.0 * 1.0 + 40.0 * 2.0) / 140.0));
}
