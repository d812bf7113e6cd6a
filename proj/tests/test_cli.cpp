#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string binary() {
    const char* bin = std::getenv("VILAB_BIN");
    REQUIRE(bin != nullptr);
    return bin;
}

int run(const std::string& args) {
    const std::string cmd = binary() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const {
        return (path / name).string();
    }
};

void write(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

}  // namespace

TEST_CASE("model solve emits a solution artifact") {
    TempDir dir("vilab_cli_solve");
    write(dir / "prim.json", R"({"alpha": 0.5, "t": 1.0, "tau": 0.0})");
    const int rc = run("model solve --config " + (dir / "prim.json") +
                       " --out " + (dir / "out"));
    CHECK(rc == 0);
    const json payload = json::parse(slurp(fs::path(dir / "out") / "solve.json"));
    const double e_n = payload["non_integration"]["e_star"].get<double>();
    const double e_v = payload["integration"]["e_star"].get<double>();
    CHECK(e_n > 0.45);
    CHECK(e_n < 0.49);
    CHECK(e_v > e_n);
    CHECK(payload["delta_surplus"].get<double>() > 0.0);
    CHECK(payload["provenance"].contains("config_hash"));

    // byte-identical on a second run
    const std::string first = slurp(fs::path(dir / "out") / "solve.json");
    CHECK(run("model solve --config " + (dir / "prim.json") + " --out " +
              (dir / "out2")) == 0);
    CHECK(slurp(fs::path(dir / "out2") / "solve.json") == first);
}

TEST_CASE("ups compute on the chain fixture") {
    TempDir dir("vilab_cli_ups");
    write(dir / "io_table.csv",
          "year,seller_sector,buyer_sector,flow\n2005,s2,s1,40\n");
    write(dir / "sector_totals.csv",
          "year,sector,final_demand,total_output\n"
          "2005,s1,100,100\n2005,s2,0,40\n");
    const int rc = run("ups compute --io " + (dir / "io_table.csv") +
                       " --totals " + (dir / "sector_totals.csv") +
                       " --year 2005 --out " + (dir / "out"));
    CHECK(rc == 0);
    const std::string csv = slurp(fs::path(dir / "out") / "upstreamness.csv");
    CHECK(csv.find("s1,1") != std::string::npos);
    CHECK(csv.find("s2,2") != std::string::npos);
}

TEST_CASE("tariff build aggregates and lags") {
    TempDir dir("vilab_cli_tariff");
    write(dir / "tariff_lines.csv",
          "year,hs6,mfn_rate,ahs_rate,import_value\n"
          "2000,100110,10,9,30\n"
          "2000,100120,20,18,10\n"
          "2001,100110,8,7,30\n"
          "2001,100120,16,15,10\n");
    write(dir / "hs_concordance.csv",
          "hs6,industry_code\n100110,2410\n100120,2410\n");
    const int rc = run("tariff build --lines " + (dir / "tariff_lines.csv") +
                       " --concordance " + (dir / "hs_concordance.csv") +
                       " --mode weighted --lag 1 --out " + (dir / "out"));
    CHECK(rc == 0);
    const std::string csv = slurp(fs::path(dir / "out") / "tariff_panel.csv");
    CHECK(csv.find("weight_tariff") != std::string::npos);
    CHECK(csv.find("12.5") != std::string::npos);   // 2000 weighted mean
    CHECK(csv.find("simple_tariff_lag1") != std::string::npos);
}

TEST_CASE("synth and estimate chain") {
    TempDir dir("vilab_cli_synth");
    write(dir / "synth.json", R"({"n_firms": 80, "n_industries": 8})");
    CHECK(run("synth --config " + (dir / "synth.json") +
              " --seed 5 --out " + (dir / "out")) == 0);
    const fs::path panel = fs::path(dir / "out") / "panel.csv";
    CHECK(fs::exists(panel));

    // determinism of the generator artifact
    CHECK(run("synth --config " + (dir / "synth.json") + " --seed 5 --out " +
              (dir / "out_b")) == 0);
    CHECK(slurp(panel) == slurp(fs::path(dir / "out_b") / "panel.csv"));

    write(dir / "est.json", R"({
        "outcome": "backward_count",
        "regressors": ["downstream_tariff"],
        "fixed_effects": ["industry_code", "year"],
        "cluster": "firm_id",
        "estimator": "ppml"
    })");
    CHECK(run("estimate --panel " + panel.string() + " --config " +
              (dir / "est.json") + " --out " + (dir / "est_out")) == 0);
    CHECK(fs::exists(fs::path(dir / "est_out") / "estimate.csv"));
    const std::string md = slurp(fs::path(dir / "est_out") / "estimate.md");
    CHECK(md.find("p<.01") != std::string::npos);
}

TEST_CASE("estimate honors filters") {
    TempDir dir("vilab_cli_filter");
    write(dir / "synth.json", R"({"n_firms": 60, "n_industries": 6})");
    REQUIRE(run("synth --config " + (dir / "synth.json") + " --seed 9 --out " +
                dir.path.string()) == 0);
    write(dir / "est.json", R"({
        "outcome": "backward_count",
        "regressors": ["downstream_tariff"],
        "fixed_effects": ["year"],
        "filters": [{"column": "soe", "op": "==", "value": 0}],
        "estimator": "ppml"
    })");
    CHECK(run("estimate --panel " + (dir / "panel.csv") + " --config " +
              (dir / "est.json") + " --out " + (dir / "est_out")) == 0);
}

TEST_CASE("error reporting and exit codes") {
    TempDir dir("vilab_cli_err");
    // config error: bad alpha
    write(dir / "bad.json", R"({"alpha": 2.0})");
    CHECK(run("model solve --config " + (dir / "bad.json")) == 2);
    // config error: missing file
    CHECK(run("model solve --config " + (dir / "missing.json")) == 2);
    // data error: malformed csv column
    write(dir / "io_table.csv", "year,seller_sector,buyer_sector,flow\n");
    write(dir / "sector_totals.csv",
          "year,sector,final_demand,total_output\n2005,s1,1,0\n");
    CHECK(run("ups compute --io " + (dir / "io_table.csv") + " --totals " +
              (dir / "sector_totals.csv") + " --year 2005 --out " +
              (dir / "out")) == 3);
    // no partial artifacts on failure
    CHECK_FALSE(fs::exists(fs::path(dir / "out") / "upstreamness.csv"));
    // parse error
    CHECK(run("model frobnicate") == 2);
}
