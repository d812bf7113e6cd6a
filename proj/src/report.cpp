#include "vilab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vilab/common.hpp"

namespace vilab {

Provenance Provenance::from_config(const nlohmann::json& config,
                                   std::uint64_t seed) {
    Provenance p;
    std::ostringstream hash;
    hash << std::hex << std::setw(16) << std::setfill('0')
         << fnv1a(config.dump());
    p.config_hash = hash.str();
    p.seed = seed;
    return p;
}

std::string Provenance::comment_block(const std::string& prefix) const {
    std::ostringstream os;
    os << prefix << " config_hash=" << config_hash << "\n";
    os << prefix << " seed=" << seed << "\n";
    os << prefix << " version=" << version << "\n";
    return os.str();
}

void write_text(const std::string& path, const std::string& content) {
    if (content.empty()) throw DataError("refusing to write empty artifact");
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open " + tmp.string());
        out << content;
        if (!out) throw DataError("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

namespace {

std::string format_number(double v) {
    if (std::isnan(v)) return "";
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

}  // namespace

void write_csv(const std::string& path, const ColumnTable& table,
               const Provenance& prov) {
    if (table.empty() || table.names().empty())
        throw DataError("refusing to write an empty table to " + path);
    std::ostringstream os;
    os << prov.comment_block("#");
    const auto& names = table.names();
    for (std::size_t c = 0; c < names.size(); ++c)
        os << (c ? "," : "") << names[c];
    os << "\n";
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < names.size(); ++c) {
            if (c) os << ",";
            if (table.is_numeric(names[c])) {
                os << format_number(table.num(names[c])[r]);
            } else {
                os << table.str(names[c])[r];
            }
        }
        os << "\n";
    }
    write_text(path, os.str());
}

void write_markdown(const std::string& path, const std::string& body,
                    const Provenance& prov) {
    if (body.empty()) throw DataError("refusing to write an empty report");
    std::ostringstream os;
    os << "<!--\n" << prov.comment_block("") << "-->\n\n" << body;
    write_text(path, os.str());
}

ColumnTable result_table(const EstimationResult& result) {
    if (result.terms.empty()) throw DataError("empty estimation result");
    ColumnTable out;
    std::vector<std::string> terms = result.terms;
    std::vector<double> coef(result.coef.data(),
                             result.coef.data() + result.coef.size());
    std::vector<double> se(result.se.data(),
                           result.se.data() + result.se.size());
    std::vector<double> z(result.z.data(), result.z.data() + result.z.size());
    out.add_str("term", std::move(terms));
    out.add_num("coefficient", std::move(coef));
    out.add_num("se", std::move(se));
    out.add_num("z", std::move(z));
    return out;
}

namespace {

std::string stars(double z) {
    const double a = std::abs(z);
    if (a > 2.5758293035489004) return "***";  // p < .01
    if (a > 1.959963984540054) return "**";    // p < .05
    if (a > 1.6448536269514722) return "*";    // p < .1
    return "";
}

std::string fixed3(double v) {
    if (std::isnan(v)) return "";
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << v;
    return os.str();
}

}  // namespace

std::string markdown_regression_table(
    const std::vector<std::pair<std::string, EstimationResult>>& columns,
    const std::vector<std::string>& show_terms) {
    if (columns.empty()) throw DataError("no estimation results to tabulate");
    std::ostringstream os;
    os << "|  |";
    for (const auto& [label, _] : columns) os << " " << label << " |";
    os << "\n|---|";
    for (std::size_t i = 0; i < columns.size(); ++i) os << "---|";
    os << "\n";
    for (const auto& term : show_terms) {
        os << "| " << term << " |";
        for (const auto& [_, res] : columns) {
            const int idx = res.term_index(term);
            if (idx < 0) {
                os << "  |";
            } else {
                os << " " << fixed3(res.coef(idx)) << stars(res.z(idx)) << " |";
            }
        }
        os << "\n|  |";
        for (const auto& [_, res] : columns) {
            const int idx = res.term_index(term);
            if (idx < 0) {
                os << "  |";
            } else {
                os << " (" << fixed3(res.z(idx)) << ") |";
            }
        }
        os << "\n";
    }
    os << "| Observations |";
    for (const auto& [_, res] : columns) os << " " << res.n_used << " |";
    os << "\n| Pseudo R-squared |";
    for (const auto& [_, res] : columns) os << " " << fixed3(res.pseudo_r2) << " |";
    os << "\n\n";
    os << "Robust z-statistics in parentheses. *** p<.01, ** p<.05, * p<.1\n";
    return os.str();
}

ColumnTable statics_table(const std::vector<StaticsPoint>& points) {
    if (points.empty()) throw DataError("no sweep points to tabulate");
    ColumnTable out;
    const std::size_t n = points.size();
    auto collect_num = [&](auto getter) {
        std::vector<double> vals;
        vals.reserve(n);
        for (const auto& p : points) vals.push_back(getter(p));
        return vals;
    };
    auto collect_flag = [&](auto getter) {
        std::vector<double> vals;
        vals.reserve(n);
        for (const auto& p : points) vals.push_back(getter(p) ? 1.0 : 0.0);
        return vals;
    };
    out.add_num("alpha", collect_num([](const auto& p) { return p.alpha; }));
    out.add_num("t", collect_num([](const auto& p) { return p.t; }));
    out.add_num("tau", collect_num([](const auto& p) { return p.tau; }));
    out.add_num("constrained",
                collect_flag([](const auto& p) { return p.constrained; }));
    out.add_num("e_n", collect_num([](const auto& p) { return p.e_n; }));
    out.add_num("e_v", collect_num([](const auto& p) { return p.e_v; }));
    out.add_num("delta_u", collect_num([](const auto& p) { return p.delta_u; }));
    out.add_num("en_interior",
                collect_flag([](const auto& p) { return p.en_interior; }));
    out.add_num("ev_interior",
                collect_flag([](const auto& p) { return p.ev_interior; }));
    out.add_num("soc_ok", collect_flag([](const auto& p) { return p.soc_ok; }));
    out.add_num("constraint_bound",
                collect_flag([](const auto& p) { return p.constraint_bound; }));
    out.add_num("import_risk_active", collect_flag([](const auto& p) {
                    return p.import_risk_active;
                }));
    out.add_num("d_delta_u_dt_analytic", collect_num([](const auto& p) {
                    return p.d_delta_u_dt_analytic;
                }));
    out.add_num("d_delta_u_dt_fd",
                collect_num([](const auto& p) { return p.d_delta_u_dt_fd; }));
    out.add_num("d_delta_u_dtau_analytic", collect_num([](const auto& p) {
                    return p.d_delta_u_dtau_analytic;
                }));
    out.add_num("d_delta_u_dtau_fd",
                collect_num([](const auto& p) { return p.d_delta_u_dtau_fd; }));
    out.add_num("d_en_dt_fd",
                collect_num([](const auto& p) { return p.d_en_dt_fd; }));
    out.add_num("d_en_dtau_fd",
                collect_num([](const auto& p) { return p.d_en_dtau_fd; }));
    out.add_num("theorem_ordering",
                collect_flag([](const auto& p) { return p.theorem_ordering; }));
    std::vector<std::string> errors;
    errors.reserve(n);
    for (const auto& p : points) errors.push_back(p.error);
    out.add_str("error", std::move(errors));
    return out;
}

}  // namespace vilab
