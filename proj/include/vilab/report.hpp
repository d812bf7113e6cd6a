#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "vilab/common.hpp"
#include "vilab/estimate.hpp"
#include "vilab/panel.hpp"
#include "vilab/statics.hpp"

namespace vilab {

// Stamped into the first lines of every artifact. Deliberately excludes
// timestamps so identical runs produce identical bytes.
struct Provenance {
    std::string config_hash;  // fnv1a of the canonical config serialization
    std::uint64_t seed = 0;
    std::string version = kVersion;

    static Provenance from_config(const nlohmann::json& config,
                                  std::uint64_t seed);
    std::string comment_block(const std::string& prefix) const;
};

// All writers are atomic (temp file + rename) and refuse empty content.
void write_text(const std::string& path, const std::string& content);
void write_csv(const std::string& path, const ColumnTable& table,
               const Provenance& prov);
void write_markdown(const std::string& path, const std::string& body,
                    const Provenance& prov);

// CSV rows: term,coef,se,z
ColumnTable result_table(const EstimationResult& result);

// Regression table in the house style: coefficients with significance stars
// (*** p<.01, ** p<.05, * p<.1), z-statistics in parentheses beneath.
std::string markdown_regression_table(
    const std::vector<std::pair<std::string, EstimationResult>>& columns,
    const std::vector<std::string>& show_terms);

ColumnTable statics_table(const std::vector<StaticsPoint>& points);

}  // namespace vilab
