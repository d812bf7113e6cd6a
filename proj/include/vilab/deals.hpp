#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vilab {

struct DealRecord {
    std::string deal_id;
    int year = 0;
    std::string acquirer_firm_id;
    std::string acquirer_industry;  // 4-digit code
    std::string target_industry;    // 4-digit code
    std::string status;
    std::optional<int> tech_flag;  // pre-supplied technology label

    static std::vector<DealRecord> from_csv(const std::string& path);
};

enum class DealDirection { Backward, Forward, Horizontal };

// Backward when the target sits higher up the production chain than the
// acquirer, Forward when lower. Identical industry codes are Horizontal, and
// so are numerically tied upstreamness values across distinct codes.
DealDirection classify_deal(const DealRecord& deal,
                            const std::map<std::string, double>& ups);

// Nearest-rank quartile assignment (1..4) of industries by upstreamness;
// boundary values fall to the lower quartile. Requires >= 4 industries.
// All-equal inputs degenerate to quartile 1 for every industry.
std::map<std::string, int> upstream_quartiles(
    const std::map<std::string, double>& ups);

}  // namespace vilab
