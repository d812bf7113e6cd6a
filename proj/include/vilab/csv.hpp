#pragma once

#include <string>
#include <vector>

namespace vilab::csv {

// Minimal CSV support: comma-separated, UTF-8, header row required, lines
// starting with '#' skipped (provenance headers). No quoting support; field
// values must not contain commas.
struct File {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 when absent
    int require_column(const std::string& name) const;
};

File read_file(const std::string& path);
std::vector<std::string> split_line(const std::string& line);

double to_double(const std::string& cell, const std::string& context);
int to_int(const std::string& cell, const std::string& context);

}  // namespace vilab::csv
