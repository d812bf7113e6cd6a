#include "vilab/csv.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>

#include "vilab/common.hpp"

namespace vilab::csv {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

int File::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return -1;
    return static_cast<int>(it - header.begin());
}

int File::require_column(const std::string& name) const {
    const int idx = column(name);
    if (idx < 0) throw DataError("missing required column: " + name);
    return idx;
}

File read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    File file;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (file.header.empty()) {
            file.header = split_line(t);
        } else {
            auto cells = split_line(t);
            if (cells.size() != file.header.size())
                throw DataError(path + ": row has " +
                                std::to_string(cells.size()) + " cells, header has " +
                                std::to_string(file.header.size()));
            file.rows.push_back(std::move(cells));
        }
    }
    if (file.header.empty()) throw DataError(path + ": missing header row");
    return file;
}

double to_double(const std::string& cell, const std::string& context) {
    if (cell.empty()) return std::nan("");
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size())
        throw DataError("bad numeric value '" + cell + "' in " + context);
    return value;
}

int to_int(const std::string& cell, const std::string& context) {
    int value = 0;
    const auto [ptr, ec] =
        std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size())
        throw DataError("bad integer value '" + cell + "' in " + context);
    return value;
}

}  // namespace vilab::csv
