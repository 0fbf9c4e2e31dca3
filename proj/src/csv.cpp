#include "matrixtx/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace matrixtx {

void CsvTable::add_column(std::string name, std::vector<double> values) {
    if (!columns_.empty() && values.size() != columns_.front().size())
        throw std::invalid_argument("CsvTable: column '" + name +
                                    "' length differs from existing columns");
    names_.push_back(std::move(name));
    columns_.push_back(std::move(values));
}

std::size_t CsvTable::rows() const {
    return columns_.empty() ? 0 : columns_.front().size();
}

std::string CsvTable::to_string() const {
    std::string out;
    for (std::size_t c = 0; c < names_.size(); ++c) {
        if (c) out += ',';
        out += names_[c];
    }
    out += '\n';
    char buf[40];
    for (std::size_t r = 0; r < rows(); ++r) {
        for (std::size_t c = 0; c < columns_.size(); ++c) {
            if (c) out += ',';
            std::snprintf(buf, sizeof buf, "%.17g", columns_[c][r]);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

void CsvTable::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("CsvTable: cannot open '" + path + "'");
    out << to_string();
}

}  // namespace matrixtx
