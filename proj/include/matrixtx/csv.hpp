#pragma once

#include <string>
#include <vector>

namespace matrixtx {

/// Column-oriented CSV artifact. Values serialize with 17 significant digits
/// so a re-read is bit-exact.
class CsvTable {
  public:
    void add_column(std::string name, std::vector<double> values);
    std::string to_string() const;
    void write(const std::string& path) const;

    std::size_t rows() const;
    std::size_t columns() const { return names_.size(); }

  private:
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
};

}  // namespace matrixtx
