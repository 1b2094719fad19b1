#pragma once

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace irswet {

/// Shortest round-trip text for a double; "inf", "-inf", "nan" for specials.
std::string format_number(double x);

/// Column-oriented CSV under construction. Cells are formatted on insertion.
class Table {
public:
    using Cell = std::variant<double, long long, std::string>;

    explicit Table(std::vector<std::string> columns);

    void add_row(std::initializer_list<Cell> cells);
    void add_row(const std::vector<Cell>& cells);

    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t rows() const { return rows_.size(); }
    const std::string& at(std::size_t row, std::size_t col) const { return rows_.at(row).at(col); }

    /// Preamble comment line, header, rows. '\n' line endings.
    void write(std::ostream& os, const std::string& preamble) const;
    std::string to_string(const std::string& preamble) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

/// "# irswet <command> config_hash=<hash> seed=<seed>"
std::string preamble(const std::string& command, const std::string& config_hash, std::uint64_t seed);

/// Writes `content` to `path` through a sibling temporary and a rename.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace irswet
