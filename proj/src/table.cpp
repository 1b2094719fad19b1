#include "irswet/table.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace irswet {

std::string format_number(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0) return "0";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns))
{
    if (columns_.empty()) throw std::invalid_argument("Table: at least one column is required");
}

void Table::add_row(std::initializer_list<Cell> cells) { add_row(std::vector<Cell>(cells)); }

void Table::add_row(const std::vector<Cell>& cells)
{
    if (cells.size() != columns_.size())
        throw std::invalid_argument("Table: row has " + std::to_string(cells.size()) + " cells, expected " +
                                    std::to_string(columns_.size()));
    std::vector<std::string> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
        if (const auto* d = std::get_if<double>(&c)) row.push_back(format_number(*d));
        else if (const auto* i = std::get_if<long long>(&c)) row.push_back(std::to_string(*i));
        else row.push_back(std::get<std::string>(c));
    }
    rows_.push_back(std::move(row));
}

void Table::write(std::ostream& os, const std::string& pre) const
{
    if (!pre.empty()) os << pre << '\n';
    for (std::size_t c = 0; c < columns_.size(); ++c) os << (c ? "," : "") << columns_[c];
    os << '\n';
    for (const auto& row : rows_) {
        for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
        os << '\n';
    }
}

std::string Table::to_string(const std::string& pre) const
{
    std::ostringstream os;
    write(os, pre);
    return os.str();
}

std::string preamble(const std::string& command, const std::string& config_hash, std::uint64_t seed)
{
    return "# irswet " + command + " config_hash=" + config_hash + " seed=" + std::to_string(seed);
}

void write_file_atomic(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

} // namespace irswet
