#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace dmdecoh::cli {

using Cell = std::variant<double, std::int64_t, bool, std::string>;

/// Scientific notation with 9 significant digits, independent of locale; nan and inf spelled out.
std::string format_number(double x);

struct Table
{
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
    std::string csv() const;
    /// Array of objects keyed by the header.
    std::string json() const;
};

void write_text(const std::filesystem::path& path, const std::string& text);

/// Writes name.csv, and name.json when requested; returns the CSV path.
std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& name,
                                  const Table& table, bool json);

} // namespace dmdecoh::cli
