#include "table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include <dmdecoh/errors.hpp>

namespace dmdecoh::cli {

std::string format_number(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific, 8);
    return std::string(buf, r.ptr);
}

void Table::add(std::vector<Cell> row)
{
    if (row.size() != header.size())
        throw std::logic_error("table row width does not match header");
    rows.push_back(std::move(row));
}

namespace {

std::string cell_text(const Cell& c)
{
    struct Visitor
    {
        std::string operator()(double x) const { return format_number(x); }
        std::string operator()(std::int64_t x) const { return std::to_string(x); }
        std::string operator()(bool b) const { return b ? "1" : "0"; }
        std::string operator()(const std::string& s) const
        {
            if (s.find_first_of(",\"\n") == std::string::npos)
                return s;
            std::string q = "\"";
            for (char ch : s) {
                if (ch == '"')
                    q += '"';
                q += ch;
            }
            return q + "\"";
        }
    };
    return std::visit(Visitor{}, c);
}

} // namespace

std::string Table::csv() const
{
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i)
        out += (i ? "," : "") + header[i];
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out += (i ? "," : "") + cell_text(row[i]);
        out += '\n';
    }
    return out;
}

std::string Table::json() const
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) {
                        // Non-finite values have no JSON number form.
                        if (std::isfinite(v))
                            obj[header[i]] = v;
                        else
                            obj[header[i]] = nullptr;
                    } else {
                        obj[header[i]] = v;
                    }
                },
                row[i]);
        }
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError("out", "cannot write " + path.string());
    out << text;
}

std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& name,
                                  const Table& table, bool json)
{
    const auto csv = dir / (name + ".csv");
    write_text(csv, table.csv());
    if (json)
        write_text(dir / (name + ".json"), table.json());
    return csv;
}

} // namespace dmdecoh::cli
