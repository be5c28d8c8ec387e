#include "cardioquant/csv.hpp"

#include "cardioquant/error.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace cq {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& cell, std::size_t line_no)
{
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    require(ec == std::errc() && ptr == last && !cell.empty(), ErrorKind::format,
            "line " + std::to_string(line_no) + ": '" + cell + "' is not a number");
    return v;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path, bool has_header)
{
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::format, "cannot open " + path.string());
    CsvTable t;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split(trim(line));
        if (has_header && t.header.empty()) {
            t.header = std::move(cells);
            width = t.header.size();
            continue;
        }
        if (width == 0) width = cells.size();
        require(cells.size() == width, ErrorKind::format,
                path.string() + ": ragged row at line " + std::to_string(line_no));
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(parse_number(c, line_no));
        t.rows.push_back(std::move(row));
    }
    require(!has_header || !t.header.empty(), ErrorKind::format, path.string() + ": missing CSV header");
    return t;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::vector<double>>& rows,
               const std::vector<std::string>& header)
{
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorKind::format, "cannot write " + path.string());
    out << std::setprecision(17);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    if (!header.empty()) out << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
        out << '\n';
    }
}

}  // namespace cq
