#include "cumident/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "cumident/error.hpp"

namespace cumident {

namespace {

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r\"");
    if (b == std::string::npos)
        return "";
    auto e = s.find_last_not_of(" \t\r\"");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep))
        out.push_back(trim(cell));
    if (!line.empty() && line.back() == sep)
        out.emplace_back();
    return out;
}

std::optional<double> parse_number(const std::string& s)
{
    if (s.empty())
        return std::nullopt;
    double v = 0.0;
    const char* first = s.data();
    if (*first == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool is_blank(const std::string& line)
{
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

int CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < headers.size(); ++i)
        if (headers[i] == name)
            return static_cast<int>(i);
    if (auto idx = parse_number(name); idx && *idx >= 1 && *idx <= headers.size() && *idx == std::floor(*idx))
        return static_cast<int>(*idx) - 1;
    throw ConfigError("unknown column '" + name + "'");
}

CsvTable read_csv(std::istream& in, const std::string& source)
{
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (is_blank(line) || line[0] == '#')
            continue;
        header = split(line, ',');
        break;
    }
    if (header.empty())
        throw InputError(source + ": empty file, expected a header row");

    std::vector<std::vector<std::string>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_blank(line) || line[0] == '#')
            continue;
        auto cells = split(line, ',');
        if (cells.size() != header.size())
            throw InputError(source + ": line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                             " fields, header has " + std::to_string(header.size()));
        rows.push_back(std::move(cells));
    }
    if (rows.empty())
        throw InputError(source + ": no data rows");

    int date_col = -1;
    for (std::size_t c = 0; c < header.size(); ++c)
        if (lower(header[c]) == "date")
            date_col = static_cast<int>(c);
    if (date_col < 0 && !parse_number(rows[0][0]) && !rows[0][0].empty())
        date_col = 0;

    CsvTable table;
    std::vector<int> numeric;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (static_cast<int>(c) == date_col)
            continue;
        numeric.push_back(static_cast<int>(c));
        table.headers.push_back(header[c]);
    }
    if (numeric.empty())
        throw InputError(source + ": no numeric columns");
    if (date_col >= 0) {
        table.date_header = header[date_col];
        for (const auto& r : rows)
            table.dates.push_back(r[date_col]);
    }

    table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(numeric.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < numeric.size(); ++c) {
            const std::string& cell = rows[r][numeric[c]];
            auto v = parse_number(cell);
            if (!v || !std::isfinite(*v))
                throw InputError(source + ": missing or non-numeric value '" + cell + "' in column '" +
                                 header[numeric[c]] + "', data row " + std::to_string(r + 1));
            table.values(r, c) = *v;
        }
    return table;
}

CsvTable read_csv_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path);
    return read_csv(in, path);
}

Eigen::MatrixXd read_matrix_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::replace(line.begin(), line.end(), ',', ' ');
        if (is_blank(line) || line[0] == '#')
            continue;
        std::istringstream ss(line);
        std::vector<double> row;
        std::string tok;
        while (ss >> tok) {
            auto v = parse_number(tok);
            if (!v)
                throw InputError(path + ": cannot parse '" + tok + "'");
            row.push_back(*v);
        }
        if (!rows.empty() && row.size() != rows[0].size())
            throw InputError(path + ": ragged matrix");
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw InputError(path + ": empty matrix file");
    Eigen::MatrixXd m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(i, j) = rows[i][j];
    return m;
}

void write_csv(std::ostream& os, const std::vector<std::string>& headers, const Eigen::MatrixXd& values)
{
    for (std::size_t c = 0; c < headers.size(); ++c)
        os << (c ? "," : "") << headers[c];
    os << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c)
            os << (c ? "," : "") << values(r, c);
        os << '\n';
    }
}

}  // namespace cumident
