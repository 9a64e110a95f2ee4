#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cumident {

// Numeric table read from a headed CSV file. A column named "date" (any
// case) or a first column that does not parse as a number is kept as
// labels and excluded from `values`.
struct CsvTable {
    std::vector<std::string> headers;  // numeric columns only
    Eigen::MatrixXd values;
    std::optional<std::string> date_header;
    std::vector<std::string> dates;

    int column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in, const std::string& source = "<stream>");
CsvTable read_csv_file(const std::string& path);

// Reads a whitespace/comma separated integer or real matrix without header.
Eigen::MatrixXd read_matrix_file(const std::string& path);

void write_csv(std::ostream& os, const std::vector<std::string>& headers, const Eigen::MatrixXd& values);

}  // namespace cumident
