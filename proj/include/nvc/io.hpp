#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nvc {

inline constexpr int kCsvSchemaVersion = 1;

/// Every numeric output is printed with 9 significant digits.
inline std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

/// Column-oriented CSV with a leading "# schema=1" comment line.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(const std::vector<double>& values) {
        if (values.size() != columns_.size())
            throw std::invalid_argument("CsvWriter: row width mismatch");
        rows_.push_back(values);
    }

    std::string str() const {
        std::string out = "# schema=" + std::to_string(kCsvSchemaVersion) + "\n";
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            out += columns_[i];
            out += (i + 1 < columns_.size()) ? ',' : '\n';
        }
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                out += format_g9(row[i]);
                out += (i + 1 < row.size()) ? ',' : '\n';
            }
        }
        return out;
    }

    void write(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + path);
        f << str();
    }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
};

/// Parsed numeric CSV; comment lines starting with '#' are skipped and the
/// first remaining line is the header.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return static_cast<int>(i);
        return -1;
    }

    int require_column(const std::string& name) const {
        const int i = column(name);
        if (i < 0) throw std::runtime_error("missing CSV column: " + name);
        return i;
    }
};

inline CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!have_header) {
            table.columns = cells;
            have_header = true;
            continue;
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            std::size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(c, &pos);
            } catch (const std::exception&) {
                throw std::runtime_error("non-numeric CSV cell: '" + c + "'");
            }
            if (pos != c.size()) throw std::runtime_error("non-numeric CSV cell: '" + c + "'");
            row.push_back(v);
        }
        if (row.size() != table.columns.size())
            throw std::runtime_error("CSV row width does not match header");
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw std::runtime_error("empty CSV input");
    return table;
}

inline CsvTable read_csv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open input file: " + path);
    return read_csv(f);
}

}  // namespace nvc
