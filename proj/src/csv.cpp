#include "optbench/csv.hpp"

#include "optbench/errors.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace optbench {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

CsvReader::CsvReader(const std::string& path) : path_(path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    header_ = split_csv_line(line);
    for (std::size_t i = 0; i < header_.size(); ++i) index_[header_[i]] = i;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header_.size()) {
            throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(header_.size()) + " fields, got " +
                            std::to_string(cells.size()));
        }
        rows_.push_back(std::move(cells));
    }
}

bool CsvReader::has_column(const std::string& name) const {
    return index_.count(name) > 0;
}

std::size_t CsvReader::column(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end())
        throw DataError(path_ + ": missing required column '" + name + "'");
    return it->second;
}

const std::string& CsvReader::cell(std::size_t row, std::size_t col) const {
    return rows_[row][col];
}

double CsvReader::cell_double(std::size_t row, std::size_t col) const {
    const std::string& s = rows_[row][col];
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE) {
        throw DataError(path_ + ":" + std::to_string(line_of(row)) +
                        ": not a number: '" + s + "'");
    }
    return v;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << content;
    if (!out) throw DataError("write failed: " + path);
}

} // namespace optbench
