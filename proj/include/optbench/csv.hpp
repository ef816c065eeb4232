#pragma once

#include <map>
#include <string>
#include <vector>

namespace optbench {

/// Minimal reader for comma-delimited UTF-8 text with a header row.
/// No quoting: none of our file formats carries embedded commas.
class CsvReader {
public:
    explicit CsvReader(const std::string& path);

    /// Column index by header name; throws DataError when absent.
    std::size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;

    std::size_t row_count() const { return rows_.size(); }
    /// 1-based file line number of data row i (for error messages).
    std::size_t line_of(std::size_t i) const { return i + 2; }

    const std::string& cell(std::size_t row, std::size_t col) const;
    double cell_double(std::size_t row, std::size_t col) const;
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::vector<std::string> header_;
    std::map<std::string, std::size_t> index_;
    std::vector<std::vector<std::string>> rows_;
};

/// Split one line on commas (no quoting).
std::vector<std::string> split_csv_line(const std::string& line);

/// Fixed-notation double with enough digits to round-trip; used everywhere
/// we write numbers so reports are byte-stable.
std::string format_double(double v);

/// Write lines (already formatted) to path with LF endings; throws DataError
/// when the file cannot be created.
void write_text_file(const std::string& path, const std::string& content);

} // namespace optbench
