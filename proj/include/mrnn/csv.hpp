#pragma once

#include <cstddef>
#include <fstream>
#include <string>
#include <vector>

namespace mrnn {

std::string trim(const std::string& s);

// Whole-field parse; throws ConfigError on trailing garbage or empty input.
double parse_double(const std::string& text);

// Shortest representation that round-trips to the same double.
std::string format_double(double value);

struct CsvTable {
    std::string path;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Throws IoError naming the missing column.
    std::size_t column_index(const std::string& name) const;
};

// Header row required; fields may be double-quoted. Throws IoError.
CsvTable read_csv(const std::string& path);

// Writes '\n'-terminated rows; throws IoError when the file cannot be opened.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& fields);
    void close();

private:
    std::string path_;
    std::ofstream out_;
    std::size_t width_;
};

}  // namespace mrnn
