#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace cq {

struct CsvTable {
    std::vector<std::string> header;        // empty unless requested
    std::vector<std::vector<double>> rows;  // rectangular
};

// Comma-separated numeric table. Blank lines are skipped; ragged rows and
// non-numeric cells are format errors.
CsvTable read_csv(const std::filesystem::path& path, bool has_header = false);

void write_csv(const std::filesystem::path& path, const std::vector<std::vector<double>>& rows,
               const std::vector<std::string>& header = {});

}  // namespace cq
