#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace aclab {

/// Scientific notation with 17 significant digits; the '.' decimal point is locale-independent.
std::string format_number(double x);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Writes header and rows; throws aclab::Error if the file cannot be opened or a row has the
/// wrong width.
void write_csv(const std::filesystem::path& path, const CsvTable& table);

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace aclab
