#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "foc/linalg.hpp"
#include "json.hpp"

namespace foc::detail {

/// Comma-separated rows, 17 significant digits, LF endings, trailing config-hash comment.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header, std::string hash);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<double>& values);

 private:
  std::ofstream out_;
  std::string hash_;
  std::size_t columns_;
};

/// Column names prefix_1, ..., prefix_n.
std::vector<std::string> numbered(const std::string& prefix, std::size_t n);

/// Appends the entries of v to row.
void extend(std::vector<double>& row, const Vec& v);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);

/// JSON array of a vector's entries.
nlohmann::ordered_json to_json_array(const Vec& v);

}  // namespace foc::detail
