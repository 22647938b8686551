#include "output.hpp"

#include <fmt/format.h>

#include <cmath>

#include "foc/errors.hpp"

namespace foc::detail {

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header, std::string hash)
    : out_(path, std::ios::binary | std::ios::trunc), hash_(std::move(hash)), columns_(header.size()) {
  if (!out_) throw DomainError("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

CsvWriter::~CsvWriter() { out_ << "# config_hash=" << hash_ << '\n'; }

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw DomainError("CsvWriter: row width does not match the header");
  std::string line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += fmt::format("{:.17g}", values[i]);
  }
  line += '\n';
  out_ << line;
}

std::vector<std::string> numbered(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(fmt::format("{}_{}", prefix, i));
  return out;
}

void extend(std::vector<double>& row, const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v(i));
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DomainError("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
}

nlohmann::ordered_json to_json_array(const Vec& v) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

}  // namespace foc::detail
