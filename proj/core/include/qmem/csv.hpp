#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qmem {

/// Shortest round-trip formatting ("%.17g"), locale independent.
std::string format_number(double value);

/// Header-first CSV writer with a fixed column count. Numbers are written
/// with format_number so identical inputs give identical bytes.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  void row(std::span<const double> values);
  void row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }
  /// Leading text cell followed by numbers.
  void row(std::string_view label, std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  void check_width(std::size_t cells) const;

  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t rows_ = 0;
};

}  // namespace qmem
