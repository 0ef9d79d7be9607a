#include "qmem/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace qmem {

std::string format_number(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::check_width(std::size_t cells) const {
  if (cells != columns_)
    throw std::logic_error("csv row has " + std::to_string(cells) + " cells, header has " +
                           std::to_string(columns_));
}

void CsvWriter::row(std::span<const double> values) {
  check_width(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
  out_ << '\n';
  ++rows_;
}

void CsvWriter::row(std::string_view label, std::span<const double> values) {
  check_width(values.size() + 1);
  out_ << label;
  for (double v : values) out_ << ',' << format_number(v);
  out_ << '\n';
  ++rows_;
}

}  // namespace qmem
