#include "housim_cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace housim::cli {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  if (res.ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, res.ptr);
}

std::string quote_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void CsvWriter::comment(std::string_view text) { out_ << "# " << text << "\r\n"; }

void CsvWriter::header(const std::vector<std::string>& names) {
  for (const auto& n : names) field(n);
  end_row();
}

void CsvWriter::separator() {
  if (row_started_) out_ << ',';
  row_started_ = true;
}

CsvWriter& CsvWriter::field(std::string_view text) {
  separator();
  out_ << quote_field(text);
  return *this;
}

CsvWriter& CsvWriter::field(double x) {
  separator();
  if (!std::isnan(x)) out_ << format_double(x);
  return *this;
}

CsvWriter& CsvWriter::field(std::optional<double> x) { return field(x.value_or(std::nan(""))); }

CsvWriter& CsvWriter::field(std::uint64_t x) {
  separator();
  out_ << x;
  return *this;
}

void CsvWriter::end_row() {
  out_ << "\r\n";
  row_started_ = false;
}

}  // namespace housim::cli
