#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace housim::cli {

/// Shortest text with 17 significant digits; NaN and infinities map to "nan", "inf", "-inf".
std::string format_double(double x);

/// RFC 4180 quoting: fields containing a comma, quote or line break are quoted.
std::string quote_field(std::string_view field);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void comment(std::string_view text);
  void header(const std::vector<std::string>& names);

  CsvWriter& field(std::string_view text);
  CsvWriter& field(double x);  // NaN becomes an empty field
  CsvWriter& field(std::optional<double> x);
  CsvWriter& field(std::uint64_t x);
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  bool row_started_ = false;
};

}  // namespace housim::cli
