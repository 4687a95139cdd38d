#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gpsup {

/// Shortest round-trip decimal representation of `x` ("inf", "-inf", "nan"
/// for non-finite values). Output is locale-independent and byte-stable.
std::string format_number(double x);

/// Reads a two-column numeric CSV. Blank lines, lines starting with '#', and a
/// single non-numeric header line are skipped. Throws ConfigError on I/O or
/// parse failure.
std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(const std::string& path);

/// Minimal CSV writer: `#` comment preamble, one header, then rows of cells.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void comment(std::string_view text);
  void header(const std::vector<std::string>& columns);

  CsvWriter& cell(double x);
  CsvWriter& cell(std::int64_t x);
  CsvWriter& cell(std::uint64_t x);
  CsvWriter& cell(int x) { return cell(static_cast<std::int64_t>(x)); }
  CsvWriter& cell(std::string_view text);
  CsvWriter& cell(const char* text) { return cell(std::string_view(text)); }
  CsvWriter& cell(bool b) { return cell(std::string_view(b ? "true" : "false")); }
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  bool row_open_ = false;
};

}  // namespace gpsup
