#include "gpsup/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gpsup/errors.hpp"

namespace gpsup {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

namespace {

bool parse_double(std::string_view text, double& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open table file");
  std::vector<double> a;
  std::vector<double> b;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    const auto comma = line.find(',');
    double x = 0.0;
    double y = 0.0;
    const bool ok = comma != std::string::npos &&
                    parse_double(std::string_view(line).substr(0, comma), x) &&
                    parse_double(std::string_view(line).substr(comma + 1), y);
    if (!ok) {
      if (!header_seen && a.empty()) {
        header_seen = true;
        continue;
      }
      throw ConfigError(path, "malformed row at line " + std::to_string(line_no));
    }
    a.push_back(x);
    b.push_back(y);
  }
  return {std::move(a), std::move(b)};
}

void CsvWriter::comment(std::string_view text) { out_ << "# " << text << '\n'; }

void CsvWriter::header(const std::vector<std::string>& columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::separator() {
  if (row_open_) out_ << ',';
  row_open_ = true;
}

CsvWriter& CsvWriter::cell(double x) {
  separator();
  out_ << format_number(x);
  return *this;
}

CsvWriter& CsvWriter::cell(std::int64_t x) {
  separator();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::cell(std::uint64_t x) {
  separator();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::cell(std::string_view text) {
  separator();
  if (text.find_first_of(",\"\n") != std::string_view::npos) {
    out_ << '"';
    for (char ch : text) {
      if (ch == '"') out_ << '"';
      out_ << ch;
    }
    out_ << '"';
  } else {
    out_ << text;
  }
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  row_open_ = false;
}

}  // namespace gpsup
