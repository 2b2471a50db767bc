#include "ginprod/cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace ginprod::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  // to_chars ignores the global locale, so the decimal point is always '.'.
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(std::initializer_list<Field> fields) {
  if (fields.size() != columns_) throw std::logic_error("CsvWriter: column count mismatch");
  bool first = true;
  for (const Field& f : fields) {
    if (!first) out_ << ',';
    out_ << f.text();
    first = false;
  }
  out_ << '\n';
}

void write_samples(std::ostream& out, const std::vector<montecarlo::SampleResult>& results) {
  CsvWriter csv(out, {"trial", "index", "value", "log_value"});
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      csv.row({r.trial, static_cast<long>(i), r.values[i], r.log_values[i]});
    }
  }
}

}  // namespace ginprod::cli
