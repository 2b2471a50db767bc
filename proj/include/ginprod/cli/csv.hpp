#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ginprod/montecarlo.hpp"

namespace ginprod::cli {

// 17 significant digits, '.' decimal point,
// "nan" / "inf" / "-inf" for non-finite values.
std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  class Field {
   public:
    Field(double v) : text_(format_double(v)) {}
    Field(int v) : text_(std::to_string(v)) {}
    Field(long v) : text_(std::to_string(v)) {}
    Field(bool v) : text_(v ? "1" : "0") {}
    Field(std::string v) : text_(std::move(v)) {}
    Field(const char* v) : text_(v) {}
    const std::string& text() const { return text_; }

   private:
    std::string text_;
  };

  void row(std::initializer_list<Field> fields);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

// trial,index,value,log_value; one row per eigenvalue, trials in order.
void write_samples(std::ostream& out, const std::vector<montecarlo::SampleResult>& results);

}  // namespace ginprod::cli
