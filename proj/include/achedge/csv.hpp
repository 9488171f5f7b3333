#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace achedge {

// Shortest round-trip decimal form, '.' separator regardless of locale.
std::string format_number(double v);

// Comma-separated table with a mandatory header row.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  void row(std::initializer_list<double> values);
  void row(const std::vector<double>& values);

 private:
  std::ostream& out_;
  std::size_t width_;
};

}  // namespace achedge
