#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace sdosm::cli {

// Six significant digits; integers and non-finite values stay readable.
inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::string& config_line, const std::vector<std::string>& header) : os_(os) {
    os_ << "# " << config_line << "\n";
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << "\n";
  }

 private:
  std::ostream& os_;
};

}  // namespace sdosm::cli
