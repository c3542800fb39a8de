#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace d2d::sim {

// Locale-independent shortest round-trip formatting so CSV output is
// byte-identical across runs and worker counts.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

class CsvWriter {
 public:
  explicit CsvWriter(std::string header) { text_ = std::move(header) + "\n"; }

  CsvWriter& cell(double v) { return raw(format_double(v)); }
  CsvWriter& cell(long v) { return raw(std::to_string(v)); }
  CsvWriter& cell(const std::string& v) { return raw(v); }

  void end_row() {
    text_ += '\n';
    row_open_ = false;
  }

  const std::string& text() const { return text_; }

 private:
  CsvWriter& raw(const std::string& s) {
    if (row_open_) text_ += ',';
    text_ += s;
    row_open_ = true;
    return *this;
  }

  std::string text_;
  bool row_open_ = false;
};

}  // namespace d2d::sim
