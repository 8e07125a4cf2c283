#pragma once

#include <charconv>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace bethe_csma::csv {

/// Shortest-independent, locale-free rendering with 17 significant digits.
inline std::string number(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

inline std::string number(std::uint64_t x) { return std::to_string(x); }

/// Minimal CSV writer: comma separated, header row first, no quoting (all
/// fields are numbers or identifiers).
class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(&out) {}

  void row(const std::vector<std::string>& fields) {
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (k) *out_ << ',';
      *out_ << fields[k];
    }
    *out_ << '\n';
  }

 private:
  std::ostream* out_;
};

/// "prefix_0,prefix_1,..." column names.
inline void append_indexed(std::vector<std::string>& fields, std::string_view prefix, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) fields.push_back(std::string(prefix) + "_" + std::to_string(i));
}

}  // namespace bethe_csma::csv
