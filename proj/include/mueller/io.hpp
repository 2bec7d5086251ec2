/**
 * @file io.hpp
 * @brief Text formats for matrices and Stokes vectors.
 *
 *  - Mueller file: 4 lines of 4 whitespace-separated reals.
 *  - Jones / coherency file: 2 lines of 2 complex entries, `a+bi`, `a-bi`,
 *    `bi` or a plain real, no spaces inside an entry.
 *  - Stokes file: 4 reals on one or more lines.
 *  - Batch CSV: one matrix per row, 16 reals row-major, optionally
 *    preceded by an id column.
 * Blank lines and lines starting with `#` are ignored everywhere.
 */

#pragma once

#include "mueller/common.hpp"
#include "mueller/mueller_h.hpp"
#include "mueller/polarization.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace mueller::io {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Default 6 significant digits; 17 is lossless for double.
inline constexpr int kDefaultPrecision = 6;
inline constexpr int kFullPrecision = 17;

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline bool is_skippable(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::vector<std::string_view> split_csv(std::string_view s) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                        : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

/// Decimal real with optional sign, fraction and exponent. No inf/nan,
/// no hex, no surrounding whitespace.
inline std::optional<double> parse_real(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::string_view body = s;
  bool negative = false;
  if (body.front() == '+' || body.front() == '-') {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  if (body.empty() || !(std::isdigit(static_cast<unsigned char>(body.front())) || body.front() == '.'))
    return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v,
                                         std::chars_format::general);
  if (ec != std::errc() || ptr != body.data() + body.size()) return std::nullopt;
  return negative ? -v : v;
}

inline std::optional<cdouble> parse_complex(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.back() != 'i') {
    const auto re = parse_real(s);
    if (!re) return std::nullopt;
    return cdouble(*re, 0.0);
  }
  const std::string_view body = s.substr(0, s.size() - 1);
  // Split at the last sign that is neither leading nor part of an exponent.
  size_t split = std::string_view::npos;
  for (size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string_view::npos) {
    const auto im = parse_real(body);
    if (!im) return std::nullopt;
    return cdouble(0.0, *im);
  }
  const auto re = parse_real(body.substr(0, split));
  const auto im = parse_real(body.substr(split));
  if (!re || !im) return std::nullopt;
  return cdouble(*re, *im);
}

inline std::string format_real(double v, int precision = kDefaultPrecision) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

inline std::string format_complex(cdouble z, int precision = kDefaultPrecision) {
  const double re = z.real() == 0.0 ? 0.0 : z.real();
  const double im = z.imag() == 0.0 ? 0.0 : z.imag();
  std::string out = format_real(re, precision);
  out += im < 0.0 ? '-' : '+';
  out += format_real(std::abs(im), precision);
  out += 'i';
  return out;
}

namespace detail {

// Non-comment lines with their 1-based line numbers.
inline std::vector<std::pair<int, std::string>> content_lines(std::istream& in) {
  std::vector<std::pair<int, std::string>> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!is_skippable(line)) out.emplace_back(n, line);
  }
  return out;
}

template <typename T, typename Parse>
std::vector<std::vector<T>> read_grid(std::istream& in, int rows, int cols, Parse parse,
                                      const char* what) {
  const auto lines = content_lines(in);
  if (static_cast<int>(lines.size()) != rows)
    throw ParseError(lines.empty() ? 0 : lines.back().first,
                     std::string("expected ") + std::to_string(rows) + " rows for a " + what +
                         ", found " + std::to_string(lines.size()));
  std::vector<std::vector<T>> out;
  for (const auto& [n, text] : lines) {
    const auto toks = split_ws(text);
    if (static_cast<int>(toks.size()) != cols)
      throw ParseError(n, "expected " + std::to_string(cols) + " entries, found " +
                              std::to_string(toks.size()));
    std::vector<T> row;
    for (const auto tok : toks) {
      const auto v = parse(tok);
      if (!v) throw ParseError(n, "cannot parse entry '" + std::string(tok) + "'");
      row.push_back(*v);
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace detail

inline MuellerMatrix read_mueller(std::istream& in) {
  const auto g = detail::read_grid<double>(in, 4, 4, parse_real, "Mueller matrix");
  MuellerMatrix m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m.m(r, c) = g[r][c];
  return m;
}

inline Matrix2c read_complex2x2(std::istream& in) {
  const auto g = detail::read_grid<cdouble>(in, 2, 2, parse_complex, "2x2 complex matrix");
  Matrix2c m;
  m << g[0][0], g[0][1], g[1][0], g[1][1];
  return m;
}

inline JonesMatrix read_jones(std::istream& in) { return {read_complex2x2(in)}; }

inline StokesVector read_stokes(std::istream& in) {
  std::vector<double> vals;
  int last = 0;
  for (const auto& [n, text] : detail::content_lines(in)) {
    last = n;
    for (const auto tok : detail::split_ws(text)) {
      const auto v = parse_real(tok);
      if (!v) throw ParseError(n, "cannot parse entry '" + std::string(tok) + "'");
      vals.push_back(*v);
    }
  }
  if (vals.size() != 4)
    throw ParseError(last, "expected 4 Stokes components, found " + std::to_string(vals.size()));
  return StokesVector(vals[0], vals[1], vals[2], vals[3]);
}

struct BatchRow {
  int line = 0;
  std::string id;
  std::optional<MuellerMatrix> matrix;
  std::string error;  // set when matrix is absent
};

/// Rows that fail to parse are kept with an error message so callers can
/// report and skip them.
inline std::vector<BatchRow> read_batch(std::istream& in) {
  std::vector<BatchRow> out;
  int ordinal = 0;
  for (const auto& [n, text] : detail::content_lines(in)) {
    ++ordinal;
    BatchRow row;
    row.line = n;
    auto fields = detail::split_csv(detail::trim(text));
    if (fields.size() == 17) {
      row.id = std::string(fields.front());
      fields.erase(fields.begin());
    } else {
      row.id = std::to_string(ordinal);
    }
    if (fields.size() != 16) {
      row.error = "expected 16 or 17 fields, found " + std::to_string(fields.size());
      out.push_back(std::move(row));
      continue;
    }
    MuellerMatrix m;
    for (int k = 0; k < 16 && row.error.empty(); ++k) {
      const auto v = parse_real(fields[k]);
      if (!v)
        row.error = "cannot parse field " + std::to_string(k + 1) + " '" + std::string(fields[k]) + "'";
      else
        m.m(k / 4, k % 4) = *v;
    }
    if (row.error.empty()) row.matrix = m;
    out.push_back(std::move(row));
  }
  return out;
}

// True when any content line contains a comma.
inline bool looks_like_batch(std::string_view text) {
  std::istringstream in{std::string(text)};
  for (const auto& [n, line] : detail::content_lines(in))
    if (line.find(',') != std::string::npos) return true;
  return false;
}

template <typename Derived>
void write_real_matrix(std::ostream& out, const Eigen::MatrixBase<Derived>& m, int precision = kDefaultPrecision) {
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_real(m(r, c), precision);
    }
    out << '\n';
  }
}

template <typename Derived>
void write_complex_matrix(std::ostream& out, const Eigen::MatrixBase<Derived>& m,
                          int precision = kDefaultPrecision) {
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_complex(m(r, c), precision);
    }
    out << '\n';
  }
}

inline void write_mueller(std::ostream& out, const MuellerMatrix& m, int precision = kDefaultPrecision) {
  write_real_matrix(out, m.m, precision);
}

inline void write_jones(std::ostream& out, const JonesMatrix& j, int precision = kDefaultPrecision) {
  write_complex_matrix(out, j.j, precision);
}

inline void write_stokes(std::ostream& out, const StokesVector& s, int precision = kDefaultPrecision) {
  write_real_matrix(out, s.s.transpose(), precision);
}

}  // namespace mueller::io
