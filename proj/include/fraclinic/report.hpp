#pragma once

// Artifact emission and ingestion: an insertion-ordered JSON writer with a
// fixed floating point format, CSV profiles, and atomic file replacement.
// Reports have to be byte identical across runs with the same configuration
// and seed, so every number goes through the same 17 significant digit
// format and field order is decided by the caller, never by a hash map.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclinic/grid.hpp"

namespace fraclinic {

// File trouble, distinct from solver trouble: the driver maps this to exit
// code 4 alongside configuration errors.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 17 significant digits round-trip any double exactly and, unlike shortest
// representation printing, give the same byte sequence for the same value on
// every libc that implements %g correctly.
inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

// JSON has no literals for the non-finite values, so they are emitted as
// strings; finite numbers stay bare.
inline std::string json_number(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  return fmt17(v);
}

}  // namespace detail

// Streaming writer producing a two-space indented document. Objects and
// arrays nest through begin/end pairs; inside an object every value is
// introduced by key() or one of the field() shorthands.
struct JsonWriter {
  std::string out;

  void begin_object() { open('{'); }
  void end_object() { close('}'); }
  void begin_array() { open('['); }
  void end_array() { close(']'); }

  void key(const std::string& k) {
    separate();
    out += detail::json_escape(k);
    out += ": ";
    pending = true;
  }

  void value(double v) { emit(detail::json_number(v)); }
  void value(int v) { emit(std::to_string(v)); }
  void value(long long v) { emit(std::to_string(v)); }
  void value(unsigned long long v) { emit(std::to_string(v)); }
  void value(bool v) { emit(v ? "true" : "false"); }
  void value(const std::string& v) { emit(detail::json_escape(v)); }
  void value(const char* v) { emit(detail::json_escape(v)); }

  void field(const std::string& k, double v) { key(k); value(v); }
  void field(const std::string& k, int v) { key(k); value(v); }
  void field(const std::string& k, long long v) { key(k); value(v); }
  void field(const std::string& k, unsigned long long v) { key(k); value(v); }
  void field(const std::string& k, bool v) { key(k); value(v); }
  void field(const std::string& k, const std::string& v) { key(k); value(v); }
  void field(const std::string& k, const char* v) { key(k); value(v); }

  void number_array(const std::string& k, const std::vector<double>& vs) {
    key(k);
    begin_array();
    for (double v : vs) value(v);
    end_array();
  }

  std::string take() {
    out += '\n';
    return std::move(out);
  }

 private:
  std::vector<bool> dirty;  // one flag per open container
  bool pending = false;     // a key has been written, the next value follows it

  void separate() {
    if (!dirty.empty() && dirty.back()) out += ',';
    out += '\n';
    out.append(2 * dirty.size(), ' ');
    if (!dirty.empty()) dirty.back() = true;
  }

  void emit(const std::string& text) {
    if (pending)
      pending = false;
    else
      separate();
    out += text;
  }

  void open(char c) {
    if (pending)
      pending = false;
    else if (!dirty.empty())
      separate();
    out += c;
    dirty.push_back(false);
  }

  void close(char c) {
    const bool had_items = dirty.back();
    dirty.pop_back();
    if (had_items) {
      out += '\n';
      out.append(2 * dirty.size(), ' ');
    }
    out += c;
  }
};

// Writes next to the target and renames into place, so a crashed run leaves
// either the old artifact or none, never a torn file.
inline void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + tmp.string() + "' for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    f.flush();
    if (!f) throw IoError("write failed on '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move '" + tmp.string() + "' into place: " + ec.message());
}

// Profile layout: header x,q_1,...,q_n then one row per grid node, decimal
// point notation throughout.
inline std::string csv_profile(const GridFunction& q) {
  const int n = q.components();
  std::string out = "x";
  for (int j = 1; j <= n; ++j) out += ",q_" + std::to_string(j);
  out += '\n';
  for (int i = 0; i < q.grid.N; ++i) {
    out += fmt17(q.grid.node(i));
    for (int j = 0; j < n; ++j) {
      out += ',';
      out += fmt17(q.values(i, j));
    }
    out += '\n';
  }
  return out;
}

// Two named columns, used for the path energy profile and the scaling sweep.
inline std::string csv_pairs(const std::string& first, const std::string& second,
                             const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw IoError("csv_pairs: column length mismatch");
  std::string out = first + "," + second + "\n";
  for (size_t i = 0; i < a.size(); ++i) out += fmt17(a[i]) + "," + fmt17(b[i]) + "\n";
  return out;
}

// Rebuilds a grid function from the profile layout above. The x column must
// come out as a uniform grid symmetric about zero, checked to a tolerance
// well below one spacing; anything else means the file was not produced by
// this toolchain or was edited, and is refused.
inline GridFunction parse_csv_profile(const std::string& text) {
  std::vector<std::string> lines;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
    pos = eol + 1;
  }
  if (lines.size() < 3) throw IoError("profile CSV needs a header and at least two rows");

  std::vector<std::string> head;
  {
    size_t start = 0;
    const std::string& h = lines[0];
    while (start <= h.size()) {
      size_t comma = h.find(',', start);
      if (comma == std::string::npos) comma = h.size();
      head.push_back(h.substr(start, comma - start));
      if (comma == h.size()) break;
      start = comma + 1;
    }
  }
  if (head.empty() || head[0] != "x")
    throw IoError("profile CSV header must start with the x column");
  const int n = static_cast<int>(head.size()) - 1;
  if (n < 1) throw IoError("profile CSV has no component columns");
  for (int j = 1; j <= n; ++j)
    if (head[j] != "q_" + std::to_string(j))
      throw IoError("profile CSV header column " + std::to_string(j + 1) +
                    " should be q_" + std::to_string(j));

  const int N = static_cast<int>(lines.size()) - 1;
  Eigen::VectorXd x(N);
  Eigen::MatrixXd vals(N, n);
  for (int i = 0; i < N; ++i) {
    const std::string& row = lines[i + 1];
    size_t start = 0;
    for (int j = 0; j <= n; ++j) {
      size_t comma = row.find(',', start);
      if (comma == std::string::npos) comma = row.size();
      if (j < n && comma == row.size())
        throw IoError("profile CSV row " + std::to_string(i + 2) + " has too few columns");
      const std::string token = row.substr(start, comma - start);
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (token.empty() || end != token.c_str() + token.size())
        throw IoError("profile CSV row " + std::to_string(i + 2) + ", column " +
                      std::to_string(j + 1) + " is not a number");
      if (j == 0)
        x[i] = v;
      else
        vals(i, j - 1) = v;
      start = comma + 1;
    }
  }

  const double X = 0.5 * (x[N - 1] - x[0]);
  if (!(X > 0.0)) throw IoError("profile CSV x column is not increasing");
  const double tol = 1e-9 * (1.0 + X);
  if (std::abs(x[0] + x[N - 1]) > tol)
    throw IoError("profile CSV grid is not symmetric about zero");
  const double h = 2.0 * X / (N - 1);
  for (int i = 0; i < N; ++i)
    if (std::abs(x[i] - (-X + i * h)) > tol)
      throw IoError("profile CSV grid is not uniform");

  GridFunction q(Grid(X, N), n);
  q.values = vals;
  return q;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read '" + path.string() + "'");
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (f.bad()) throw IoError("read failed on '" + path.string() + "'");
  return text;
}

}  // namespace fraclinic
