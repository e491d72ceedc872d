#pragma once

// Plain text run configuration: bracketed section headers, one key = value
// pair per line, # starts a comment. The parser records the position of
// every key and value so later stages can point at the exact line and column
// when a value fails to convert or a key is not part of the schema.

#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclinic/potentials.hpp"

namespace fraclinic {

// Carries the 1-based position the message refers to. The command line
// driver maps this class of failure to exit code 4.
struct ConfigError : std::runtime_error {
  int line = 0;
  int column = 0;
  ConfigError(const std::string& msg, int line_, int column_)
      : std::runtime_error(msg + " (line " + std::to_string(line_) + ", column " +
                           std::to_string(column_) + ")"),
        line(line_),
        column(column_) {}
};

namespace detail {

inline bool config_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

inline bool config_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '-';
}

}  // namespace detail

struct ConfigEntry {
  std::string value;
  int line = 0;
  int key_column = 0;    // where the key starts, for schema complaints
  int value_column = 0;  // where the value starts, for conversion complaints
  mutable bool used = false;
};

// Flat view of the file: entries are addressed as "section.key". The raw
// text is kept verbatim because every report echoes the configuration it ran
// under, and the echo has to be byte exact for the determinism contract.
struct ParsedConfig {
  std::string raw;
  std::map<std::string, ConfigEntry> entries;

  static ParsedConfig from_text(const std::string& text) {
    ParsedConfig cfg;
    cfg.raw = text;
    std::string section;
    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
      size_t eol = text.find('\n', pos);
      if (eol == std::string::npos) eol = text.size();
      const std::string line = text.substr(pos, eol - pos);
      ++line_no;
      cfg.parse_line(line, line_no, section);
      if (eol == text.size()) break;
      pos = eol + 1;
    }
    return cfg;
  }

  bool has(const std::string& key) const { return entries.count(key) != 0; }

  const ConfigEntry& at(const std::string& key) const {
    auto it = entries.find(key);
    if (it == entries.end()) throw ConfigError("missing required key '" + key + "'", 0, 0);
    it->second.used = true;
    return it->second;
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    return at(key).value;
  }

  double get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const ConfigEntry& e = at(key);
    return parse_double(e.value, key, e);
  }

  long long get_int(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    const ConfigEntry& e = at(key);
    char* end = nullptr;
    const long long v = std::strtoll(e.value.c_str(), &end, 10);
    if (e.value.empty() || end != e.value.c_str() + e.value.size())
      throw ConfigError("value for '" + key + "' is not an integer", e.line, e.value_column);
    return v;
  }

  unsigned long long get_u64(const std::string& key, unsigned long long fallback) const {
    if (!has(key)) return fallback;
    const ConfigEntry& e = at(key);
    char* end = nullptr;
    const unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
    if (e.value.empty() || e.value[0] == '-' || end != e.value.c_str() + e.value.size())
      throw ConfigError("value for '" + key + "' is not a nonnegative integer", e.line,
                        e.value_column);
    return v;
  }

  // comma separated list of numbers, at least one element
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    const ConfigEntry& e = at(key);
    std::vector<double> out;
    size_t start = 0;
    while (start <= e.value.size()) {
      size_t comma = e.value.find(',', start);
      if (comma == std::string::npos) comma = e.value.size();
      std::string token = e.value.substr(start, comma - start);
      size_t b = token.find_first_not_of(" \t");
      size_t t = token.find_last_not_of(" \t");
      if (b == std::string::npos)
        throw ConfigError("empty element in the list for '" + key + "'", e.line, e.value_column);
      token = token.substr(b, t - b + 1);
      out.push_back(parse_double(token, key, e));
      if (comma == e.value.size()) break;
      start = comma + 1;
    }
    return out;
  }

  // Every key the schema understands has been read through a getter by the
  // time a run configuration is built; anything still untouched is a typo or
  // an unsupported option and gets refused with its position.
  void reject_unused() const {
    const ConfigEntry* worst = nullptr;
    std::string name;
    for (const auto& kv : entries) {
      if (kv.second.used) continue;
      if (!worst || kv.second.line < worst->line) {
        worst = &kv.second;
        name = kv.first;
      }
    }
    if (worst) throw ConfigError("unknown key '" + name + "'", worst->line, worst->key_column);
  }

 private:
  static double parse_double(const std::string& token, const std::string& key,
                             const ConfigEntry& e) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (token.empty() || end != token.c_str() + token.size())
      throw ConfigError("value for '" + key + "' is not a number", e.line, e.value_column);
    return v;
  }

  void parse_line(const std::string& full, int line_no, std::string& section) {
    std::string line = full;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);

    size_t b = 0;
    while (b < line.size() && detail::config_space(line[b])) ++b;
    size_t e = line.size();
    while (e > b && detail::config_space(line[e - 1])) --e;
    if (b == e) return;

    if (line[b] == '[') {
      if (line[e - 1] != ']')
        throw ConfigError("section header does not close with ']'", line_no,
                          static_cast<int>(e));
      const std::string name = line.substr(b + 1, e - b - 2);
      if (name.empty())
        throw ConfigError("empty section header", line_no, static_cast<int>(b + 1));
      for (size_t i = 0; i < name.size(); ++i)
        if (!detail::config_word_char(name[i]))
          throw ConfigError("bad character in section name", line_no,
                            static_cast<int>(b + 2 + i));
      section = name;
      return;
    }

    const size_t eq = line.find('=', b);
    if (eq == std::string::npos || eq >= e)
      throw ConfigError("expected 'key = value'", line_no, static_cast<int>(b + 1));

    size_t ke = eq;
    while (ke > b && detail::config_space(line[ke - 1])) --ke;
    const std::string key = line.substr(b, ke - b);
    if (key.empty()) throw ConfigError("missing key before '='", line_no, static_cast<int>(b + 1));
    for (size_t i = 0; i < key.size(); ++i)
      if (!detail::config_word_char(key[i]))
        throw ConfigError("bad character in key name", line_no, static_cast<int>(b + 1 + i));
    if (section.empty())
      throw ConfigError("key outside of any [section]", line_no, static_cast<int>(b + 1));

    size_t vb = eq + 1;
    while (vb < e && detail::config_space(line[vb])) ++vb;
    const std::string value = line.substr(vb, e - vb);
    if (value.empty())
      throw ConfigError("missing value after '='", line_no, static_cast<int>(eq + 2));

    ConfigEntry entry;
    entry.value = value;
    entry.line = line_no;
    entry.key_column = static_cast<int>(b + 1);
    entry.value_column = static_cast<int>(vb + 1);
    const std::string addr = section + "." + key;
    if (!entries.emplace(addr, entry).second)
      throw ConfigError("duplicate key '" + addr + "'", line_no, entry.key_column);
  }
};

// Everything a run can be asked to do, with defaults chosen so that a nearly
// empty file is already a sensible small experiment. Sections group related
// knobs; a mode only reads the fields it needs, but every key listed here is
// accepted in any mode so one file can drive a whole pipeline.
struct RunConfig {
  // [grid]
  double X = 8.0;
  int N = 257;

  // [fractional]
  double s = 0.5;
  double t_exponent = 4.0;

  // [potential] selection plus the shared parameter block
  std::string potential;  // empty means the mode default
  std::string matrix = "harmonic";
  PotentialParams params;

  // [pin] interval, constant datum level, and Holder data of the datum
  double pin_a = -1.0;
  double pin_b = 1.0;
  double pin_q0 = 1.0;
  double alpha = 0.5;
  double beta_bar = 0.0;

  // [solver]
  double tol = 1e-6;
  int max_iter = 2000;
  int K_cut = 10;
  unsigned long long seed = 0;
  int P = 33;
  int max_sweeps = 600;
  double sweep_tol = 2e-3;
  int refine_max_iter = 4000;
  double audit_K = 10.0;

  // [certify]
  double A_mult = 2.0;
  std::vector<double> eta{0.1};
  int k_max = 30;

  // [scaling]
  double scaling_M = -1.0;
  std::vector<double> scaling_eps{1.0, 0.5, 0.25, 0.125};
  double scaling_X = 1.25;
  int scaling_N = 5121;
  double well_scale = 0.02;

  std::string raw;  // the config file exactly as read
};

inline RunConfig load_run_config(const ParsedConfig& c) {
  RunConfig r;
  r.raw = c.raw;

  r.X = c.get_double("grid.X", r.X);
  r.N = static_cast<int>(c.get_int("grid.N", r.N));

  r.s = c.get_double("fractional.s", r.s);
  r.t_exponent = c.get_double("fractional.t_exponent", r.t_exponent);

  r.potential = c.get_string("potential.name", r.potential);
  r.matrix = c.get_string("potential.matrix", r.matrix);
  r.params.R = c.get_double("potential.R", r.params.R);
  r.params.eps = c.get_double("potential.eps", r.params.eps);
  r.params.delta = c.get_double("potential.delta", r.params.delta);
  r.params.scale = c.get_double("potential.scale", r.params.scale);
  r.params.p = c.get_double("potential.p", r.params.p);
  r.params.mu = c.get_double("potential.mu", r.params.mu);
  r.params.a0 = c.get_double("potential.a0", r.params.a0);
  r.params.shift = c.get_double("potential.shift", r.params.shift);
  r.params.components = static_cast<int>(c.get_int("potential.components", r.params.components));

  r.pin_a = c.get_double("pin.a", r.pin_a);
  r.pin_b = c.get_double("pin.b", r.pin_b);
  r.pin_q0 = c.get_double("pin.q0", r.pin_q0);
  r.alpha = c.get_double("pin.alpha", r.alpha);
  r.beta_bar = c.get_double("pin.beta_bar", r.beta_bar);

  r.tol = c.get_double("solver.tol", r.tol);
  r.max_iter = static_cast<int>(c.get_int("solver.max_iter", r.max_iter));
  r.K_cut = static_cast<int>(c.get_int("solver.K_cut", r.K_cut));
  r.seed = c.get_u64("solver.seed", r.seed);
  r.P = static_cast<int>(c.get_int("solver.P", r.P));
  r.max_sweeps = static_cast<int>(c.get_int("solver.max_sweeps", r.max_sweeps));
  r.sweep_tol = c.get_double("solver.sweep_tol", r.sweep_tol);
  r.refine_max_iter = static_cast<int>(c.get_int("solver.refine_max_iter", r.refine_max_iter));
  r.audit_K = c.get_double("solver.audit_K", r.audit_K);

  r.A_mult = c.get_double("certify.A_mult", r.A_mult);
  r.eta = c.get_list("certify.eta", r.eta);
  r.k_max = static_cast<int>(c.get_int("certify.k_max", r.k_max));

  r.scaling_M = c.get_double("scaling.M", r.scaling_M);
  r.scaling_eps = c.get_list("scaling.eps", r.scaling_eps);
  r.scaling_X = c.get_double("scaling.X", r.scaling_X);
  r.scaling_N = static_cast<int>(c.get_int("scaling.N", r.scaling_N));
  r.well_scale = c.get_double("scaling.well_scale", r.well_scale);

  c.reject_unused();
  return r;
}

}  // namespace fraclinic
