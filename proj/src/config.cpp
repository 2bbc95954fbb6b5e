#include "stam/cli.hpp"

#include "stam/format.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace stam::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> tokens(const std::string& s) {
  std::string t = s;
  for (char& c : t)
    if (c == ',') c = ' ';
  std::istringstream is(t);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

bool parse_double(const std::string& s, double& v) {
  const char* b = s.data();
  const char* e = b + s.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  return ec == std::errc() && p == e;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? " " : "") + parts[i];
  return out;
}

}  // namespace

Config Config::parse(std::istream& is, const std::string& source) {
  Config c;
  std::string line;
  for (int lineno = 1; std::getline(is, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    if (c.values_.count(key))
      throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key `" + key + "`");
    c.values_[key] = trim(line.substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  return parse(in, path);
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = trim(value); }

std::string Config::path(const std::string& key) const { return scope_ + "." + key; }

const std::string* Config::raw(const std::string& key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

void Config::fail(const std::string& key, const std::string& why) const { throw ConfigError(path(key) + ": " + why); }

std::string Config::string(const std::string& key) const {
  const std::string* v = raw(key);
  if (!v) fail(key, "missing required field");
  return resolved_[key] = *v;
}

std::string Config::string(const std::string& key, const std::string& fallback) const {
  const std::string* v = raw(key);
  return resolved_[key] = v ? *v : fallback;
}

double Config::number(const std::string& key) const {
  const std::string* v = raw(key);
  if (!v) fail(key, "missing required field");
  double d;
  if (!parse_double(*v, d)) fail(key, "expected a number, got `" + *v + "`");
  resolved_[key] = format_double(d);
  return d;
}

double Config::number(const std::string& key, double fallback) const {
  if (!raw(key)) {
    resolved_[key] = format_double(fallback);
    return fallback;
  }
  return number(key);
}

std::optional<double> Config::optional_number(const std::string& key) const {
  const std::string* v = raw(key);
  if (!v || *v == "none") {
    resolved_[key] = "none";
    return std::nullopt;
  }
  return number(key);
}

int Config::integer(const std::string& key) const {
  const std::string* v = raw(key);
  if (!v) fail(key, "missing required field");
  int i = 0;
  auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), i);
  if (ec != std::errc() || p != v->data() + v->size()) fail(key, "expected an integer, got `" + *v + "`");
  resolved_[key] = std::to_string(i);
  return i;
}

int Config::integer(const std::string& key, int fallback) const {
  if (!raw(key)) {
    resolved_[key] = std::to_string(fallback);
    return fallback;
  }
  return integer(key);
}

bool Config::flag(const std::string& key, bool fallback) const {
  const std::string* v = raw(key);
  bool b = fallback;
  if (v) {
    if (*v == "true" || *v == "1")
      b = true;
    else if (*v == "false" || *v == "0")
      b = false;
    else
      fail(key, "expected true or false, got `" + *v + "`");
  }
  resolved_[key] = b ? "true" : "false";
  return b;
}

Complex Config::complex(const std::string& key) const {
  const std::string* v = raw(key);
  if (!v) fail(key, "missing required field");
  const auto t = tokens(*v);
  double re = 0.0, im = 0.0;
  if (t.empty() || t.size() > 2 || !parse_double(t[0], re) || (t.size() == 2 && !parse_double(t[1], im)))
    fail(key, "expected `re im`, got `" + *v + "`");
  resolved_[key] = format_double(re) + " " + format_double(im);
  return {re, im};
}

Complex Config::complex(const std::string& key, Complex fallback) const {
  if (!raw(key)) {
    resolved_[key] = format_double(fallback.real()) + " " + format_double(fallback.imag());
    return fallback;
  }
  return complex(key);
}

std::vector<double> Config::numbers(const std::string& key, const std::vector<double>& fallback) const {
  std::vector<double> out = fallback;
  if (const std::string* v = raw(key)) {
    out.clear();
    for (const auto& t : tokens(*v)) {
      double d;
      if (!parse_double(t, d)) fail(key, "expected a list of numbers, got `" + *v + "`");
      out.push_back(d);
    }
    if (out.empty()) fail(key, "empty list");
  }
  std::vector<std::string> parts;
  for (double d : out) parts.push_back(format_double(d));
  resolved_[key] = join(parts);
  return out;
}

std::vector<int> Config::integers(const std::string& key, const std::vector<int>& fallback) const {
  std::vector<int> out = fallback;
  if (const std::string* v = raw(key)) {
    out.clear();
    for (const auto& t : tokens(*v)) {
      int i = 0;
      auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), i);
      if (ec != std::errc() || p != t.data() + t.size()) fail(key, "expected a list of integers, got `" + *v + "`");
      out.push_back(i);
    }
    if (out.empty()) fail(key, "empty list");
  }
  std::vector<std::string> parts;
  for (int i : out) parts.push_back(std::to_string(i));
  resolved_[key] = join(parts);
  return out;
}

double Config::angular_frequency(const std::string& key) const {
  const double hz = number(key);
  if (!(hz > 0.0)) fail(key, "frequency must be positive");
  return 2.0 * kPi * hz;
}

double Config::angular_frequency(const std::string& key, double fallback_hz) const {
  if (!raw(key)) {
    number(key, fallback_hz);
    return 2.0 * kPi * fallback_hz;
  }
  return angular_frequency(key);
}

void Config::reject_unused() const {
  for (const auto& [k, v] : values_)
    if (!resolved_.count(k)) fail(k, "unknown field");
}

void Config::write_manifest(std::ostream& os) const {
  for (const auto& [k, v] : resolved_) os << k << " = " << v << '\n';
}

}  // namespace stam::cli
