#pragma once

// Plain-text key-value configs, RFC 4180 CSV, and a minimal SVG writer.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "teichtrop/error.hpp"

namespace teichtrop::io {

/// Shortest text that reads back to the same double.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------------------
// Config: "key = value" lines, '#' comments. Keys may repeat; get() wants a single value.

class Config {
 public:
  static Config parse(std::istream& in, const std::string& origin = "<config>") {
    Config cfg;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string line = trim(raw.substr(0, raw.find('#')));
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw Error(ErrorCode::ParseError, origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      if (key.empty()) throw Error(ErrorCode::ParseError, origin + ":" + std::to_string(line_no) + ": empty key");
      cfg.values_[key].push_back(trim(line.substr(eq + 1)));
    }
    return cfg;
  }

  static Config load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open config " + path.string());
    Config cfg = parse(in, path.string());
    cfg.base_dir_ = path.parent_path();
    return cfg;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  void set(const std::string& key, const std::string& value) { values_[key] = {value}; }

  const std::vector<std::string>& all(const std::string& key) const {
    static const std::vector<std::string> empty;
    auto it = values_.find(key);
    return it == values_.end() ? empty : it->second;
  }

  std::string get(const std::string& key, const std::string& fallback) const {
    const auto& v = all(key);
    if (v.empty()) return fallback;
    if (v.size() > 1) throw Error(ErrorCode::InvalidArgument, "config key '" + key + "' given more than once");
    return v.front();
  }

  double get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return to_double(key, get(key, ""));
  }

  long get_long(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const std::string s = get(key, "");
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw Error(ErrorCode::ParseError, "config key '" + key + "' is not an integer: " + s);
    return v;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string s = get(key, "");
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw Error(ErrorCode::ParseError, "config key '" + key + "' is not a boolean: " + s);
  }

  static std::vector<double> parse_doubles(const std::string& key, const std::string& s) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(to_double(key, tok));
    return out;
  }

  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    return parse_doubles(key, get(key, ""));
  }

  /// Paths are taken relative to the directory of the config file.
  std::filesystem::path get_path(const std::string& key, const std::filesystem::path& fallback) const {
    if (!has(key)) return fallback;
    return resolve(get(key, ""));
  }

  std::filesystem::path resolve(const std::filesystem::path& p) const {
    return p.is_absolute() || base_dir_.empty() ? p : base_dir_ / p;
  }

  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_) out.push_back(k);
    return out;
  }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

 private:
  static double to_double(const std::string& key, const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw Error(ErrorCode::ParseError, "config key '" + key + "' is not a number: " + s);
    return v;
  }

  std::map<std::string, std::vector<std::string>> values_;
  std::filesystem::path base_dir_;
};

// ---------------------------------------------------------------------------------------
// CSV

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  CsvWriter& field(const std::string& s) {
    if (!first_) out_ << ',';
    out_ << csv_field(s);
    first_ = false;
    return *this;
  }
  CsvWriter& field(double x) { return field(format_double(x)); }
  CsvWriter& field(long long x) { return field(std::to_string(x)); }
  CsvWriter& field(long x) { return field(std::to_string(x)); }
  CsvWriter& field(int x) { return field(std::to_string(x)); }
  CsvWriter& field(std::size_t x) { return field(std::to_string(x)); }
  CsvWriter& field(bool x) { return field(std::string(x ? "true" : "false")); }
  CsvWriter& field(const char* s) { return field(std::string(s)); }

  void end_row() {
    out_ << "\r\n";
    first_ = true;
  }

  void row(const std::vector<std::string>& fields) {
    for (const auto& f : fields) field(f);
    end_row();
  }

 private:
  std::ostream& out_;
  bool first_ = true;
};

/// Parses RFC 4180 text (used by tests and for reading exports back).
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(cell));
      cell.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      cell += c;
      any = true;
    }
  }
  if (quoted) throw Error(ErrorCode::ParseError, "unterminated quoted CSV field");
  if (any || !cell.empty()) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------------------
// SVG in unit-disk coordinates: (x, y) in [-1, 1]^2, y up.

class SvgDisk {
 public:
  explicit SvgDisk(int size = 600, std::string title = "") : size_(size) {
    body_ << "<rect width=\"" << size << "\" height=\"" << size << "\" fill=\"white\"/>\n";
    body_ << "<circle cx=\"" << px(0) << "\" cy=\"" << py(0) << "\" r=\"" << fmt(radius()) << "\" fill=\"none\" stroke=\"#888\"/>\n";
    if (!title.empty())
      body_ << "<text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << escape(title) << "</text>\n";
  }

  void point(double x, double y, const std::string& color, double r = 1.5) {
    body_ << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"" << fmt(r) << "\" fill=\"" << color << "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color) {
    body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) body_ << (i ? " " : "") << px(pts[i].first) << "," << py(pts[i].second);
    body_ << "\"/>\n";
  }

  void segment(double x0, double y0, double x1, double y1, const std::string& color, bool dashed = false) {
    body_ << "<line x1=\"" << px(x0) << "\" y1=\"" << py(y0) << "\" x2=\"" << px(x1) << "\" y2=\"" << py(y1) << "\" stroke=\""
          << color << "\"" << (dashed ? " stroke-dasharray=\"4 3\"" : "") << "/>\n";
  }

  void label(double x, double y, const std::string& text, const std::string& color = "black") {
    body_ << "<text x=\"" << px(x) << "\" y=\"" << py(y) << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color
          << "\">" << escape(text) << "</text>\n";
  }

  std::string str() const {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size_ << "\" height=\"" << size_ << "\" viewBox=\"0 0 "
        << size_ << " " << size_ << "\">\n"
        << body_.str() << "</svg>\n";
    return out.str();
  }

 private:
  double radius() const { return 0.45 * size_; }
  std::string px(double x) const { return fmt(size_ / 2.0 + radius() * x); }
  std::string py(double y) const { return fmt(size_ / 2.0 - radius() * y); }
  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
  }
  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '<')
        out += "&lt;";
      else if (c == '>')
        out += "&gt;";
      else if (c == '&')
        out += "&amp;";
      else
        out += c;
    }
    return out;
  }

  int size_;
  std::ostringstream body_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << text;
}

}  // namespace teichtrop::io
