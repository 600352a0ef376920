#pragma once

#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vamsim {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace csv {

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& field, long line_no,
                           const char* what) {
  std::string t = trim(field);
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
    throw ParseError("line " + std::to_string(line_no) + ": bad " + what +
                     " value '" + field + "'");
  }
  return v;
}

inline std::int64_t parse_int(const std::string& field, long line_no,
                              const char* what) {
  std::string t = trim(field);
  char* end = nullptr;
  errno = 0;
  long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
    throw ParseError("line " + std::to_string(line_no) + ": bad " + what +
                     " value '" + field + "'");
  }
  return static_cast<std::int64_t>(v);
}

// Fixed formatting keeps outputs byte-reproducible.
inline std::string fmt(double v, int decimals = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

class Writer {
 public:
  Writer(const std::string& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    out_ << header << "\n";
  }
  void row(const std::string& line) { out_ << line << "\n"; }

 private:
  std::ofstream out_;
};

struct Row {
  long line_no = 0;
  std::vector<std::string> fields;
};

// Reads non-empty, non-comment rows. Throws if the file cannot be opened.
inline std::vector<Row> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<Row> rows;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    rows.push_back({line_no, split_fields(line)});
  }
  return rows;
}

inline bool looks_like_header(const Row& row) {
  for (const std::string& f : row.fields) {
    std::string t = trim(f);
    if (t.empty()) continue;
    char c = t[0];
    if ((c >= '0' && c <= '9') || c == '-' || c == '+' || c == '.') return false;
  }
  return true;
}

}  // namespace csv
}  // namespace vamsim
