#include "vulnmap/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "vulnmap/errors.hpp"

namespace vulnmap::csv {

namespace {

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

bool needs_quoting(const std::string& f) {
  return f.find_first_of(",\"\n\r") != std::string::npos;
}

}  // namespace

Reader::Reader(const std::filesystem::path& path) : path_(path), in_(path) {
  if (!in_) throw FileNotFound("cannot open " + path.string());
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    header_ = split_record(line);
    return;
  }
  throw MalformedRow(path.string() + ": missing header");
}

std::size_t Reader::column(const std::string& name) const {
  auto it = std::find(header_.begin(), header_.end(), name);
  if (it == header_.end())
    throw MalformedRow(path_.string() + ": missing column '" + name + "'");
  return static_cast<std::size_t>(it - header_.begin());
}

std::optional<std::vector<std::string>> Reader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    return split_record(line);
  }
  return std::nullopt;
}

Writer::Writer(const std::filesystem::path& path) : out_(open_output(path)) {}

void Writer::comment(const std::string& text) { out_ << "# " << text << "\n"; }

void Writer::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    if (needs_quoting(fields[i])) {
      out_ << '"';
      for (char c : fields[i]) {
        if (c == '"') out_ << '"';
        out_ << c;
      }
      out_ << '"';
    } else {
      out_ << fields[i];
    }
  }
  out_ << "\n";
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::optional<double> parse_double(const std::string& field) {
  const std::string t = trim(field);
  if (t.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) return std::nullopt;
  return v;
}

std::optional<long long> parse_int(const std::string& field) {
  const std::string t = trim(field);
  if (t.empty()) return std::nullopt;
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size()) return std::nullopt;
  return v;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string normalize_label(const std::string& s) {
  // Spanish accent folding on the UTF-8 two-byte sequences 0xC3 0x80..0xBF.
  static const char table[64] = {
      'a', 'a', 'a', 'a', 'a', 'a', 0,   'c', 'e', 'e', 'e', 'e', 'i',
      'i', 'i', 'i', 0,   'n', 'o', 'o', 'o', 'o', 'o', 0,   'o', 'u',
      'u', 'u', 'u', 0,   0,   0,   'a', 'a', 'a', 'a', 'a', 'a', 0,
      'c', 'e', 'e', 'e', 'e', 'i', 'i', 'i', 'i', 0,   'n', 'o', 'o',
      'o', 'o', 'o', 0,   'o', 'u', 'u', 'u', 'u', 0,   0,   0};
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    if (c == 0xC3 && i + 1 < s.size()) {
      const unsigned char d = static_cast<unsigned char>(s[i + 1]);
      if (d >= 0x80 && d <= 0xBF && table[d - 0x80]) {
        out += table[d - 0x80];
        ++i;
        continue;
      }
    }
    out += static_cast<char>(std::tolower(c));
  }
  return trim(out);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw FileNotFound("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace vulnmap::csv
