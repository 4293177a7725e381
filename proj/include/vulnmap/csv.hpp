#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace vulnmap::csv {

/// Minimal RFC-4180-ish reader: comma separated, double quotes with ""
/// escapes, UTF-8 passthrough. Lines starting with '#' are metadata and
/// skipped. The first non-comment line is the header.
class Reader {
 public:
  explicit Reader(const std::filesystem::path& path);

  const std::vector<std::string>& header() const { return header_; }
  /// Column position for `name`; throws MalformedRow when missing.
  std::size_t column(const std::string& name) const;

  /// Reads the next record; empty optional at end of file.
  std::optional<std::vector<std::string>> next();

  /// 1-based line number of the record last returned by next().
  std::size_t line() const { return line_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::vector<std::string> header_;
  std::size_t line_ = 0;
};

/// Writer quoting fields only when they contain a delimiter, quote or
/// newline. Metadata lines ('#'-prefixed) may be emitted before the header.
class Writer {
 public:
  explicit Writer(const std::filesystem::path& path);

  void comment(const std::string& text);
  void row(const std::vector<std::string>& fields);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

/// Round-trip formatting for doubles ("%.17g"); locale independent.
std::string format_double(double v);
/// Compact formatting for report files ("%.6g").
std::string format_short(double v);

/// strtod on the full field; empty optional when the field is not a
/// number or has trailing garbage.
std::optional<double> parse_double(const std::string& field);
std::optional<long long> parse_int(const std::string& field);

std::string trim(const std::string& s);

/// Lower-cases ASCII, strips the Spanish accented code points
/// (á é í ó ú ü ñ and upper-case forms) and collapses surrounding blanks.
/// Used for category matching and geocode-cache joins.
std::string normalize_label(const std::string& s);

std::string read_file(const std::filesystem::path& path);

/// Opens a file for writing, creating parent directories as needed.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace vulnmap::csv
