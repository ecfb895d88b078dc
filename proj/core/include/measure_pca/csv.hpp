#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace measure_pca {

/// printf "%.17g": enough digits to round-trip every double.
std::string format_double(double x);

/// Writes comma-separated rows to a file. Fields are written verbatim, so
/// callers must not pass values containing commas or quotes.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& fields);
  /// Throws DataError if the stream failed at any point.
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace measure_pca
