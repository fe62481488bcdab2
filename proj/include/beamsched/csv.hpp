#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>

namespace beamsched {

/// Shortest representation that round-trips to the same double.
std::string format_double(double v);

/// Minimal CSV emitter; fields are written as given (no quoting is needed for
/// the identifiers and numbers this project emits).
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(&out) {}

  CsvWriter& field(std::string_view s);
  CsvWriter& field(double v) { return field(std::string_view(format_double(v))); }
  CsvWriter& field(long long v) { return field(std::string_view(std::to_string(v))); }
  CsvWriter& field(long v) { return field(static_cast<long long>(v)); }
  CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
  CsvWriter& field(std::optional<double> v) { return v ? field(*v) : field(std::string_view{}); }
  void end_row();

  void header(std::initializer_list<std::string_view> names);

 private:
  std::ostream* out_;
  bool first_ = true;
};

/// Opens `path` for writing, creating parent directories; throws IoError.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace beamsched
