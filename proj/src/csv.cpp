#include "beamsched/csv.hpp"

#include <charconv>
#include <cmath>

#include "beamsched/error.hpp"

namespace beamsched {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter& CsvWriter::field(std::string_view s) {
  if (!first_) *out_ << ',';
  *out_ << s;
  first_ = false;
  return *this;
}

void CsvWriter::end_row() {
  *out_ << '\n';
  first_ = true;
}

void CsvWriter::header(std::initializer_list<std::string_view> names) {
  for (auto n : names) field(n);
  end_row();
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace beamsched
