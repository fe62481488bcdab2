#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace beamsched {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Writes a small standalone SVG line chart. Convenience output only.
void write_svg_chart(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                     const std::string& y_label, const std::vector<Series>& series);

}  // namespace beamsched
