#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace dcmm {

// Static scatter plot with a fitted line, axes already in log space.
void write_scatter_svg(const std::filesystem::path& path,
                       const std::vector<std::pair<double, double>>& points,
                       double slope, double intercept,
                       const std::string& x_label, const std::string& y_label,
                       const std::string& title);

}  // namespace dcmm
