#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corrsense/noise.hpp"
#include "corrsense/uncertainty.hpp"
#include "corrsense_cli/table.hpp"

namespace corrsense::cli {

struct Panel {
  std::string name;
  Table table;
};

// Zero or empty fields keep the figure's own defaults.
struct FigureOptions {
  int n_min = 0;
  int n_max = 0;
  int points = 0;
  double total_time = 0.0;  // in units of 1 / A
  double strength = 1.0;    // A
  double sigma = 0.0;       // in units of A
  std::vector<SpectrumKind> spectra;
  std::optional<FormulaTag> formula;
  int threads = 1;
};

const std::vector<std::string>& figure_ids();

// Data behind one figure, as long-format tables. Unknown ids raise
// ValidationError.
std::vector<Panel> make_figure(std::string_view id, const FigureOptions& options);

}  // namespace corrsense::cli
