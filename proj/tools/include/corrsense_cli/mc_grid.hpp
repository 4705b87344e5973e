#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "corrsense/dicke_spin.hpp"
#include "corrsense/mc_oracle.hpp"
#include "corrsense/noise.hpp"
#include "corrsense_cli/table.hpp"

namespace corrsense::cli {

struct McCase {
  std::string label;
  NoiseModel model;
  SqueezingFamily family;
  int n_qubits = 1;
  double total_time = 1.0;
  double tau = 1.0;
};

// "default": six small configurations under `base`; "zero-noise": the same
// with A = 0; "acceptance": twenty fixed configurations over all spectra,
// spatial correlations and probe families (N <= 8).
std::vector<McCase> mc_grid(std::string_view name, const NoiseModel& base);

struct McReport {
  Table table;
  double max_abs_z = 0.0;
  int within_3 = 0;
};

// One empirical_estimator_variance call per case; case i draws from a seed
// derived from (seed, i).
McReport run_mc_grid(const std::vector<McCase>& cases, std::int64_t trajectories, std::uint64_t seed,
                     const McOptions& options);

}  // namespace corrsense::cli
