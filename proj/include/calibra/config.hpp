#pragma once

#include <filesystem>
#include <string_view>

#include "calibra/harness.hpp"

namespace calibra {

// Grid configuration. Keys mirror ExperimentGrid:
//
//   class_counts = [3, 10]
//   alpha_presets = ["equal", "skewed"]      # or "10,1,1"
//   sample_sizes = [10000, 100000]
//   binnings = ["equal-width", "equal-frequency"]
//   bins = 10
//   metrics = ["ece", "uce", "vce:entropy"]
//   seeds = [0, 1, 2]                        # or replicates + base_seed
//   large_n = 10000000
//   large_n_replicates = 3
//   keep_data = false
//
// TOML files may use the flat form above or put it under a `[grid]` table;
// only scalars and (possibly multi-line) arrays of scalars are understood.
// Files ending in `.json` are read as a JSON object with the same keys.
ExperimentGrid parse_grid_toml(std::string_view text);
ExperimentGrid parse_grid_json(std::string_view text);
ExperimentGrid load_grid_config(const std::filesystem::path& path);

}  // namespace calibra
