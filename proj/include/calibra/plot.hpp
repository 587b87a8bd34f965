#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "calibra/binning.hpp"
#include "calibra/harness.hpp"

namespace calibra {

enum class PlotKind { kConvergence, kReliability };

struct PlotSpec {
  PlotKind kind = PlotKind::kConvergence;
  // Convergence only: which scenario to draw and which metric series
  // (`ece`, `uce`, `vce:entropy`, ...). Empty series means all available.
  std::size_t classes = 3;
  std::string alpha = "equal";
  BinningStrategy binning = BinningStrategy::kEqualWidth;
  std::vector<std::string> series;
  bool log_y = true;
  std::filesystem::path output;
};

struct ConvergenceSeries {
  std::string name;
  // (N, median, q1, q3), sorted by N.
  struct Point {
    double n;
    double median;
    double q1;
    double q3;
  };
  std::vector<Point> points;
};

// Selects the scenario's series from grid summaries. Throws
// Error(kMissingSeries) when a requested series has no rows.
std::vector<ConvergenceSeries> select_convergence(const PlotSpec& spec,
                                                  const std::vector<CellSummary>& cells);

std::string render_convergence_svg(const std::vector<ConvergenceSeries>& series,
                                   const std::string& title, bool log_y);
std::string render_reliability_svg(const ReliabilityTable& table);

void emit_plot(const PlotSpec& spec, const std::vector<CellSummary>& cells);
void emit_plot(const PlotSpec& spec, const ReliabilityTable& table);

}  // namespace calibra
