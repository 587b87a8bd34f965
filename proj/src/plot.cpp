#include "calibra/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "calibra/error.hpp"
#include "calibra/io.hpp"

namespace calibra {
namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 480;
constexpr double kLeft = 70;
constexpr double kRight = 170;
constexpr double kTop = 40;
constexpr double kBottom = 60;
constexpr std::array<const char*, 6> kColors = {"#1f77b4", "#d62728", "#2ca02c",
                                                "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

std::string escape(std::string_view s) {
  std::string out;
  for (const char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

// Maps data coordinates onto the plot area.
struct Axes {
  double x0, x1, y0, y1;

  double px(double x) const {
    return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
};

void open_svg(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
      << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << escape(title) << "</text>\n";
}

void draw_frame(std::ostringstream& out, const Axes& a, const std::string& xlabel,
                const std::string& ylabel) {
  out << "<rect class=\"frame\" x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
      << kWidth - kLeft - kRight << "\" height=\"" << kHeight - kTop - kBottom
      << "\" fill=\"none\" stroke=\"black\"/>\n"
      << "<text x=\"" << num(a.px((a.x0 + a.x1) / 2)) << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << escape(xlabel) << "</text>\n"
      << "<text transform=\"translate(18," << num(a.py((a.y0 + a.y1) / 2))
      << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << escape(ylabel) << "</text>\n";
}

void tick(std::ostringstream& out, double x, double y, bool vertical,
          const std::string& label) {
  if (vertical) {
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x)
        << "\" y2=\"" << num(y + 5) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << num(x) << "\" y=\"" << num(y + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << label << "</text>\n";
  } else {
    out << "<line x1=\"" << num(x - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x)
        << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << num(x - 8) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << label
        << "</text>\n";
  }
}

void legend_entry(std::ostringstream& out, std::size_t index, const char* color,
                  const std::string& label, bool dashed) {
  const double x = kWidth - kRight + 15;
  const double y = kTop + 15 + 20 * static_cast<double>(index);
  out << "<line x1=\"" << x << "\" y1=\"" << y << "\" x2=\"" << x + 20 << "\" y2=\"" << y
      << "\" stroke=\"" << color << "\" stroke-width=\"2\""
      << (dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n"
      << "<text x=\"" << x + 26 << "\" y=\"" << y + 4
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(label) << "</text>\n";
}

}  // namespace

std::vector<ConvergenceSeries> select_convergence(const PlotSpec& spec,
                                                  const std::vector<CellSummary>& cells) {
  std::vector<std::string> names = spec.series;
  if (names.empty()) {
    for (const auto& c : cells) {
      if (c.cell.classes == spec.classes && c.cell.alpha == spec.alpha &&
          c.cell.binning == spec.binning &&
          std::find(names.begin(), names.end(), c.cell.metric) == names.end()) {
        names.push_back(c.cell.metric);
      }
    }
    if (names.empty()) {
      throw Error(ErrorCode::kMissingSeries,
                  "no results for C=" + std::to_string(spec.classes) + " alpha=" +
                      spec.alpha + " binning=" + std::string(to_string(spec.binning)));
    }
  }
  std::vector<ConvergenceSeries> out;
  for (const auto& name : names) {
    ConvergenceSeries s{name, {}};
    for (const auto& c : cells) {
      if (c.cell.classes == spec.classes && c.cell.alpha == spec.alpha &&
          c.cell.binning == spec.binning && c.cell.metric == name && c.replicates > 0) {
        s.points.push_back({static_cast<double>(c.cell.n), c.median, c.q1, c.q3});
      }
    }
    if (s.points.empty()) {
      throw Error(ErrorCode::kMissingSeries,
                  "series `" + name + "` has no results for C=" +
                      std::to_string(spec.classes) + " alpha=" + spec.alpha);
    }
    std::sort(s.points.begin(), s.points.end(),
              [](const auto& a, const auto& b) { return a.n < b.n; });
    out.push_back(std::move(s));
  }
  return out;
}

std::string render_convergence_svg(const std::vector<ConvergenceSeries>& series,
                                   const std::string& title, bool log_y) {
  double nmin = INFINITY, nmax = -INFINITY, vmin = INFINITY, vmax = -INFINITY;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      nmin = std::min(nmin, p.n);
      nmax = std::max(nmax, p.n);
      for (const double v : {p.median, p.q1, p.q3}) {
        if (log_y && !(v > 0)) continue;
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
      }
    }
  }
  if (!(nmin <= nmax)) nmin = nmax = 1;
  if (!(vmin <= vmax)) vmin = vmax = log_y ? 1e-3 : 0.0;

  const auto tx = [](double n) { return std::log10(n); };
  const auto ty = [log_y](double v) {
    return log_y ? std::log10(std::max(v, 1e-300)) : v;
  };
  Axes a{std::floor(tx(nmin)) - 0.25, std::ceil(tx(nmax)) + 0.25, 0, 0};
  if (log_y) {
    a.y0 = std::floor(std::log10(vmin));
    a.y1 = std::ceil(std::log10(vmax));
    if (a.y1 <= a.y0) a.y1 = a.y0 + 1;
  } else {
    a.y0 = 0.0;
    a.y1 = vmax > 0 ? vmax * 1.1 : 1.0;
  }

  std::ostringstream out;
  open_svg(out, title);
  draw_frame(out, a, "number of samples N", log_y ? "metric value (log scale)" : "metric value");
  for (int e = static_cast<int>(std::ceil(a.x0)); e <= static_cast<int>(std::floor(a.x1)); ++e) {
    tick(out, a.px(e), kHeight - kBottom, true, "10^" + std::to_string(e));
  }
  if (log_y) {
    for (int e = static_cast<int>(a.y0); e <= static_cast<int>(a.y1); ++e) {
      tick(out, kLeft, a.py(e), false, "10^" + std::to_string(e));
    }
  } else {
    for (int k = 0; k <= 4; ++k) {
      const double v = a.y0 + (a.y1 - a.y0) * k / 4;
      tick(out, kLeft, a.py(v), false, num(v));
    }
  }

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % kColors.size()];
    const auto& s = series[i];
    out << "<g class=\"series\" data-name=\"" << escape(s.name) << "\">\n";
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& p : s.points) {
      out << num(a.px(tx(p.n))) << ',' << num(a.py(ty(p.median))) << ' ';
    }
    out << "\"/>\n";
    for (const auto& p : s.points) {
      const double x = a.px(tx(p.n));
      out << "<line class=\"iqr\" x1=\"" << num(x) << "\" y1=\"" << num(a.py(ty(p.q1)))
          << "\" x2=\"" << num(x) << "\" y2=\"" << num(a.py(ty(p.q3))) << "\" stroke=\""
          << color << "\"/>\n"
          << "<circle class=\"point\" cx=\"" << num(x) << "\" cy=\"" << num(a.py(ty(p.median)))
          << "\" r=\"4\" fill=\"" << color << "\"><title>" << escape(s.name)
          << " N=" << num(p.n) << " median=" << num(p.median) << "</title></circle>\n";
    }
    out << "</g>\n";
    legend_entry(out, i, color, s.name, false);
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_reliability_svg(const ReliabilityTable& table) {
  const Axes a{0.0, 1.0, 0.0, 1.0};
  std::ostringstream out;
  open_svg(out, "Reliability: " + table.metric + " (N=" + std::to_string(table.n) + ")");
  draw_frame(out, a, "predicted", "observed");
  for (int k = 0; k <= 5; ++k) {
    tick(out, a.px(k / 5.0), kHeight - kBottom, true, num(k / 5.0));
    tick(out, kLeft, a.py(k / 5.0), false, num(k / 5.0));
  }
  out << "<line class=\"reference\" x1=\"" << num(a.px(table.domain.lo)) << "\" y1=\""
      << num(a.py(table.domain.lo)) << "\" x2=\"" << num(a.px(table.domain.hi))
      << "\" y2=\"" << num(a.py(table.domain.hi))
      << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
  const char* color = kColors[0];
  for (const auto& r : table.rows) {
    out << "<circle class=\"point\" cx=\"" << num(a.px(r.predicted)) << "\" cy=\""
        << num(a.py(r.observed)) << "\" r=\"5\" fill=\"" << color << "\"><title>bin "
        << r.bin_index << " count=" << r.count << "</title></circle>\n";
  }
  legend_entry(out, 0, color, table.metric + " = " + num(table.value), false);
  legend_entry(out, 1, "black", "perfect calibration", true);
  out << "</svg>\n";
  return out.str();
}

void emit_plot(const PlotSpec& spec, const std::vector<CellSummary>& cells) {
  if (spec.kind != PlotKind::kConvergence) {
    throw Error(ErrorCode::kInvalidArgument, "grid summaries only feed convergence plots");
  }
  const auto series = select_convergence(spec, cells);
  const std::string title = "C=" + std::to_string(spec.classes) + ", alpha=" + spec.alpha +
                            ", " + std::string(to_string(spec.binning));
  write_text_file(spec.output, render_convergence_svg(series, title, spec.log_y));
}

void emit_plot(const PlotSpec& spec, const ReliabilityTable& table) {
  if (spec.kind != PlotKind::kReliability) {
    throw Error(ErrorCode::kInvalidArgument, "reliability tables only feed reliability plots");
  }
  write_text_file(spec.output, render_reliability_svg(table));
}

}  // namespace calibra
