#pragma once

#include <optional>
#include <string>
#include <vector>

namespace wfdens::harness::svg {

struct Series
{
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color;
  bool dashed = false;
  //! Optional band drawn behind the line (same length as x).
  std::vector<double> band_lo;
  std::vector<double> band_hi;
};

struct Histogram
{
  std::vector<double> edges;   //!< bins + 1 values
  std::vector<double> heights; //!< density-scaled bar heights
};

struct Panel
{
  std::string title;
  std::string x_label = "x";
  std::string y_label = "density";
  std::optional<Histogram> histogram;
  std::vector<Series> series;
  double x_min = 0.0;
  double x_max = 1.0;
  //! Upper y limit; computed from the data when unset.
  std::optional<double> y_max;
};

//! Grid of line-plot panels with a shared legend.
std::string render_panels(const std::string& title,
                          const std::vector<Panel>& panels,
                          std::size_t columns,
                          const std::optional<std::string>& stamp = std::nullopt);

struct Heatmap
{
  std::string title;
  std::string value_label;
  std::vector<double> rows;    //!< x0 values, bottom to top
  std::vector<double> columns; //!< t values, left to right
  //! rows.size() x columns.size(), row-major; NaN marks a missing cell.
  std::vector<double> values;
};

//! One heatmap per entry, stacked vertically, each with its own colour bar.
std::string render_heatmaps(const std::string& title,
                            const std::vector<Heatmap>& maps,
                            const std::optional<std::string>& stamp = std::nullopt);

//! Histogram on [0, 1] of the samples strictly inside (0, 1), scaled to
//! integrate to 1. Absorbed samples are left out, the same way the
//! normalised kernel estimate leaves them out.
Histogram unit_histogram(const std::vector<double>& sample, std::size_t bins);

} // namespace wfdens::harness::svg
