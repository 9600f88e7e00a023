#include "wfdens/harness/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace wfdens::harness::svg {

namespace {

constexpr double kPanelW = 360.0;
constexpr double kPanelH = 260.0;
constexpr double kMarginL = 52.0;
constexpr double kMarginR = 14.0;
constexpr double kMarginT = 28.0;
constexpr double kMarginB = 40.0;
constexpr double kTitleH = 36.0;
constexpr double kLegendH = 30.0;

std::string
num(double v, int digits = 2)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string
escape(const std::string& s)
{
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// 1, 2 or 5 times a power of ten, giving about `target` ticks over span.
double
tick_step(double span, int target = 5)
{
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

int
tick_digits(double step)
{
  return step >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log10(step) - 1e-9));
}

void
header(std::ostringstream& os, double w, double h, const std::optional<std::string>& stamp)
{
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w, 0) << "\" height=\""
     << num(h, 0) << "\" viewBox=\"0 0 " << num(w, 0) << ' ' << num(h, 0)
     << "\" font-family=\"sans-serif\">\n";
  if (stamp)
    os << "<!-- generated " << escape(*stamp) << " -->\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

// Linear interpolation through a small viridis-like table.
std::string
colour(double u)
{
  static constexpr std::array<std::array<double, 3>, 5> stops{{{68, 1, 84},
                                                               {59, 82, 139},
                                                               {33, 145, 140},
                                                               {94, 201, 98},
                                                               {253, 231, 37}}};
  u = std::clamp(u, 0.0, 1.0) * (stops.size() - 1);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(u), stops.size() - 2);
  const double f = u - static_cast<double>(i);
  char buf[16];
  std::snprintf(buf,
                sizeof buf,
                "#%02x%02x%02x",
                static_cast<int>(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                static_cast<int>(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                static_cast<int>(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
  return buf;
}

double
panel_y_max(const Panel& p)
{
  if (p.y_max)
    return *p.y_max;
  double top = 0.0;
  if (p.histogram)
    for (double h : p.histogram->heights)
      top = std::max(top, h);
  for (const auto& s : p.series)
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (s.x[i] >= p.x_min && s.x[i] <= p.x_max && std::isfinite(s.y[i]))
        top = std::max(top, s.y[i]);
  return top > 0.0 ? 1.05 * top : 1.0;
}

void
draw_panel(std::ostringstream& os, const Panel& p, double ox, double oy)
{
  const double w = kPanelW - kMarginL - kMarginR;
  const double h = kPanelH - kMarginT - kMarginB;
  const double x0 = ox + kMarginL;
  const double y0 = oy + kMarginT;
  const double y_top = panel_y_max(p);
  auto sx = [&](double x) { return x0 + (x - p.x_min) / (p.x_max - p.x_min) * w; };
  auto sy = [&](double y) { return y0 + h - std::clamp(y / y_top, 0.0, 1.0) * h; };

  os << "<g>\n";
  os << "<text x=\"" << num(ox + kPanelW / 2) << "\" y=\"" << num(oy + 18)
     << "\" font-size=\"13\" text-anchor=\"middle\">" << escape(p.title) << "</text>\n";
  os << "<clipPath id=\"c" << num(ox, 0) << '_' << num(oy, 0) << "\"><rect x=\"" << num(x0)
     << "\" y=\"" << num(y0) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
     << "\"/></clipPath>\n";
  os << "<g clip-path=\"url(#c" << num(ox, 0) << '_' << num(oy, 0) << ")\">\n";

  if (p.histogram) {
    const auto& hist = *p.histogram;
    for (std::size_t i = 0; i < hist.heights.size(); ++i) {
      const double left = sx(hist.edges[i]);
      const double right = sx(hist.edges[i + 1]);
      const double top = sy(hist.heights[i]);
      os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\""
         << num(right - left) << "\" height=\"" << num(y0 + h - top)
         << "\" fill=\"#d9d9d9\" stroke=\"#a6a6a6\" stroke-width=\"0.5\"/>\n";
    }
  }
  for (const auto& s : p.series) {
    if (!s.band_lo.empty() && s.band_lo.size() == s.x.size() && s.band_hi.size() == s.x.size()) {
      os << "<polygon fill=\"" << s.color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        os << num(sx(s.x[i])) << ',' << num(sy(s.band_hi[i])) << ' ';
      for (std::size_t i = s.x.size(); i-- > 0;)
        os << num(sx(s.x[i])) << ',' << num(sy(s.band_lo[i])) << ' ';
      os << "\"/>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
    if (s.dashed)
      os << " stroke-dasharray=\"5,3\"";
    os << " points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]))
        continue;
      os << num(sx(s.x[i])) << ',' << num(sy(s.y[i])) << ' ';
    }
    os << "\"/>\n";
  }
  os << "</g>\n";

  // axes
  os << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(w)
     << "\" height=\"" << num(h) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"0.8\"/>\n";
  const double xs = tick_step(p.x_max - p.x_min);
  for (double v = std::ceil(p.x_min / xs) * xs; v <= p.x_max + 1e-12; v += xs) {
    os << "<line x1=\"" << num(sx(v)) << "\" y1=\"" << num(y0 + h) << "\" x2=\"" << num(sx(v))
       << "\" y2=\"" << num(y0 + h + 4) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(sx(v)) << "\" y=\"" << num(y0 + h + 16)
       << "\" font-size=\"10\" text-anchor=\"middle\">" << num(v, tick_digits(xs)) << "</text>\n";
  }
  const double ys = tick_step(y_top);
  for (double v = 0.0; v <= y_top + 1e-12; v += ys) {
    os << "<line x1=\"" << num(x0 - 4) << "\" y1=\"" << num(sy(v)) << "\" x2=\"" << num(x0)
       << "\" y2=\"" << num(sy(v)) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(sy(v) + 3)
       << "\" font-size=\"10\" text-anchor=\"end\">" << num(v, tick_digits(ys)) << "</text>\n";
  }
  os << "<text x=\"" << num(x0 + w / 2) << "\" y=\"" << num(oy + kPanelH - 6)
     << "\" font-size=\"11\" text-anchor=\"middle\">" << escape(p.x_label) << "</text>\n";
  os << "<text x=\"" << num(ox + 12) << "\" y=\"" << num(y0 + h / 2)
     << "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 " << num(ox + 12)
     << ' ' << num(y0 + h / 2) << ")\">" << escape(p.y_label) << "</text>\n";
  os << "</g>\n";
}

} // namespace

std::string
render_panels(const std::string& title,
              const std::vector<Panel>& panels,
              std::size_t columns,
              const std::optional<std::string>& stamp)
{
  columns = std::max<std::size_t>(1, std::min(columns, panels.size()));
  const std::size_t rows = (panels.size() + columns - 1) / columns;
  const double width = kPanelW * columns;
  const double height = kTitleH + kPanelH * rows + kLegendH;
  std::ostringstream os;
  header(os, width, height, stamp);
  os << "<text x=\"" << num(width / 2) << "\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">"
     << escape(title) << "</text>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const double ox = kPanelW * (i % columns);
    const double oy = kTitleH + kPanelH * (i / columns);
    draw_panel(os, panels[i], ox, oy);
  }

  // legend from the first panel that has series
  const Panel* first = nullptr;
  for (const auto& p : panels)
    if (!p.series.empty()) {
      first = &p;
      break;
    }
  if (first) {
    double x = 20.0;
    const double y = height - kLegendH / 2;
    if (first->histogram) {
      os << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 6) << "\" width=\"16\" height=\"10\""
         << " fill=\"#d9d9d9\" stroke=\"#a6a6a6\"/>\n";
      os << "<text x=\"" << num(x + 22) << "\" y=\"" << num(y + 3)
         << "\" font-size=\"11\">simulated</text>\n";
      x += 100.0;
    }
    for (const auto& s : first->series) {
      os << "<line x1=\"" << num(x) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x + 20)
         << "\" y2=\"" << num(y) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
      if (s.dashed)
        os << " stroke-dasharray=\"5,3\"";
      os << "/>\n";
      os << "<text x=\"" << num(x + 26) << "\" y=\"" << num(y + 4) << "\" font-size=\"11\">"
         << escape(s.label) << "</text>\n";
      x += 40.0 + 7.0 * static_cast<double>(s.label.size());
    }
  }
  os << "</svg>\n";
  return os.str();
}

std::string
render_heatmaps(const std::string& title,
                const std::vector<Heatmap>& maps,
                const std::optional<std::string>& stamp)
{
  constexpr double cell_w = 12.0;
  constexpr double cell_h = 22.0;
  constexpr double left = 60.0;
  constexpr double bar_w = 16.0;
  constexpr double block_gap = 70.0;

  std::size_t max_cols = 1;
  double blocks_h = 0.0;
  for (const auto& m : maps) {
    max_cols = std::max(max_cols, m.columns.size());
    blocks_h += 24.0 + cell_h * m.rows.size() + block_gap;
  }
  const double width = left + cell_w * max_cols + 30.0 + bar_w + 70.0;
  const double height = kTitleH + blocks_h;
  std::ostringstream os;
  header(os, width, height, stamp);
  os << "<text x=\"" << num(width / 2) << "\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">"
     << escape(title) << "</text>\n";

  double oy = kTitleH;
  for (const auto& m : maps) {
    double lo = INFINITY;
    double hi = -INFINITY;
    for (double v : m.values)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12)
      hi = lo + 1.0;

    os << "<text x=\"" << num(left) << "\" y=\"" << num(oy + 16) << "\" font-size=\"13\">"
       << escape(m.title) << "</text>\n";
    const double top = oy + 24.0;
    const std::size_t nr = m.rows.size();
    const std::size_t nc = m.columns.size();
    for (std::size_t r = 0; r < nr; ++r) {
      const double y = top + cell_h * (nr - 1 - r);
      for (std::size_t c = 0; c < nc; ++c) {
        const double v = m.values[r * nc + c];
        const std::string fill = std::isfinite(v) ? colour((v - lo) / (hi - lo)) : "#ffffff";
        os << "<rect x=\"" << num(left + cell_w * c) << "\" y=\"" << num(y) << "\" width=\""
           << num(cell_w) << "\" height=\"" << num(cell_h) << "\" fill=\"" << fill << "\"";
        if (!std::isfinite(v))
          os << " stroke=\"#cc0000\" stroke-width=\"0.5\"";
        os << "/>\n";
      }
      os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y + cell_h / 2 + 4)
         << "\" font-size=\"10\" text-anchor=\"end\">" << num(m.rows[r], 2) << "</text>\n";
    }
    const double bottom = top + cell_h * nr;
    const std::size_t label_every = std::max<std::size_t>(1, nc / 6);
    for (std::size_t c = 0; c < nc; c += label_every) {
      const double x = left + cell_w * (c + 0.5);
      os << "<text x=\"" << num(x) << "\" y=\"" << num(bottom + 14)
         << "\" font-size=\"10\" text-anchor=\"middle\">" << num(m.columns[c], 3) << "</text>\n";
    }
    os << "<text x=\"" << num(left + cell_w * nc / 2) << "\" y=\"" << num(bottom + 30)
       << "\" font-size=\"11\" text-anchor=\"middle\">t</text>\n";
    os << "<text x=\"" << num(16) << "\" y=\"" << num(top + cell_h * nr / 2)
       << "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << num(top + cell_h * nr / 2) << ")\">x0</text>\n";

    // colour bar
    const double bx = left + cell_w * max_cols + 30.0;
    const double bh = cell_h * nr;
    constexpr int steps = 32;
    for (int i = 0; i < steps; ++i) {
      const double u = (i + 0.5) / steps;
      os << "<rect x=\"" << num(bx) << "\" y=\"" << num(top + bh * (1.0 - (i + 1.0) / steps))
         << "\" width=\"" << num(bar_w) << "\" height=\"" << num(bh / steps + 0.5)
         << "\" fill=\"" << colour(u) << "\"/>\n";
    }
    os << "<text x=\"" << num(bx + bar_w + 4) << "\" y=\"" << num(top + 10)
       << "\" font-size=\"10\">" << num(hi, 2) << "</text>\n";
    os << "<text x=\"" << num(bx + bar_w + 4) << "\" y=\"" << num(top + bh)
       << "\" font-size=\"10\">" << num(lo, 2) << "</text>\n";
    os << "<text x=\"" << num(bx) << "\" y=\"" << num(bottom + 14) << "\" font-size=\"10\">"
       << escape(m.value_label) << "</text>\n";
    oy += 24.0 + cell_h * nr + block_gap;
  }
  os << "</svg>\n";
  return os.str();
}

Histogram
unit_histogram(const std::vector<double>& sample, std::size_t bins)
{
  Histogram out;
  bins = std::max<std::size_t>(1, bins);
  out.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    out.edges[i] = static_cast<double>(i) / static_cast<double>(bins);
  out.heights.assign(bins, 0.0);
  std::size_t inside = 0;
  for (double x : sample) {
    if (!(x > 0.0 && x < 1.0))
      continue;
    const auto k = std::min(bins - 1, static_cast<std::size_t>(x * static_cast<double>(bins)));
    out.heights[k] += 1.0;
    ++inside;
  }
  if (inside > 0) {
    const double scale = static_cast<double>(bins) / static_cast<double>(inside);
    for (double& h : out.heights)
      h *= scale;
  }
  return out;
}

} // namespace wfdens::harness::svg
