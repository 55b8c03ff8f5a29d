#include "sparsest/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>

#include "sparsest/errors.hpp"

namespace sparsest {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"};
constexpr double kMarginLeft = 70.0, kMarginRight = 150.0, kMarginTop = 36.0, kMarginBottom = 50.0;

std::string num(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.2f", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::string tick_label(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.3g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::string escape(const std::string& s) {
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

struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;

  double t(double v) const { return log ? std::log10(v) : v; }
  double fraction(double v) const { return (t(v) - lo) / (hi - lo); }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      for (double e = std::ceil(lo - 1e-9); e <= hi + 1e-9; e += 1.0) out.push_back(std::pow(10.0, e));
      if (out.size() < 2) {
        out = {std::pow(10.0, lo), std::pow(10.0, hi)};
      }
      return out;
    }
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) out.push_back(v);
    return out;
  }
};

Axis make_axis(bool log, const std::vector<const std::vector<double>*>& data) {
  Axis a;
  a.log = log;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto* values : data) {
    for (double v : *values) {
      if (!std::isfinite(v) || (log && v <= 0.0)) continue;
      lo = std::min(lo, a.t(v));
      hi = std::max(hi, a.t(v));
    }
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  if (log) {
    lo = std::floor(lo * 10.0) / 10.0;
    hi = std::ceil(hi * 10.0) / 10.0;
  } else {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

}  // namespace

void LinePlot::render(std::ostream& out) const {
  std::vector<const std::vector<double>*> xs, ys;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw ParameterError("plot series '" + s.label + "' has mismatched lengths");
    xs.push_back(&s.x);
    ys.push_back(&s.y);
  }
  const Axis ax = make_axis(log_x, xs);
  const Axis ay = make_axis(log_y, ys);
  const double pw = width - kMarginLeft - kMarginRight;
  const double ph = height - kMarginTop - kMarginBottom;
  auto px = [&](double v) { return kMarginLeft + ax.fraction(v) * pw; };
  auto py = [&](double v) { return kMarginTop + (1.0 - ay.fraction(v)) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(kMarginLeft + pw / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(title) << "</text>\n";

  for (double t : ax.ticks()) {
    const double x = px(t);
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(kMarginTop) << "\" x2=\"" << num(x) << "\" y2=\""
        << num(kMarginTop + ph) << "\" stroke=\"#e0e0e0\"/>\n";
    out << "<text x=\"" << num(x) << "\" y=\"" << num(kMarginTop + ph + 16) << "\" text-anchor=\"middle\">"
        << tick_label(t) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = py(t);
    out << "<line x1=\"" << num(kMarginLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kMarginLeft + pw)
        << "\" y2=\"" << num(y) << "\" stroke=\"#e0e0e0\"/>\n";
    out << "<text x=\"" << num(kMarginLeft - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
        << tick_label(t) << "</text>\n";
  }
  out << "<rect x=\"" << num(kMarginLeft) << "\" y=\"" << num(kMarginTop) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << num(kMarginLeft + pw / 2) << "\" y=\"" << num(height - 10.0)
      << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  out << "<text transform=\"translate(16," << num(kMarginTop + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if ((log_x && s.x[i] <= 0.0) || (log_y && s.y[i] <= 0.0)) continue;
      points += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
    }
    if (!points.empty()) points.pop_back();
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"" << points << "\"/>\n";
    if (s.markers) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        if ((log_x && s.x[i] <= 0.0) || (log_y && s.y[i] <= 0.0)) continue;
        out << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i])) << "\" r=\"3\" fill=\"" << color
            << "\"/>\n";
      }
    }
    const double ly = kMarginTop + 14.0 + 18.0 * static_cast<double>(k);
    const double lx = kMarginLeft + pw + 12.0;
    out << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 22) << "\" y2=\""
        << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    out << "<text x=\"" << num(lx + 28) << "\" y=\"" << num(ly) << "\">" << escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
}

std::vector<PlotSeries> series_from_table(const ResultTable& table, const std::string& statistic,
                                          const std::string& x_param,
                                          const std::vector<std::string>& series_params) {
  const std::size_t ix = table.param_index(x_param);
  std::vector<std::size_t> keys;
  for (const auto& name : series_params) keys.push_back(table.param_index(name));

  std::map<std::vector<double>, std::map<double, double>> grouped;
  for (const auto* row : table.aggregates(statistic)) {
    std::vector<double> key;
    for (auto k : keys) key.push_back(row->params[k]);
    grouped[key][row->params[ix]] = row->value;
  }
  std::vector<PlotSeries> out;
  for (const auto& [key, points] : grouped) {
    PlotSeries s;
    for (std::size_t k = 0; k < key.size(); ++k) {
      if (k > 0) s.label += ", ";
      s.label += series_params[k] + "=" + tick_label(key[k]);
    }
    if (s.label.empty()) s.label = statistic;
    for (const auto& [x, y] : points) {
      s.x.push_back(x);
      s.y.push_back(y);
    }
    out.push_back(std::move(s));
  }
  return out;
}

void emit_svg_plot(std::ostream& out, const ResultTable& table, const PlotSpec& spec) {
  if (table.empty()) throw ParameterError("cannot plot an empty result table");
  LinePlot plot;
  plot.title = spec.title.empty() ? table.experiment() + ": " + spec.statistic : spec.title;
  plot.x_label = spec.x_label.empty() ? spec.x_param : spec.x_label;
  plot.y_label = spec.y_label.empty() ? spec.statistic : spec.y_label;
  plot.log_x = spec.log_x;
  plot.log_y = spec.log_y;
  plot.series = series_from_table(table, spec.statistic, spec.x_param, spec.series_params);
  if (plot.series.empty()) throw ParameterError("no aggregate rows for statistic '" + spec.statistic + "'");
  plot.render(out);
}

LinePlot reconstruction_plot(const ReconstructionExample& example) {
  LinePlot plot;
  plot.title = "nu=" + tick_label(example.nu) + ", n_hat=" + std::to_string(example.n_hat) +
               ", relative error " + tick_label(example.relative_error);
  plot.x_label = "coordinate";
  plot.y_label = "value";
  PlotSeries truth{"x", {}, {}, false, false};
  PlotSeries rec{"x_hat", {}, {}, true, false};
  for (Eigen::Index i = 0; i < example.x.size(); ++i) {
    truth.x.push_back(static_cast<double>(i + 1));
    truth.y.push_back(example.x[i]);
    rec.x.push_back(static_cast<double>(i + 1));
    rec.y.push_back(i < example.x_hat.size() ? example.x_hat[i] : 0.0);
  }
  plot.series = {std::move(truth), std::move(rec)};
  return plot;
}

}  // namespace sparsest
