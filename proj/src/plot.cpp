#include "actis/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

namespace actis {

namespace {

constexpr double kWidth = 840, kHeight = 520;
constexpr double kLeft = 62, kRight = 690, kTop = 24, kBottom = 472;

const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  if (v == std::floor(v) && std::fabs(v) < 1e9)
    std::snprintf(buf, sizeof(buf), "%.0f", v);
  else
    std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

struct Svg {
  std::string body;

  void line(double x1, double y1, double x2, double y2,
            const std::string& style) {
    body += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" +
            num(x2) + "\" y2=\"" + num(y2) + "\" " + style + "/>\n";
  }
  void text(double x, double y, const std::string& s,
            const std::string& extra = "") {
    body += "<text x=\"" + num(x) + "\" y=\"" + num(y) +
            "\" font-family=\"sans-serif\" font-size=\"12\" " + extra + ">" +
            s + "</text>\n";
  }
  void poly(const std::string& tag, const std::string& points,
            const std::string& style) {
    body += "<" + tag + " points=\"" + points + "\" " + style + "/>\n";
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
        << kHeight << "\">\n<rect width=\"100%\" height=\"100%\" "
        << "fill=\"white\"/>\n"
        << body << "</svg>\n";
  }
};

void draw_frame(Svg& svg, const std::string& x_label,
                const std::string& y_label) {
  const std::string axis = "stroke=\"black\" stroke-width=\"1\"";
  svg.line(kLeft, kTop, kLeft, kBottom, axis);
  svg.line(kLeft, kBottom, kRight, kBottom, axis);
  svg.text((kLeft + kRight) / 2, kHeight - 8, x_label,
           "text-anchor=\"middle\"");
  svg.text(14, (kTop + kBottom) / 2, y_label,
           "text-anchor=\"middle\" transform=\"rotate(-90 14 " +
               num((kTop + kBottom) / 2) + ")\"");
}

void draw_y_gmean_ticks(Svg& svg) {
  for (int i = 0; i <= 4; ++i) {
    const double v = 0.25 * i;
    const double y = kBottom - (kBottom - kTop) * v;
    svg.line(kLeft, y, kRight, y,
             "stroke=\"#dddddd\" stroke-width=\"0.5\"");
    svg.line(kLeft - 4, y, kLeft, y, "stroke=\"black\" stroke-width=\"1\"");
    svg.text(kLeft - 8, y + 4, tick_label(v), "text-anchor=\"end\"");
  }
}

void draw_legend(Svg& svg, const std::vector<std::string>& names) {
  double y = kTop + 10;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    svg.line(kRight + 12, y, kRight + 40, y,
             "stroke=\"" + std::string(color) + "\" stroke-width=\"2\"");
    svg.text(kRight + 46, y + 4, names[i]);
    y += 20;
  }
}

}  // namespace

void render_curves(
    const std::vector<std::pair<std::string, AggregateCurve>>& aggregates,
    std::optional<std::int64_t> drift_step,
    const std::filesystem::path& out_path) {
  if (aggregates.empty())
    throw std::invalid_argument("render_curves: no aggregates");
  const std::size_t len = aggregates.front().second.mean.size();
  if (len == 0) throw std::invalid_argument("render_curves: empty curve");
  for (const auto& [name, agg] : aggregates)
    if (agg.mean.size() != len)
      throw std::invalid_argument("render_curves: curve lengths differ");

  const double x_span = len > 1 ? static_cast<double>(len - 1) : 1.0;
  const auto sx = [&](double t) {
    return kLeft + (kRight - kLeft) * (t / x_span);
  };
  const auto sy = [&](double g) {
    return kBottom - (kBottom - kTop) * std::clamp(g, 0.0, 1.0);
  };

  Svg svg;
  draw_y_gmean_ticks(svg);
  draw_frame(svg, "t", "G-mean");
  for (int i = 0; i <= 4; ++i) {
    const double t = x_span * i / 4.0;
    svg.line(sx(t), kBottom, sx(t), kBottom + 4,
             "stroke=\"black\" stroke-width=\"1\"");
    svg.text(sx(t), kBottom + 18, tick_label(std::round(t)),
             "text-anchor=\"middle\"");
  }

  if (drift_step && *drift_step >= 0 &&
      *drift_step < static_cast<std::int64_t>(len))
    svg.line(sx(static_cast<double>(*drift_step)), kTop,
             sx(static_cast<double>(*drift_step)), kBottom,
             "stroke=\"#888888\" stroke-width=\"1\" "
             "stroke-dasharray=\"5,4\"");

  std::vector<std::string> names;
  for (std::size_t i = 0; i < aggregates.size(); ++i) {
    const auto& [name, agg] = aggregates[i];
    names.push_back(name);
    const std::string color = kPalette[i % std::size(kPalette)];

    std::string band;
    for (std::size_t t = 0; t < len; ++t)
      band += num(sx(double(t))) + "," + num(sy(agg.mean[t] + agg.se[t])) + " ";
    for (std::size_t t = len; t-- > 0;)
      band += num(sx(double(t))) + "," + num(sy(agg.mean[t] - agg.se[t])) + " ";
    svg.poly("polygon", band,
             "fill=\"" + color + "\" fill-opacity=\"0.15\" stroke=\"none\"");

    std::string line;
    for (std::size_t t = 0; t < len; ++t)
      line += num(sx(double(t))) + "," + num(sy(agg.mean[t])) + " ";
    svg.poly("polyline", line,
             "fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"");
  }
  draw_legend(svg, names);
  svg.write(out_path);
}

void render_sweep(const std::vector<SweepRow>& rows,
                  const std::filesystem::path& out_path) {
  if (rows.empty()) throw std::invalid_argument("render_sweep: no rows");

  std::vector<double> budgets;
  std::map<std::string, std::vector<const SweepRow*>> series;
  std::vector<std::string> names;  // first-appearance order
  for (const auto& r : rows) {
    if (std::find(budgets.begin(), budgets.end(), r.budget) == budgets.end())
      budgets.push_back(r.budget);
    if (!series.count(r.learner)) names.push_back(r.learner);
    series[r.learner].push_back(&r);
  }
  std::sort(budgets.begin(), budgets.end());
  const double b_min = budgets.front(), b_max = budgets.back();
  const bool log_x = b_min > 0.0 && b_max > b_min;

  const auto xpos = [&](double b) {
    if (b_max == b_min) return (kLeft + kRight) / 2;
    const double f = log_x
                         ? (std::log(b) - std::log(b_min)) /
                               (std::log(b_max) - std::log(b_min))
                         : (b - b_min) / (b_max - b_min);
    return kLeft + (kRight - kLeft) * f;
  };
  const auto ypos = [&](double g) {
    return kBottom - (kBottom - kTop) * std::clamp(g, 0.0, 1.0);
  };

  Svg svg;
  draw_y_gmean_ticks(svg);
  draw_frame(svg, "B", "final G-mean");
  for (const double b : budgets) {
    svg.line(xpos(b), kBottom, xpos(b), kBottom + 4,
             "stroke=\"black\" stroke-width=\"1\"");
    svg.text(xpos(b), kBottom + 18, tick_label(b), "text-anchor=\"middle\"");
  }

  for (std::size_t i = 0; i < names.size(); ++i) {
    const std::string color = kPalette[i % std::size(kPalette)];
    auto pts = series[names[i]];
    std::sort(pts.begin(), pts.end(),
              [](const SweepRow* a, const SweepRow* b) {
                return a->budget < b->budget;
              });
    std::string line;
    for (const SweepRow* r : pts) {
      const double x = xpos(r->budget);
      line += num(x) + "," + num(ypos(r->mean_final)) + " ";
      const double lo = ypos(r->mean_final - r->se_final);
      const double hi = ypos(r->mean_final + r->se_final);
      const std::string stroke =
          "stroke=\"" + color + "\" stroke-width=\"1\"";
      svg.line(x, lo, x, hi, stroke);
      svg.line(x - 4, lo, x + 4, lo, stroke);
      svg.line(x - 4, hi, x + 4, hi, stroke);
      svg.body += "<circle cx=\"" + num(x) + "\" cy=\"" +
                  num(ypos(r->mean_final)) + "\" r=\"3\" fill=\"" + color +
                  "\"/>\n";
    }
    svg.poly("polyline", line,
             "fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"");
  }
  draw_legend(svg, names);
  svg.write(out_path);
}

}  // namespace actis
