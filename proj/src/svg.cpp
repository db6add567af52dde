// Copyright 2026 The diffmon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "diffmon/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace diffmon {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Log-axis ticks live in log10 space; label them with the value itself.
std::string log_tick_label(double t) {
  std::ostringstream os;
  os.precision(3);
  os << std::pow(10.0, t);
  return os.str();
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round ticks: about `want` positions at 1/2/5 spacing.
std::vector<double> ticks(double lo, double hi, int want) {
  if (!(hi > lo)) return {lo};
  double raw = (hi - lo) / want;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> out;
  double first = std::ceil(lo / step) * step;
  for (double v = first; v <= hi + 1e-9 * step; v += step) {
    out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  }
  return out;
}

}  // namespace

SvgPanel::SvgPanel(std::string title, std::string xlabel, std::string ylabel)
    : title_(std::move(title)),
      xlabel_(std::move(xlabel)),
      ylabel_(std::move(ylabel)) {}

void SvgPanel::add_line(const std::vector<std::pair<double, double>>& pts,
                        const std::string& label, bool dashed) {
  curves_.push_back({pts, {}, label, true, dashed});
}

void SvgPanel::add_points(const std::vector<std::pair<double, double>>& pts,
                          const std::string& label) {
  curves_.push_back({pts, {}, label, false, false});
}

void SvgPanel::add_errorbars(
    const std::vector<std::array<double, 3>>& pts_err,
    const std::string& label) {
  Curve c;
  c.label = label;
  c.line = false;
  for (const auto& p : pts_err) {
    c.pts.emplace_back(p[0], p[1]);
    c.err.push_back(p[2]);
  }
  curves_.push_back(std::move(c));
}

void SvgPanel::set_heatmap(const std::vector<double>& xs,
                           const std::vector<double>& ys,
                           const std::vector<double>& values) {
  heat_x_ = xs;
  heat_y_ = ys;
  heat_v_ = values;
}

void SvgPanel::add_marker(double x, double y, const std::string& label) {
  markers_.push_back({{x, y}, label});
}

std::string SvgPanel::render(double x0, double y0, double width,
                             double height) const {
  const double ml = 62, mr = 14, mt = 30, mb = 46;  // margins
  const double pw = width - ml - mr, ph = height - mt - mb;

  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
  double lo_y = lo_x, hi_y = -lo_x;
  auto eat = [&](double x, double y) {
    if (log_x_ && !(x > 0)) return;
    if (log_y_ && !(y > 0)) return;
    double tx = log_x_ ? std::log10(x) : x;
    double ty = log_y_ ? std::log10(y) : y;
    if (!std::isfinite(tx) || !std::isfinite(ty)) return;
    lo_x = std::min(lo_x, tx);
    hi_x = std::max(hi_x, tx);
    lo_y = std::min(lo_y, ty);
    hi_y = std::max(hi_y, ty);
  };
  for (const auto& c : curves_) {
    for (size_t i = 0; i < c.pts.size(); i++) {
      eat(c.pts[i].first, c.pts[i].second);
      if (!c.err.empty()) {
        eat(c.pts[i].first, c.pts[i].second + c.err[i]);
        if (!log_y_ || c.pts[i].second - c.err[i] > 0) {
          eat(c.pts[i].first, c.pts[i].second - c.err[i]);
        }
      }
    }
  }
  for (const auto& [pt, _] : markers_) eat(pt.first, pt.second);
  for (double x : heat_x_) eat(x, heat_y_.empty() ? 1 : heat_y_.front());
  for (double y : heat_y_) eat(heat_x_.empty() ? 1 : heat_x_.front(), y);
  if (!(hi_x > lo_x)) {
    lo_x -= 0.5;
    hi_x += 0.5;
  }
  if (!(hi_y > lo_y)) {
    lo_y -= 0.5;
    hi_y += 0.5;
  }
  double pad_x = 0.04 * (hi_x - lo_x), pad_y = 0.06 * (hi_y - lo_y);
  lo_x -= pad_x;
  hi_x += pad_x;
  lo_y -= pad_y;
  hi_y += pad_y;

  auto px = [&](double x) {
    double t = log_x_ ? std::log10(x) : x;
    return x0 + ml + (t - lo_x) / (hi_x - lo_x) * pw;
  };
  auto py = [&](double y) {
    double t = log_y_ ? std::log10(y) : y;
    return y0 + mt + ph - (t - lo_y) / (hi_y - lo_y) * ph;
  };

  std::ostringstream os;
  os << "<g font-family=\"Helvetica,Arial,sans-serif\" font-size=\"11\">\n";

  if (!heat_v_.empty() && heat_x_.size() >= 2 && heat_y_.size() >= 2) {
    double vmin = *std::min_element(heat_v_.begin(), heat_v_.end());
    double vmax = *std::max_element(heat_v_.begin(), heat_v_.end());
    if (!(vmax > vmin)) vmax = vmin + 1;
    double cw = pw / (heat_x_.size() - 1), ch = ph / (heat_y_.size() - 1);
    for (size_t i = 0; i < heat_x_.size(); i++) {
      for (size_t j = 0; j < heat_y_.size(); j++) {
        double v = heat_v_[i * heat_y_.size() + j];
        double u = std::isfinite(v) ? (v - vmin) / (vmax - vmin) : 1.0;
        int r = static_cast<int>(40 + 215 * u);
        int g = static_cast<int>(60 + 140 * (1 - u));
        int b = static_cast<int>(200 - 160 * u);
        os << "<rect x=\"" << fmt(px(heat_x_[i]) - cw / 2) << "\" y=\""
           << fmt(py(heat_y_[j]) - ch / 2) << "\" width=\"" << fmt(cw)
           << "\" height=\"" << fmt(ch) << "\" fill=\"rgb(" << r << "," << g
           << "," << b << ")\"/>\n";
      }
    }
  }

  // Frame and ticks.
  os << "<rect x=\"" << fmt(x0 + ml) << "\" y=\"" << fmt(y0 + mt)
     << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
     << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (double t : ticks(lo_x, hi_x, 6)) {
    double sx = x0 + ml + (t - lo_x) / (hi_x - lo_x) * pw;
    os << "<line x1=\"" << fmt(sx) << "\" y1=\"" << fmt(y0 + mt + ph)
       << "\" x2=\"" << fmt(sx) << "\" y2=\"" << fmt(y0 + mt + ph + 4)
       << "\" stroke=\"#333\"/>\n";
    std::string lab = log_x_ ? log_tick_label(t) : fmt(t);
    os << "<text x=\"" << fmt(sx) << "\" y=\"" << fmt(y0 + mt + ph + 16)
       << "\" text-anchor=\"middle\">" << lab << "</text>\n";
  }
  for (double t : ticks(lo_y, hi_y, 6)) {
    double sy = y0 + mt + ph - (t - lo_y) / (hi_y - lo_y) * ph;
    os << "<line x1=\"" << fmt(x0 + ml - 4) << "\" y1=\"" << fmt(sy)
       << "\" x2=\"" << fmt(x0 + ml) << "\" y2=\"" << fmt(sy)
       << "\" stroke=\"#333\"/>\n";
    std::string lab = log_y_ ? log_tick_label(t) : fmt(t);
    os << "<text x=\"" << fmt(x0 + ml - 7) << "\" y=\"" << fmt(sy + 4)
       << "\" text-anchor=\"end\">" << lab << "</text>\n";
  }
  os << "<text x=\"" << fmt(x0 + ml + pw / 2) << "\" y=\"" << fmt(y0 + 18)
     << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(title_)
     << "</text>\n";
  os << "<text x=\"" << fmt(x0 + ml + pw / 2) << "\" y=\""
     << fmt(y0 + height - 8) << "\" text-anchor=\"middle\">"
     << escape(xlabel_) << "</text>\n";
  os << "<text x=\"" << fmt(x0 + 14) << "\" y=\"" << fmt(y0 + mt + ph / 2)
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 " << fmt(x0 + 14)
     << " " << fmt(y0 + mt + ph / 2) << ")\">" << escape(ylabel_)
     << "</text>\n";

  // Curves.
  size_t ci = 0;
  double legend_y = y0 + mt + 14;
  for (const auto& c : curves_) {
    const char* color = kPalette[ci % 8];
    if (c.line) {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\""
         << (c.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
      for (const auto& [x, y] : c.pts) {
        if ((log_x_ && !(x > 0)) || (log_y_ && !(y > 0))) continue;
        os << fmt(px(x)) << "," << fmt(py(y)) << " ";
      }
      os << "\"/>\n";
    } else {
      for (size_t i = 0; i < c.pts.size(); i++) {
        auto [x, y] = c.pts[i];
        if ((log_x_ && !(x > 0)) || (log_y_ && !(y > 0))) continue;
        os << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y))
           << "\" r=\"2.6\" fill=\"" << color << "\"/>\n";
        if (!c.err.empty() && c.err[i] > 0) {
          double yl = y - c.err[i], yh = y + c.err[i];
          if (log_y_ && !(yl > 0)) yl = y;
          os << "<line x1=\"" << fmt(px(x)) << "\" y1=\"" << fmt(py(yl))
             << "\" x2=\"" << fmt(px(x)) << "\" y2=\"" << fmt(py(yh))
             << "\" stroke=\"" << color << "\"/>\n";
        }
      }
    }
    if (!c.label.empty()) {
      os << "<line x1=\"" << fmt(x0 + ml + 8) << "\" y1=\"" << fmt(legend_y)
         << "\" x2=\"" << fmt(x0 + ml + 26) << "\" y2=\"" << fmt(legend_y)
         << "\" stroke=\"" << color << "\"/>\n";
      os << "<text x=\"" << fmt(x0 + ml + 31) << "\" y=\""
         << fmt(legend_y + 4) << "\">" << escape(c.label) << "</text>\n";
      legend_y += 15;
    }
    ci++;
  }
  for (const auto& [pt, label] : markers_) {
    os << "<circle cx=\"" << fmt(px(pt.first)) << "\" cy=\""
       << fmt(py(pt.second))
       << "\" r=\"4\" fill=\"none\" stroke=\"#000\" stroke-width=\"1.5\"/>\n";
    if (!label.empty()) {
      os << "<text x=\"" << fmt(px(pt.first) + 6) << "\" y=\""
         << fmt(py(pt.second) - 6) << "\">" << escape(label) << "</text>\n";
    }
  }
  os << "</g>\n";
  return os.str();
}

SvgFigure::SvgFigure(double panel_width, double panel_height)
    : panel_width_(panel_width), panel_height_(panel_height) {}

SvgPanel& SvgFigure::add_panel(std::string title, std::string xlabel,
                               std::string ylabel) {
  panels_.emplace_back(std::move(title), std::move(xlabel),
                       std::move(ylabel));
  return panels_.back();
}

std::string SvgFigure::render() const {
  double total_w = panel_width_ * panels_.size();
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(total_w)
     << "\" height=\"" << fmt(panel_height_) << "\" viewBox=\"0 0 "
     << fmt(total_w) << " " << fmt(panel_height_) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (size_t i = 0; i < panels_.size(); i++) {
    os << panels_[i].render(i * panel_width_, 0, panel_width_,
                            panel_height_);
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace diffmon
