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

#ifndef DIFFMON_SVG_HPP
#define DIFFMON_SVG_HPP

#include <array>
#include <deque>
#include <string>
#include <utility>
#include <vector>

namespace diffmon {

// A small static plotter: enough for line/scatter panels with optional log
// axes, error bars, a legend, and a rectangle heatmap. Output is plain SVG.
class SvgPanel {
 public:
  SvgPanel(std::string title, std::string xlabel, std::string ylabel);

  void set_log_x(bool v) { log_x_ = v; }
  void set_log_y(bool v) { log_y_ = v; }

  void add_line(const std::vector<std::pair<double, double>>& pts,
                const std::string& label, bool dashed = false);
  void add_points(const std::vector<std::pair<double, double>>& pts,
                  const std::string& label);
  void add_errorbars(const std::vector<std::array<double, 3>>& pts_err,
                     const std::string& label);  // (x, y, sigma_y)
  // Heatmap cell values; drawn under any lines. Rows index x, columns y.
  void set_heatmap(const std::vector<double>& xs,
                   const std::vector<double>& ys,
                   const std::vector<double>& values);
  void add_marker(double x, double y, const std::string& label);

  // Renders into the parent svg at the given pixel offset.
  std::string render(double x0, double y0, double width,
                     double height) const;

 private:
  struct Curve {
    std::vector<std::pair<double, double>> pts;
    std::vector<double> err;  // empty unless error bars
    std::string label;
    bool line = true;
    bool dashed = false;
  };

  std::string title_, xlabel_, ylabel_;
  bool log_x_ = false, log_y_ = false;
  std::vector<Curve> curves_;
  std::vector<double> heat_x_, heat_y_, heat_v_;
  std::vector<std::pair<std::pair<double, double>, std::string>> markers_;
};

class SvgFigure {
 public:
  explicit SvgFigure(double panel_width = 420, double panel_height = 340);
  // References stay valid as panels are added (deque storage).
  SvgPanel& add_panel(std::string title, std::string xlabel,
                      std::string ylabel);
  std::string render() const;

 private:
  double panel_width_, panel_height_;
  std::deque<SvgPanel> panels_;
};

}  // namespace diffmon

#endif
