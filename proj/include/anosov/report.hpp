// Report plumbing: deterministic CSV writing, config hashing, run manifests,
// and a dependency-free SVG polyline plotter.
#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "anosov/core.hpp"

namespace anosov {

inline uint64_t fnv1a64(const std::string& data) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)v);
  return buf;
}

// Doubles printed with %.17g: round-trip exact, '.' decimal, LF endings.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns)
      : columns_(std::move(columns)) {
    for (size_t i = 0; i < columns_.size(); ++i) {
      if (i) body_ += ",";
      body_ += columns_[i];
    }
    body_ += "\n";
  }
  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size())
      throw ConfigError("CsvWriter: column count mismatch");
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) body_ += ",";
      body_ += cells[i];
    }
    body_ += "\n";
  }
  const std::string& str() const { return body_; }
  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("CsvWriter: cannot open " + path);
    out << body_;
  }

 private:
  std::vector<std::string> columns_;
  std::string body_;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0;
  double threshold = 0;
};

struct RunManifest {
  std::string config_hash;
  std::string tool_version;
  double wall_seconds = 0;
  uint64_t seed = 0;
  std::vector<std::string> outputs;
  std::vector<CheckResult> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// ---------------------------------------------------------------------------
// Minimal static SVG: polylines over linear or log2 axes with tick labels.
// ---------------------------------------------------------------------------

struct SvgSeries {
  std::string label;
  std::string color = "#1f6feb";
  std::vector<double> x, y;
};

struct SvgPlot {
  std::string title;
  std::string x_label, y_label;
  bool log2_x = false, log2_y = false;
  std::vector<SvgSeries> series;

  std::string render(int width = 640, int height = 420) const {
    if (series.empty()) throw ConfigError("SvgPlot: nothing to plot");
    double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
    auto tx = [&](double v) { return log2_x ? std::log2(v) : v; };
    auto ty = [&](double v) { return log2_y ? std::log2(v) : v; };
    bool any = false;
    for (const auto& s : series)
      for (size_t i = 0; i < s.x.size(); ++i) {
        if ((log2_x && s.x[i] <= 0) || (log2_y && s.y[i] <= 0)) continue;
        xmin = std::min(xmin, tx(s.x[i]));
        xmax = std::max(xmax, tx(s.x[i]));
        ymin = std::min(ymin, ty(s.y[i]));
        ymax = std::max(ymax, ty(s.y[i]));
        any = true;
      }
    if (!any) throw ConfigError("SvgPlot: nothing to plot");
    if (xmax - xmin < 1e-12) xmax = xmin + 1;
    if (ymax - ymin < 1e-12) ymax = ymin + 1;
    const double ml = 70, mr = 20, mt = 40, mb = 50;
    double pw = width - ml - mr, ph = height - mt - mb;
    auto px = [&](double v) { return ml + (tx(v) - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double v) {
      return mt + (1.0 - (ty(v) - ymin) / (ymax - ymin)) * ph;
    };
    std::string svg;
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
                  "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
                  width, height, width, height);
    svg += buf;
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"24\" font-family=\"monospace\" "
                  "font-size=\"14\">%s</text>\n",
                  ml, title.c_str());
    svg += buf;
    // axes
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" "
                  "stroke=\"black\"/>\n<line x1=\"%g\" y1=\"%g\" x2=\"%g\" "
                  "y2=\"%g\" stroke=\"black\"/>\n",
                  ml, mt + ph, ml + pw, mt + ph, ml, mt, ml, mt + ph);
    svg += buf;
    // ticks (4 per axis)
    for (int i = 0; i <= 4; ++i) {
      double fx = xmin + (xmax - xmin) * i / 4.0;
      double fy = ymin + (ymax - ymin) * i / 4.0;
      double gx = ml + pw * i / 4.0, gy = mt + ph * (1.0 - i / 4.0);
      std::snprintf(buf, sizeof buf,
                    "<text x=\"%g\" y=\"%g\" font-family=\"monospace\" "
                    "font-size=\"10\" text-anchor=\"middle\">%.3g%s</text>\n",
                    gx, mt + ph + 16, fx, log2_x ? "" : "");
      svg += buf;
      std::snprintf(buf, sizeof buf,
                    "<text x=\"%g\" y=\"%g\" font-family=\"monospace\" "
                    "font-size=\"10\" text-anchor=\"end\">%.3g</text>\n",
                    ml - 6, gy + 4, fy);
      svg += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" font-family=\"monospace\" "
                  "font-size=\"12\" text-anchor=\"middle\">%s%s</text>\n",
                  ml + pw / 2, mt + ph + 36, log2_x ? "log2 " : "",
                  x_label.c_str());
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"16\" y=\"%g\" font-family=\"monospace\" "
                  "font-size=\"12\" transform=\"rotate(-90 16 %g)\" "
                  "text-anchor=\"middle\">%s%s</text>\n",
                  mt + ph / 2, mt + ph / 2, log2_y ? "log2 " : "",
                  y_label.c_str());
    svg += buf;
    int li = 0;
    for (const auto& s : series) {
      std::string pts;
      for (size_t i = 0; i < s.x.size(); ++i) {
        if ((log2_x && s.x[i] <= 0) || (log2_y && s.y[i] <= 0)) continue;
        std::snprintf(buf, sizeof buf, "%g,%g ", px(s.x[i]), py(s.y[i]));
        pts += buf;
      }
      std::snprintf(buf, sizeof buf,
                    "<polyline points=\"%s\" fill=\"none\" stroke=\"%s\" "
                    "stroke-width=\"1.5\"/>\n",
                    pts.c_str(), s.color.c_str());
      svg += buf;
      std::snprintf(buf, sizeof buf,
                    "<text x=\"%g\" y=\"%g\" font-family=\"monospace\" "
                    "font-size=\"11\" fill=\"%s\">%s</text>\n",
                    ml + pw - 150.0, mt + 14.0 + 14.0 * li, s.color.c_str(),
                    s.label.c_str());
      svg += buf;
      ++li;
    }
    svg += "</svg>\n";
    return svg;
  }
};

inline void write_file(const std::string& path, const std::string& content) {
  std::filesystem::create_directories(
      std::filesystem::path(path).parent_path().empty()
          ? "."
          : std::filesystem::path(path).parent_path().string());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("write_file: cannot open " + path);
  out << content;
}

}  // namespace anosov
