#pragma once

// Self-contained SVG figures. Output depends only on the input values, so
// identical inputs give byte-identical files.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gdc/error.hpp"

namespace gdc::svg {

struct EigenPanel {
  std::string title;
  Eigen::VectorXcd eigenvalues;
  Eigen::VectorXcd eta;  // oscillatory eigenvector
};

struct BarSeries {
  std::string name;
  Eigen::VectorXd values;
};

namespace internal {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

inline std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string text(double x, double y, const std::string& s, const char* anchor = "middle",
                        int size = 12) {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + std::to_string(size) +
         "\" text-anchor=\"" + anchor + "\">" + escape(s) + "</text>\n";
}

inline std::string line(double x1, double y1, double x2, double y2, const char* stroke,
                        double width = 1.0) {
  return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
         num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"/>\n";
}

// Square complex-plane panel with both axes through the origin.
class ComplexPanel {
 public:
  ComplexPanel(double x, double y, double size, double extent)
      : x_(x), y_(y), size_(size), extent_(extent) {}

  double px(double re) const { return x_ + size_ / 2 + re / extent_ * (size_ / 2); }
  double py(double im) const { return y_ + size_ / 2 - im / extent_ * (size_ / 2); }

  std::string frame(const std::string& caption) const {
    std::string out;
    out += "<rect x=\"" + num(x_) + "\" y=\"" + num(y_) + "\" width=\"" + num(size_) +
           "\" height=\"" + num(size_) + "\" fill=\"none\" stroke=\"#999\"/>\n";
    out += line(x_, py(0), x_ + size_, py(0), "#bbb");
    out += line(px(0), y_, px(0), y_ + size_, "#bbb");
    out += text(x_ + size_ / 2, y_ - 6, caption);
    out += text(x_ + size_ - 2, py(0) - 4, "Re", "end", 10);
    out += text(px(0) + 4, y_ + 12, "Im", "start", 10);
    out += text(x_ + 2, y_ + size_ - 4, "|scale| " + num(extent_), "start", 9);
    return out;
  }

 private:
  double x_, y_, size_, extent_;
};

inline double extent_of(const Eigen::VectorXcd& v) {
  double e = 0.0;
  for (const auto& z : v) e = std::max({e, std::abs(z.real()), std::abs(z.imag())});
  return e > 0 ? e * 1.15 : 1.0;
}

}  // namespace internal

/// One column per panel: eigenvalues on top, eigenvector components below.
inline std::string eigen_figure(const std::vector<EigenPanel>& panels) {
  using namespace internal;
  if (panels.empty()) throw ValidationError("eigen figure needs at least one panel");
  const double size = 240;
  const double gap = 40;
  const double width = gap + panels.size() * (size + gap);
  const double height = 2 * size + 3 * gap + 20;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
                    "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " +
                    num(height) + "\" font-family=\"sans-serif\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t c = 0; c < panels.size(); ++c) {
    const EigenPanel& p = panels[c];
    if (p.eigenvalues.size() == 0 || p.eta.size() == 0) {
      throw ValidationError("eigen panel \"" + p.title + "\" is empty");
    }
    const double x = gap + c * (size + gap);
    const ComplexPanel top(x, gap + 10, size, extent_of(p.eigenvalues));
    out += top.frame(p.title + ": eigenvalues");
    for (Eigen::Index i = 0; i < p.eigenvalues.size(); ++i) {
      const auto z = p.eigenvalues(i);
      out += "<circle cx=\"" + num(top.px(z.real())) + "\" cy=\"" + num(top.py(z.imag())) +
             "\" r=\"4\" fill=\"#1f77b4\"/>\n";
      out += text(top.px(z.real()) + 6, top.py(z.imag()) - 6, std::to_string(i + 1), "start", 10);
    }
    const ComplexPanel bottom(x, 2 * gap + size + 20, size, extent_of(p.eta));
    out += bottom.frame(p.title + ": eigenvector");
    for (Eigen::Index i = 0; i < p.eta.size(); ++i) {
      const auto z = p.eta(i);
      out += line(bottom.px(0), bottom.py(0), bottom.px(z.real()), bottom.py(z.imag()), "#d62728", 1.5);
      out += text(bottom.px(z.real()) + 4, bottom.py(z.imag()) - 4, std::to_string(i + 1), "start", 11);
    }
  }
  out += "</svg>\n";
  return out;
}

/// Grouped bars, one group per label, one bar per series.
inline std::string bar_chart(const std::string& title, const std::vector<std::string>& labels,
                             const std::vector<BarSeries>& series) {
  using namespace internal;
  if (labels.empty() || series.empty()) throw ValidationError("bar chart has no data");
  double top = 0.0;
  for (const auto& s : series) {
    if (s.values.size() != static_cast<Eigen::Index>(labels.size())) {
      throw ValidationError("bar series \"" + s.name + "\" length does not match labels");
    }
    top = std::max(top, s.values.cwiseAbs().maxCoeff());
  }
  if (top == 0.0) top = 1.0;
  static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
  const double group = 18.0 * series.size() + 16;
  const double left = 60, plot_h = 260, top_margin = 50;
  const double width = left + group * labels.size() + 160;
  const double height = top_margin + plot_h + 60;
  const double zero_y = top_margin + plot_h / 2;
  const double scale = (plot_h / 2) / (top * 1.1);
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
                    "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " +
                    num(height) + "\" font-family=\"sans-serif\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += text(width / 2, 24, title, "middle", 14);
  out += line(left, zero_y, left + group * labels.size(), zero_y, "#333");
  out += line(left, top_margin, left, top_margin + plot_h, "#333");
  out += text(left - 6, zero_y - scale * top + 4, num(top), "end", 10);
  out += text(left - 6, zero_y + scale * top + 4, num(-top), "end", 10);
  for (std::size_t g = 0; g < labels.size(); ++g) {
    const double gx = left + g * group + 8;
    for (std::size_t s = 0; s < series.size(); ++s) {
      const double v = series[s].values(static_cast<Eigen::Index>(g));
      const double h = std::abs(v) * scale;
      const double y = v >= 0 ? zero_y - h : zero_y;
      out += "<rect x=\"" + num(gx + 18.0 * s) + "\" y=\"" + num(y) + "\" width=\"16\" height=\"" +
             num(h) + "\" fill=\"" + kColors[s % 6] + "\"/>\n";
    }
    out += text(gx + 9.0 * series.size(), top_margin + plot_h + 18, labels[g], "middle", 10);
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double ly = top_margin + 14 + 18.0 * s;
    const double lx = left + group * labels.size() + 20;
    out += "<rect x=\"" + num(lx) + "\" y=\"" + num(ly - 10) + "\" width=\"12\" height=\"12\" fill=\"" +
           kColors[s % 6] + "\"/>\n";
    out += text(lx + 18, ly, series[s].name, "start", 11);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace gdc::svg
