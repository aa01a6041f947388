// SPDX-License-Identifier: Apache-2.0
#include "hetnas/eval/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

namespace hetnas::eval {

namespace {

constexpr const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

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

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void header(std::ostringstream& s, int width, int height) {
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::string svg_op_distribution(const std::vector<SlotHistogram>& histograms) {
  // One stacked horizontal bar per slot; each bar spans the node count.
  std::map<std::string, std::size_t> colour;
  for (const auto& h : histograms) {
    for (const auto& [name, n] : h.counts) colour.emplace(name, colour.size());
  }
  const int bar_h = 18, gap = 6, left = 90, bar_w = 420;
  const int legend_y = 20 + static_cast<int>(histograms.size()) * (bar_h + gap) + 10;
  const int height = legend_y + 20 * static_cast<int>((colour.size() + 3) / 4) + 10;
  std::ostringstream s;
  header(s, left + bar_w + 30, height);
  int y = 20;
  for (const auto& h : histograms) {
    std::size_t total = 0;
    for (const auto& [name, n] : h.counts) total += n;
    s << "<text x=\"" << left - 6 << "\" y=\"" << y + 13 << "\" text-anchor=\"end\">" << escape(h.slot)
      << "</text>\n";
    double x = left;
    for (const auto& [name, n] : h.counts) {
      const double w = total ? bar_w * static_cast<double>(n) / static_cast<double>(total) : 0.0;
      s << "<rect x=\"" << fmt(x) << "\" y=\"" << y << "\" width=\"" << fmt(w) << "\" height=\"" << bar_h
        << "\" fill=\"" << kPalette[colour[name] % 10] << "\"><title>" << escape(name) << ": " << n
        << "</title></rect>\n";
      x += w;
    }
    y += bar_h + gap;
  }
  std::size_t i = 0;
  for (const auto& [name, idx] : colour) {
    const int lx = left + static_cast<int>(i % 4) * 110;
    const int ly = legend_y + static_cast<int>(i / 4) * 20;
    s << "<rect x=\"" << lx << "\" y=\"" << ly << "\" width=\"12\" height=\"12\" fill=\""
      << kPalette[idx % 10] << "\"/>\n<text x=\"" << lx + 16 << "\" y=\"" << ly + 10 << "\">"
      << escape(name) << "</text>\n";
    ++i;
  }
  s << "</svg>\n";
  return s.str();
}

std::string svg_bin_accuracy(const std::vector<BinRow>& bins, const std::string& title) {
  const int left = 50, top = 30, plot_w = 400, plot_h = 200;
  std::ostringstream s;
  header(s, left + plot_w + 20, top + plot_h + 50);
  s << "<text x=\"" << left << "\" y=\"18\">" << escape(title) << "</text>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
    << top + plot_h << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
    << "\" stroke=\"black\"/>\n";
  const double bw = bins.empty() ? 0.0 : static_cast<double>(plot_w) / static_cast<double>(bins.size());
  for (std::size_t b = 0; b < bins.size(); ++b) {
    const double x = left + bw * static_cast<double>(b);
    s << "<text x=\"" << fmt(x + bw / 2) << "\" y=\"" << top + plot_h + 14 << "\" text-anchor=\"middle\">"
      << fmt(bins[b].lower) << "-" << fmt(bins[b].upper) << "</text>\n";
    if (!bins[b].accuracy) continue;
    const double h = plot_h * *bins[b].accuracy;
    s << "<rect x=\"" << fmt(x + 2) << "\" y=\"" << fmt(top + plot_h - h) << "\" width=\"" << fmt(bw - 4)
      << "\" height=\"" << fmt(h) << "\" fill=\"" << kPalette[0] << "\"><title>n=" << bins[b].count
      << " acc=" << fmt(*bins[b].accuracy) << "</title></rect>\n";
  }
  s << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << top + plot_h + 34
    << "\" text-anchor=\"middle\">node homophily</text>\n";
  s << "<text x=\"12\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 12 " << top + plot_h / 2
    << ")\" text-anchor=\"middle\">accuracy</text>\n</svg>\n";
  return s.str();
}

std::string svg_scatter(const std::vector<ScatterPoint>& points, const std::string& x_label,
                        const std::string& y_label) {
  const int left = 50, top = 20, plot_w = 400, plot_h = 260;
  std::ostringstream s;
  header(s, left + plot_w + 120, top + plot_h + 50);
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = t / 4.0;
    s << "<text x=\"" << fmt(left + plot_w * v) << "\" y=\"" << top + plot_h + 14
      << "\" text-anchor=\"middle\">" << fmt(v) << "</text>\n";
    s << "<text x=\"" << left - 4 << "\" y=\"" << fmt(top + plot_h * (1 - v) + 4)
      << "\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
  }
  std::map<std::string, std::size_t> colour;
  for (const auto& p : points) colour.emplace(p.label, colour.size());
  for (const auto& p : points) {
    const double cx = left + plot_w * std::clamp(p.x, 0.0, 1.0);
    const double cy = top + plot_h * (1.0 - std::clamp(p.y, 0.0, 1.0));
    s << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"4\" fill=\""
      << kPalette[colour[p.label] % 10] << "\"><title>" << escape(p.label) << " (" << fmt(p.x) << ", "
      << fmt(p.y) << ")</title></circle>\n";
  }
  int ly = top + 10;
  for (const auto& [name, idx] : colour) {
    s << "<circle cx=\"" << left + plot_w + 16 << "\" cy=\"" << ly << "\" r=\"4\" fill=\"" << kPalette[idx % 10]
      << "\"/>\n<text x=\"" << left + plot_w + 26 << "\" y=\"" << ly + 4 << "\">" << escape(name)
      << "</text>\n";
    ly += 18;
  }
  s << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << top + plot_h + 34 << "\" text-anchor=\"middle\">"
    << escape(x_label) << "</text>\n";
  s << "<text x=\"12\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 12 " << top + plot_h / 2
    << ")\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n</svg>\n";
  return s.str();
}

}  // namespace hetnas::eval
