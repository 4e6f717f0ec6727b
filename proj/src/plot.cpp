#include "aadhmm/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace aadhmm {

namespace {

constexpr std::array<const char*, 6> kColors{"#1f77b4", "#d62728", "#2ca02c",
                                             "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace

void write_svg_plot(std::ostream& out, const PlotSpec& spec,
                    const std::vector<PlotSeries>& series) {
  const double left = 70, right = 150, top = 40, bottom = 55;
  const double plot_w = spec.width - left - right;
  const double plot_h = spec.height - top - bottom;

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  auto tx = [&](double x) { return spec.log_x ? std::log10(x) : x; };
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.median[i]) || (spec.log_x && !(s.x[i] > 0))) continue;
      x_min = std::min(x_min, tx(s.x[i]));
      x_max = std::max(x_max, tx(s.x[i]));
      for (double y : {s.q25[i], s.median[i], s.q75[i]}) {
        if (!std::isfinite(y)) continue;
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
      }
    }
  }
  if (!std::isfinite(x_min)) x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  if (x_max == x_min) x_min -= 0.5, x_max += 0.5;
  if (y_max == y_min) y_min -= 0.5, y_max += 0.5;
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;

  auto px = [&](double x) { return left + (tx(x) - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return top + (y_max - y) / (y_max - y_min) * plot_h; };

  out << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << spec.width << R"(" height=")"
      << spec.height << R"(" font-family="sans-serif" font-size="12">)" << '\n';
  out << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n';
  out << R"(<text x=")" << left + plot_w / 2 << R"(" y="22" text-anchor="middle" font-size="14">)"
      << escape(spec.title) << "</text>\n";
  out << R"(<rect x=")" << left << R"(" y=")" << top << R"(" width=")" << plot_w
      << R"(" height=")" << plot_h << R"(" fill="none" stroke="black"/>)" << '\n';

  for (int i = 0; i <= 4; ++i) {
    const double y = y_min + (y_max - y_min) * i / 4.0;
    out << R"(<text x=")" << left - 6 << R"(" y=")" << py(y) + 4
        << R"(" text-anchor="end">)" << fmt(y) << "</text>\n";
    out << R"(<line x1=")" << left << R"(" x2=")" << left + plot_w << R"(" y1=")" << py(y)
        << R"(" y2=")" << py(y) << R"(" stroke="#ddd"/>)" << '\n';
  }
  for (int i = 0; i <= 4; ++i) {
    const double t = x_min + (x_max - x_min) * i / 4.0;
    const double x = spec.log_x ? std::pow(10.0, t) : t;
    out << R"(<text x=")" << left + (t - x_min) / (x_max - x_min) * plot_w << R"(" y=")"
        << top + plot_h + 18 << R"(" text-anchor="middle">)" << fmt(x) << "</text>\n";
  }
  out << R"(<text x=")" << left + plot_w / 2 << R"(" y=")" << spec.height - 12
      << R"(" text-anchor="middle">)" << escape(spec.x_label) << "</text>\n";
  out << R"(<text transform="translate(16,)" << top + plot_h / 2
      << R"~() rotate(-90)" text-anchor="middle">)~" << escape(spec.y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % kColors.size()];
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isfinite(s.median[i]) && std::isfinite(s.q25[i]) && std::isfinite(s.q75[i]) &&
          (!spec.log_x || s.x[i] > 0)) {
        idx.push_back(i);
      }
    }
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return s.x[a] < s.x[b]; });
    if (!idx.empty()) {
      out << R"(<polygon fill=")" << color << R"(" fill-opacity="0.2" stroke="none" points=")";
      for (auto i : idx) out << px(s.x[i]) << ',' << py(s.q75[i]) << ' ';
      for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
        out << px(s.x[*it]) << ',' << py(s.q25[*it]) << ' ';
      }
      out << "\"/>\n";
      out << R"(<polyline fill="none" stroke-width="2" stroke=")" << color << R"(" points=")";
      for (auto i : idx) out << px(s.x[i]) << ',' << py(s.median[i]) << ' ';
      out << "\"/>\n";
      for (auto i : idx) {
        out << R"(<circle r="3" fill=")" << color << R"(" cx=")" << px(s.x[i]) << R"(" cy=")"
            << py(s.median[i]) << "\"/>\n";
      }
    }
    const double ly = top + 16 + 18.0 * static_cast<double>(k);
    out << R"(<line x1=")" << left + plot_w + 12 << R"(" x2=")" << left + plot_w + 32
        << R"(" y1=")" << ly << R"(" y2=")" << ly << R"(" stroke-width="2" stroke=")" << color
        << "\"/>\n";
    out << R"(<text x=")" << left + plot_w + 38 << R"(" y=")" << ly + 4 << "\">"
        << escape(s.name) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace aadhmm
