#pragma once
// Minimal SVG heatmap for window-sweep grids. Pure text output, no deps.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "gestauth/eval.hpp"
#include "gestauth/util.hpp"

namespace gestauth::svg {

namespace detail {

// Blue (good) through white to red (chance level) over EER in [0, 0.5].
inline std::string eer_color(double eer) {
  const double u = std::clamp(eer / 0.5, 0.0, 1.0);
  auto lerp = [](int a, int b, double t) { return int(std::lround(a + (b - a) * t)); };
  int r, g, b;
  if (u < 0.5) {
    const double t = u / 0.5;
    r = lerp(0x21, 0xf7, t);
    g = lerp(0x66, 0xf7, t);
    b = lerp(0xac, 0xf7, t);
  } else {
    const double t = (u - 0.5) / 0.5;
    r = lerp(0xf7, 0xb2, t);
    g = lerp(0xf7, 0x18, t);
    b = lerp(0xf7, 0x2b, t);
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace detail

inline std::string render_sweep_heatmap(const eval::SweepReport& rep) {
  const int cell = 72, pad_left = 96, pad_top = 56, pad_bottom = 28;
  const int cols = int(rep.sizes.size()), rows = int(rep.offsets.size());
  const int width = pad_left + cols * cell + 16;
  const int height = pad_top + rows * cell + pad_bottom;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<style>text{font-family:monospace;font-size:12px;fill:#222}"
         ".t{font-size:14px;font-weight:bold}</style>\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
  out << "<text class=\"t\" x=\"" << pad_left << "\" y=\"20\">mean EER by window size (s, columns) "
         "and offset (s, rows)</text>\n";

  for (int c = 0; c < cols; ++c)
    out << "<text x=\"" << pad_left + c * cell + cell / 2 - 14 << "\" y=\"" << pad_top - 8
        << "\">" << fmt_fixed(rep.sizes[size_t(c)], 2) << "</text>\n";
  for (int r = 0; r < rows; ++r)
    out << "<text x=\"" << 16 << "\" y=\"" << pad_top + r * cell + cell / 2 + 4 << "\">"
        << "o=" << fmt_fixed(rep.offsets[size_t(r)], 2) << "</text>\n";

  size_t idx = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c, ++idx) {
      const auto& sc = rep.cells[idx];
      const int x = pad_left + c * cell, y = pad_top + r * cell;
      const std::string fill = sc.valid ? detail::eer_color(sc.mean_eer) : "#dddddd";
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\""
          << cell << "\" fill=\"" << fill << "\" stroke=\"#888\"/>\n";
      out << "<text x=\"" << x + 10 << "\" y=\"" << y + cell / 2 + 4 << "\">"
          << (sc.valid ? fmt_fixed(sc.mean_eer) : std::string("-")) << "</text>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

inline void write_sweep_heatmap(const eval::SweepReport& rep,
                                const std::filesystem::path& file) {
  write_text_file(file, render_sweep_heatmap(rep));
}

}  // namespace gestauth::svg
