#include "opiexit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace opiexit::cli {

namespace {

constexpr double kWidth = 800.0, kHeight = 500.0;
constexpr double kLeft = 70.0, kRight = 160.0, kTop = 30.0, kBottom = 50.0;
constexpr int kTicks = 5;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v, const char* fmt = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

struct Range {
  double lo, hi;
  void grow(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi > lo)) {  // constant data still needs a finite scale
      lo -= 1.0;
      hi += 1.0;
    }
  }
  double frac(double v) const { return (v - lo) / (hi - lo); }
};

}  // namespace

std::string render_svg_lineplot(const CsvTable& data, const std::string& x_col,
                                const std::vector<std::string>& y_cols) {
  if (y_cols.empty())
    throw ValidationError("plot needs at least one y column");
  const std::size_t xi = column_index(data, x_col);
  std::vector<std::size_t> yi;
  yi.reserve(y_cols.size());
  for (const auto& name : y_cols) yi.push_back(column_index(data, name));
  if (data.rows.empty()) throw ValidationError("plot input has no data rows");

  const std::size_t n = data.rows.size();
  std::vector<double> xs(n);
  std::vector<std::vector<double>> ys(y_cols.size(), std::vector<double>(n));
  Range rx{HUGE_VAL, -HUGE_VAL}, ry{HUGE_VAL, -HUGE_VAL};
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = data.rows[r];
    auto cell = [&](std::size_t c) -> const std::string& {
      if (c >= row.size())
        throw ValidationError("plot input row " + std::to_string(r + 2) +
                              " is shorter than the header");
      return row[c];
    };
    xs[r] = parse_double(cell(xi), "column '" + x_col + "'");
    rx.grow(xs[r]);
    for (std::size_t k = 0; k < yi.size(); ++k) {
      ys[k][r] = parse_double(cell(yi[k]), "column '" + y_cols[k] + "'");
      ry.grow(ys[k][r]);
    }
  }
  rx.pad();
  ry.pad();

  const double px0 = kLeft, px1 = kWidth - kRight;
  const double py0 = kHeight - kBottom, py1 = kTop;
  auto X = [&](double v) { return px0 + rx.frac(v) * (px1 - px0); };
  auto Y = [&](double v) { return py0 + ry.frac(v) * (py1 - py0); };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (int)kWidth
      << "\" height=\"" << (int)kHeight << "\" viewBox=\"0 0 " << (int)kWidth
      << " " << (int)kHeight << "\">\n"
      << "<rect width=\"" << (int)kWidth << "\" height=\"" << (int)kHeight
      << "\" fill=\"white\"/>\n";

  // Axes.
  out << "<line x1=\"" << num(px0) << "\" y1=\"" << num(py0) << "\" x2=\""
      << num(px1) << "\" y2=\"" << num(py0)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << num(px0) << "\" y1=\"" << num(py0) << "\" x2=\""
      << num(px0) << "\" y2=\"" << num(py1)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  // Ticks and labels.
  for (int i = 0; i < kTicks; ++i) {
    const double f = double(i) / (kTicks - 1);
    const double vx = rx.lo + f * (rx.hi - rx.lo);
    const double vy = ry.lo + f * (ry.hi - ry.lo);
    const double tx = X(vx), ty = Y(vy);
    out << "<line x1=\"" << num(tx) << "\" y1=\"" << num(py0) << "\" x2=\""
        << num(tx) << "\" y2=\"" << num(py0 + 5)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n"
        << "<text x=\"" << num(tx) << "\" y=\"" << num(py0 + 20)
        << "\" font-family=\"monospace\" font-size=\"11\" "
           "text-anchor=\"middle\">"
        << num(vx, "%.6g") << "</text>\n";
    out << "<line x1=\"" << num(px0 - 5) << "\" y1=\"" << num(ty)
        << "\" x2=\"" << num(px0) << "\" y2=\"" << num(ty)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n"
        << "<text x=\"" << num(px0 - 8) << "\" y=\"" << num(ty + 4)
        << "\" font-family=\"monospace\" font-size=\"11\" "
           "text-anchor=\"end\">"
        << num(vy, "%.6g") << "</text>\n";
  }

  // Axis titles.
  out << "<text x=\"" << num((px0 + px1) / 2) << "\" y=\""
      << num(kHeight - 12)
      << "\" font-family=\"monospace\" font-size=\"13\" "
         "text-anchor=\"middle\">"
      << x_col << "</text>\n";

  // One polyline per series, plus a legend swatch.
  for (std::size_t k = 0; k < yi.size(); ++k) {
    const char* color = kPalette[k % (sizeof(kPalette) / sizeof(*kPalette))];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t r = 0; r < n; ++r) {
      if (r) out << ' ';
      out << num(X(xs[r])) << ',' << num(Y(ys[k][r]));
    }
    out << "\"/>\n";
    const double ly = kTop + 18.0 * double(k);
    out << "<line x1=\"" << num(px1 + 14) << "\" y1=\"" << num(ly + 8)
        << "\" x2=\"" << num(px1 + 34) << "\" y2=\"" << num(ly + 8)
        << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n"
        << "<text x=\"" << num(px1 + 40) << "\" y=\"" << num(ly + 12)
        << "\" font-family=\"monospace\" font-size=\"12\">" << y_cols[k]
        << "</text>\n";
  }

  out << "</svg>\n";
  return out.str();
}

void emit_svg_lineplot(const std::string& csv_path, const std::string& x_col,
                       const std::vector<std::string>& y_cols,
                       const std::string& output_path) {
  atomic_write(output_path, render_svg_lineplot(read_csv(csv_path), x_col,
                                                y_cols));
}

}  // namespace opiexit::cli
