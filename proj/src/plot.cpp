#include "fir/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "fir/errors.hpp"
#include "fir/textio.hpp"

namespace fir::plot {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 780.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 400.0;

const char* kPalette[6] = {"#d95f02", "#1b9e77", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;  // numeric columns, header order
  std::vector<std::string> row_names;        // only for label-keyed tables
};

struct Axis {
  double lo, hi;
  double map(double v, double a, double b) const {
    if (hi == lo) return (a + b) / 2.0;
    return a + (v - lo) / (hi - lo) * (b - a);
  }
};

Axis pad(double lo, double hi) {
  if (lo > hi) std::swap(lo, hi);
  double span = hi - lo;
  if (span == 0.0) span = std::max(1.0, std::abs(hi));
  return {lo - 0.05 * span, hi + 0.05 * span};
}

std::string svg_open() {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n" +
         "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" fill=\"white\"/>\n";
}

void axes(std::string& out, const Axis& x, const Axis& y) {
  out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kBottom) + "\" x2=\"" + num(kRight) +
         "\" y2=\"" + num(kBottom) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) +
         "\" y2=\"" + num(kBottom) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double fx = x.lo + (x.hi - x.lo) * k / 5.0;
    const double px = x.map(fx, kLeft, kRight);
    out += "<line x1=\"" + num(px) + "\" y1=\"" + num(kBottom) + "\" x2=\"" + num(px) +
           "\" y2=\"" + num(kBottom + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(px) + "\" y=\"" + num(kBottom + 20) +
           "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">" + num(fx) +
           "</text>\n";
    const double fy = y.lo + (y.hi - y.lo) * k / 5.0;
    const double py = y.map(fy, kBottom, kTop);
    out += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(py) + "\" x2=\"" + num(kLeft) +
           "\" y2=\"" + num(py) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(py + 4) +
           "\" font-size=\"12\" text-anchor=\"end\" font-family=\"sans-serif\">" + num(fy) +
           "</text>\n";
  }
}

void legend(std::string& out, const std::vector<std::string>& names) {
  double lx = kLeft + 10.0;
  for (std::size_t k = 0; k < names.size(); ++k) {
    out += "<rect x=\"" + num(lx) + "\" y=\"" + num(kTop - 20) +
           "\" width=\"12\" height=\"12\" fill=\"" + kPalette[k % 6] + "\"/>\n";
    out += "<text x=\"" + num(lx + 16) + "\" y=\"" + num(kTop - 9) +
           "\" font-size=\"12\" font-family=\"sans-serif\">" + names[k] + "</text>\n";
    lx += 18.0 + 7.0 * names[k].size() + 16.0;
  }
}

std::string render_lines(const Table& tbl) {
  const std::vector<double>& xs = tbl.columns[0];
  Axis x = pad(*std::min_element(xs.begin(), xs.end()), *std::max_element(xs.begin(), xs.end()));
  double lo = 0.0, hi = 1.0;
  bool first = true;
  for (std::size_t c = 1; c < tbl.columns.size(); ++c)
    for (double v : tbl.columns[c]) {
      if (first) {
        lo = hi = v;
        first = false;
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  Axis y = pad(lo, hi);

  std::string out = svg_open();
  axes(out, x, y);
  for (std::size_t c = 1; c < tbl.columns.size(); ++c) {
    out += "<polyline fill=\"none\" stroke=\"";
    out += kPalette[(c - 1) % 6];
    out += "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      out += num(x.map(xs[i], kLeft, kRight));
      out += ',';
      out += num(y.map(tbl.columns[c][i], kBottom, kTop));
      out += ' ';
    }
    out += "\"/>\n";
  }
  legend(out, std::vector<std::string>(tbl.header.begin() + 1, tbl.header.end()));
  out += "</svg>\n";
  return out;
}

std::string render_boxes(const Table& tbl) {
  const std::vector<double>& xs = tbl.columns[0];
  Axis x = pad(*std::min_element(xs.begin(), xs.end()),
               *std::max_element(xs.begin(), xs.end()) + 1.0);
  double lo = tbl.columns[1][0], hi = lo;
  for (std::size_t c = 1; c < tbl.columns.size(); ++c)
    for (double v : tbl.columns[c]) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  Axis y = pad(lo, hi);

  const double slot = (kRight - kLeft) / std::max<std::size_t>(1, xs.size());
  const double bw = std::max(1.0, slot * 0.6);

  std::string out = svg_open();
  axes(out, x, y);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double cx = x.map(xs[i] + 0.5, kLeft, kRight);
    const double q05 = y.map(tbl.columns[1][i], kBottom, kTop);
    const double q25 = y.map(tbl.columns[2][i], kBottom, kTop);
    const double med = y.map(tbl.columns[3][i], kBottom, kTop);
    const double q75 = y.map(tbl.columns[4][i], kBottom, kTop);
    const double q95 = y.map(tbl.columns[5][i], kBottom, kTop);
    out += "<line x1=\"" + num(cx) + "\" y1=\"" + num(q05) + "\" x2=\"" + num(cx) + "\" y2=\"" +
           num(q95) + "\" stroke=\"#555555\" stroke-width=\"1\"/>\n";
    out += "<rect x=\"" + num(cx - bw / 2) + "\" y=\"" + num(q75) + "\" width=\"" + num(bw) +
           "\" height=\"" + num(std::max(0.0, q25 - q75)) +
           "\" fill=\"#9ecae1\" stroke=\"#3182bd\" stroke-width=\"0.8\"/>\n";
    out += "<line x1=\"" + num(cx - bw / 2) + "\" y1=\"" + num(med) + "\" x2=\"" +
           num(cx + bw / 2) + "\" y2=\"" + num(med) +
           "\" stroke=\"#d95f02\" stroke-width=\"1.5\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string render_bars(const Table& tbl) {
  const std::size_t groups = tbl.row_names.size();
  const std::size_t series = tbl.columns.size();
  double hi = 0.0;
  for (const auto& col : tbl.columns)
    for (double v : col) hi = std::max(hi, v);
  Axis y = pad(0.0, hi <= 0.0 ? 1.0 : hi);
  y.lo = 0.0;
  Axis x{0.0, static_cast<double>(groups)};

  const double slot = (kRight - kLeft) / std::max<std::size_t>(1, groups);
  const double bw = slot / (series + 1.0);

  std::string out = svg_open();
  axes(out, x, y);
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t s = 0; s < series; ++s) {
      const double v = tbl.columns[s][g];
      const double px = kLeft + slot * g + bw * (0.5 + s);
      const double py = y.map(v, kBottom, kTop);
      out += "<rect x=\"" + num(px) + "\" y=\"" + num(py) + "\" width=\"" + num(bw * 0.9) +
             "\" height=\"" + num(std::max(0.0, kBottom - py)) + "\" fill=\"" +
             kPalette[s % 6] + "\"/>\n";
    }
    out += "<text x=\"" + num(kLeft + slot * (g + 0.5)) + "\" y=\"" + num(kBottom + 20) +
           "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">" +
           tbl.row_names[g] + "</text>\n";
  }
  legend(out, std::vector<std::string>(tbl.header.begin() + 1, tbl.header.end()));
  out += "</svg>\n";
  return out;
}

}  // namespace

std::string render_csv(const std::string& csv_path) {
  const std::vector<std::string> lines = textio::read_lines(csv_path);
  if (lines.empty()) fail(Errc::SchemaError, "empty csv " + csv_path);
  const auto header_sv = textio::split(lines[0], ',');
  std::vector<std::string> header(header_sv.begin(), header_sv.end());

  const bool is_line = header.size() >= 2 && header[0] == "t";
  const bool is_box = header.size() == 6 && header[0] == "frame" && header[1] == "q05" &&
                      header[2] == "q25" && header[3] == "median" && header[4] == "q75" &&
                      header[5] == "q95";
  const bool is_bar = header.size() >= 2 && header[0] == "au_id";
  if (!is_line && !is_box && !is_bar)
    fail(Errc::SchemaError, "unrecognized csv header in " + csv_path);

  Table tbl;
  tbl.header = header;
  const std::size_t numeric_from = is_bar ? 1 : 0;
  tbl.columns.assign(header.size() - numeric_from, {});
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto f = textio::split(lines[li], ',');
    if (f.size() != header.size()) fail(Errc::SchemaError, "ragged csv row in " + csv_path);
    if (is_bar) tbl.row_names.emplace_back(f[0]);
    for (std::size_t c = numeric_from; c < f.size(); ++c)
      tbl.columns[c - numeric_from].push_back(textio::parse_double(f[c], csv_path));
  }
  if (tbl.columns[0].empty()) fail(Errc::SchemaError, "csv has no data rows: " + csv_path);

  if (is_box) return render_boxes(tbl);
  if (is_bar) return render_bars(tbl);
  return render_lines(tbl);
}

void render_csv_to_file(const std::string& csv_path, const std::string& svg_path) {
  textio::write_file(svg_path, render_csv(csv_path));
}

}  // namespace fir::plot
