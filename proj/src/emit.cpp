#include "reachdec/emit.hpp"

#include "reachdec/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace reachdec {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<TubeRow> tube_rows(const ReachTube& tube) {
  std::vector<TubeRow> rows;
  rows.reserve(static_cast<std::size_t>(tube.steps()) * tube.tracked.size());
  for (int k = 0; k < tube.steps(); ++k) {
    for (std::size_t pos = 0; pos < tube.tracked.size(); ++pos) {
      const Hyperrectangle h = overapproximate_box(tube.sets[static_cast<std::size_t>(k)][pos]);
      const Vector lo = h.low();
      const Vector hi = h.high();
      TubeRow row;
      row.k = k;
      row.t_lo = tube.time_lo(k);
      row.t_hi = tube.time_hi(k);
      row.block = tube.tracked[pos] + 1;
      row.lo1 = lo[0];
      row.hi1 = hi[0];
      if (lo.size() > 1) {
        row.lo2 = lo[1];
        row.hi2 = hi[1];
      } else {
        row.lo2 = row.hi2 = std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_tube_csv(std::ostream& out, const ReachTube& tube) {
  out << kTubeCsvHeader << '\n';
  for (const TubeRow& r : tube_rows(tube)) {
    out << r.k << ',' << format_double(r.t_lo) << ',' << format_double(r.t_hi) << ',' << r.block << ','
        << format_double(r.lo1) << ',' << format_double(r.hi1) << ',';
    if (!std::isnan(r.lo2)) out << format_double(r.lo2) << ',' << format_double(r.hi2);
    else out << ',';
    out << '\n';
  }
  if (!out) throw Error("cli", "io", "failed to write tube CSV");
}

namespace {

double parse_field(const std::string& s, int line) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) {
    throw Error("cli", "format", "tube CSV line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<TubeRow> read_tube_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTubeCsvHeader) {
    throw Error("cli", "format", "tube CSV: missing or unexpected header");
  }
  std::vector<TubeRow> rows;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 8) {
      throw Error("cli", "format", "tube CSV line " + std::to_string(number) + ": expected 8 fields");
    }
    TubeRow r;
    r.k = static_cast<int>(parse_field(fields[0], number));
    r.t_lo = parse_field(fields[1], number);
    r.t_hi = parse_field(fields[2], number);
    r.block = static_cast<int>(parse_field(fields[3], number));
    r.lo1 = parse_field(fields[4], number);
    r.hi1 = parse_field(fields[5], number);
    r.lo2 = parse_field(fields[6], number);
    r.hi2 = parse_field(fields[7], number);
    rows.push_back(r);
  }
  return rows;
}

std::size_t write_tube_poly(std::ostream& out, const ReachTube& tube) {
  out << "block,k,a1,a2,b\n";
  std::size_t count = 0;
  for (std::size_t pos = 0; pos < tube.tracked.size(); ++pos) {
    for (int k = 0; k < tube.steps(); ++k) {
      const auto* poly = tube.sets[static_cast<std::size_t>(k)][pos].get_if<HPolygon>();
      if (!poly) continue;
      for (const auto& c : poly->constraints()) {
        out << tube.tracked[pos] + 1 << ',' << k << ',' << format_double(c.normal.x()) << ','
            << format_double(c.normal.y()) << ',' << format_double(c.offset) << '\n';
        ++count;
      }
    }
  }
  if (!out) throw Error("cli", "io", "failed to write polygon file");
  return count;
}

void write_block_svg(std::ostream& out, const ReachTube& tube, int block) {
  if (!tube.tracks(block)) throw Error("cli", "invalid", "block " + std::to_string(block + 1) + " is not tracked");
  const auto range = tube.blocks[block];
  std::vector<double> lo[2], hi[2];
  for (int k = 0; k < tube.steps(); ++k) {
    const Hyperrectangle h = overapproximate_box(tube.block_set(k, block));
    for (int v = 0; v < range.size; ++v) {
      lo[v].push_back(h.low()[v]);
      hi[v].push_back(h.high()[v]);
    }
  }
  const double width = 800.0, panel = 260.0, margin = 50.0;
  const double t0 = tube.time_lo(0);
  double t1 = tube.time_hi(tube.steps() - 1);
  if (tube.model == TimeModel::DiscreteTime) t1 += tube.delta;
  const double tspan = t1 > t0 ? t1 - t0 : 1.0;
  const double height = range.size * (panel + margin) + margin;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width + 2 * margin << "\" height=\"" << height
      << "\">\n";
  for (int v = 0; v < range.size; ++v) {
    double ymin = *std::min_element(lo[v].begin(), lo[v].end());
    double ymax = *std::max_element(hi[v].begin(), hi[v].end());
    if (ymax - ymin <= 0.0) {
      ymin -= 0.5;
      ymax += 0.5;
    }
    const double top = margin + v * (panel + margin);
    auto sx = [&](double t) { return margin + (t - t0) / tspan * width; };
    auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * panel; };
    out << "<g>\n<rect x=\"" << margin << "\" y=\"" << top << "\" width=\"" << width << "\" height=\"" << panel
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << margin << "\" y=\"" << top - 8 << "\" font-size=\"14\">x" << range.start + v + 1
        << " (block " << block + 1 << ")  [" << format_double(ymin) << ", " << format_double(ymax) << "]</text>\n";
    for (int k = 0; k < tube.steps(); ++k) {
      const double a = tube.time_lo(k);
      const double b = tube.model == TimeModel::DiscreteTime ? a + tube.delta : tube.time_hi(k);
      const double x = sx(a);
      const double y = sy(hi[v][static_cast<std::size_t>(k)]);
      const double w = std::max(sx(b) - x, 0.5);
      const double h = std::max(sy(lo[v][static_cast<std::size_t>(k)]) - y, 0.5);
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << h
          << "\" fill=\"orange\" fill-opacity=\"0.6\" stroke=\"none\"/>\n";
    }
    out << "<text x=\"" << margin << "\" y=\"" << top + panel + 18 << "\" font-size=\"12\">t = "
        << format_double(t0) << "</text>\n";
    out << "<text x=\"" << margin + width - 80 << "\" y=\"" << top + panel + 18 << "\" font-size=\"12\">t = "
        << format_double(t1) << "</text>\n</g>\n";
  }
  out << "</svg>\n";
  if (!out) throw Error("cli", "io", "failed to write SVG");
}

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cli", "io", "cannot write '" + path + "'");
  f.precision(10);
  return f;
}

}  // namespace

std::vector<std::string> emit_tube(const ReachTube& tube, const std::string& dir, bool csv, bool svg) {
  if (tube.steps() == 0) throw Error("cli", "invalid", "empty reach tube");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cli", "io", "cannot create '" + dir + "': " + ec.message());
  const std::filesystem::path base(dir);
  std::vector<std::string> written;
  if (csv) {
    const std::string path = (base / "tube.csv").string();
    auto f = open_output(path);
    write_tube_csv(f, tube);
    written.push_back(path);

    std::ostringstream poly;
    if (write_tube_poly(poly, tube) > 0) {
      const std::string ppath = (base / "tube.poly").string();
      auto pf = open_output(ppath);
      pf << poly.str();
      written.push_back(ppath);
    }
  }
  if (svg) {
    for (int block : tube.tracked) {
      const std::string path = (base / ("block_" + std::to_string(block + 1) + ".svg")).string();
      auto f = open_output(path);
      write_block_svg(f, tube, block);
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace reachdec
