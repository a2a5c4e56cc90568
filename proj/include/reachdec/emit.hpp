#pragma once

#include "reachdec/reach.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace reachdec {

/// One CSV row: the box hull of a stored block set. Block numbers are 1-based;
/// a 1D block leaves the second interval empty (NaN when read back).
struct TubeRow {
  int k = 0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  int block = 0;
  double lo1 = 0.0, hi1 = 0.0;
  double lo2 = 0.0, hi2 = 0.0;
};

inline constexpr const char* kTubeCsvHeader = "k,t_lo,t_hi,block,var_lo_1,var_hi_1,var_lo_2,var_hi_2";

/// Rows ordered by step, then block.
std::vector<TubeRow> tube_rows(const ReachTube& tube);

/// Numbers use 17 significant digits so that reading back is exact.
void write_tube_csv(std::ostream& out, const ReachTube& tube);
std::vector<TubeRow> read_tube_csv(std::istream& in);

/// `block,k,a1,a2,b` for every polygonal block set. Returns the number of rows.
std::size_t write_tube_poly(std::ostream& out, const ReachTube& tube);

/// Interval bands over time for one block, one panel per variable.
void write_block_svg(std::ostream& out, const ReachTube& tube, int block);

/// Writes tube.csv (plus tube.poly when any set is polygonal) and/or
/// block_<i>.svg files into dir. Returns the paths written.
std::vector<std::string> emit_tube(const ReachTube& tube, const std::string& dir, bool csv, bool svg);

/// %.17g
std::string format_double(double x);

}  // namespace reachdec
