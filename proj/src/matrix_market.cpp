#include "reachdec/matrix_market.hpp"

#include "reachdec/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

namespace reachdec {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& what) {
  throw Error("linalg", "format", source + ":" + std::to_string(line) + ": " + what);
}

// Next non-comment, non-blank line.
bool next_data_line(std::istream& in, std::string& line, int& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    return true;
  }
  return false;
}

}  // namespace

SparseMatrix read_matrix_market(std::istream& in, const std::string& source) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) fail(source, 0, "empty input");
  ++line_no;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") fail(source, line_no, "missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") fail(source, line_no, "object must be 'matrix', got '" + object + "'");
  if (format != "coordinate" && format != "array") fail(source, line_no, "format must be coordinate or array");
  if (field != "real" && field != "integer") fail(source, line_no, "only real matrices are supported, got '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric") {
    fail(source, line_no, "symmetry must be general or symmetric, got '" + symmetry + "'");
  }
  const bool symmetric = symmetry == "symmetric";

  if (!next_data_line(in, line, line_no)) fail(source, line_no, "missing size line");
  std::istringstream size_line(line);
  long rows = -1, cols = -1, entries = -1;
  size_line >> rows >> cols;
  if (format == "coordinate") size_line >> entries;
  if (size_line.fail() || rows < 0 || cols < 0 || (format == "coordinate" && entries < 0)) {
    fail(source, line_no, "malformed size line");
  }
  if (symmetric && rows != cols) fail(source, line_no, "symmetric matrix must be square");

  std::vector<Eigen::Triplet<double>> triplets;
  auto add = [&](long i, long j, double v) {
    triplets.emplace_back(i, j, v);
    if (symmetric && i != j) triplets.emplace_back(j, i, v);
  };

  if (format == "coordinate") {
    triplets.reserve(static_cast<std::size_t>(symmetric ? 2 * entries : entries));
    for (long e = 0; e < entries; ++e) {
      if (!next_data_line(in, line, line_no)) {
        fail(source, line_no, "expected " + std::to_string(entries) + " entries, found " + std::to_string(e));
      }
      std::istringstream ls(line);
      long i = 0, j = 0;
      double v = 0.0;
      ls >> i >> j >> v;
      if (ls.fail()) fail(source, line_no, "malformed entry");
      if (i < 1 || i > rows || j < 1 || j > cols) fail(source, line_no, "index out of range");
      if (symmetric && j > i) fail(source, line_no, "symmetric storage must list the lower triangle only");
      add(i - 1, j - 1, v);
    }
  } else {
    for (long j = 0; j < cols; ++j) {
      for (long i = symmetric ? j : 0; i < rows; ++i) {
        if (!next_data_line(in, line, line_no)) fail(source, line_no, "too few array entries");
        std::istringstream ls(line);
        double v = 0.0;
        ls >> v;
        if (ls.fail()) fail(source, line_no, "malformed value");
        if (v != 0.0) add(i, j, v);
      }
    }
  }
  if (next_data_line(in, line, line_no)) fail(source, line_no, "unexpected trailing data");

  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());  // duplicates are summed
  m.makeCompressed();
  if (!Eigen::Map<const Vector>(m.valuePtr(), m.nonZeros()).allFinite()) {
    throw Error("linalg", "format", source + ": matrix has non-finite entries");
  }
  return m;
}

SparseMatrix read_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("linalg", "io", "cannot open '" + path + "'");
  return read_matrix_market(in, path);
}

void write_matrix_market(std::ostream& out, const Matrix& m) {
  out << "%%MatrixMarket matrix array real general\n" << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << buf << '\n';
    }
  }
}

}  // namespace reachdec
