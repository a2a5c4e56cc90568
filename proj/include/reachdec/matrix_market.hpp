#pragma once

#include "reachdec/linalg.hpp"

#include <iosfwd>
#include <string>

namespace reachdec {

/// Reads `%%MatrixMarket matrix coordinate|array real general|symmetric`.
/// Indices are 1-based; symmetric inputs are expanded to full storage.
/// `source` names the input in error messages.
SparseMatrix read_matrix_market(std::istream& in, const std::string& source);
SparseMatrix read_matrix_market_file(const std::string& path);

/// Writes a dense matrix in array (column-major) format with 17 significant digits.
void write_matrix_market(std::ostream& out, const Matrix& m);

}  // namespace reachdec
